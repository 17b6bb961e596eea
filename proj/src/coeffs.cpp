#include "reslab/coeffs.hpp"

#include <cmath>

#include "reslab/exactq.hpp"

namespace reslab {

namespace {

// Exact-rational evaluation context for the Wave/Beam coupling matrix:
// available when all |n|^kappa and R^kappa are integers (true for builder
// sets: Beam uses |n|^2, Wave norms are integers by construction). The (4.23)
// sums cancel to O(eps^2) x 16 entries, so they are evaluated in rationals
// and rounded once at the end.
struct ExactCtx {
    bool ok = false;
    std::vector<BigRat> w;  // |n_i|^kappa
    BigRat g_inv;           // 1/g = 16 R^{2 kappa}
};

ExactCtx make_exact_ctx(const LambdaSet& lam, const EquationKind& kind) {
    ExactCtx ctx;
    if (kind.pde == PdeKind::Hartree) return ctx;
    if (lam.radius <= 0 || lam.radius != std::floor(lam.radius)) return ctx;
    if (lam.radius >= 9.0e15) return ctx;
    BigInt R = static_cast<long long>(lam.radius);
    const auto modes = lam.modes_ordered();
    for (const auto& m : modes) {
        BigInt n2 = norm2_big(m);
        if (kind.kappa() == 2) {
            ctx.w.emplace_back(n2);
        } else {
            BigInt r;
            if (!is_perfect_square(n2, &r)) return ctx;
            ctx.w.emplace_back(r);
        }
    }
    BigInt R2k = R * R;
    if (kind.kappa() == 2) R2k *= R2k;
    ctx.g_inv = BigRat(16 * R2k);
    ctx.ok = true;
    return ctx;
}

// C_{n m n m} of (3.7)
double action_coupling(Mode n, Mode m, const EquationKind& kind) {
    if (kind.pde == PdeKind::Hartree) return kind.V(n - m);
    double nn = std::sqrt(static_cast<double>(n.norm2()));
    double mm = std::sqrt(static_cast<double>(m.norm2()));
    double p = (kind.kappa() == 1) ? nn * mm : nn * nn * mm * mm;
    return 1.0 / (16.0 * p);
}

double effective_radius(const LambdaSet& lam) {
    if (lam.radius > 0) return lam.radius;
    double s = 0;
    auto modes = lam.modes_ordered();
    for (const auto& m : modes) s += static_cast<double>(m.norm2());
    return std::sqrt(s / static_cast<double>(modes.size()));
}

BigRat abs_rat(const BigRat& q) { return q < 0 ? BigRat(-q) : q; }

}  // namespace

GaugeParams gauge_params(const LambdaSet& lam, const EquationKind& kind) {
    GaugeParams gp{};
    if (kind.pde == PdeKind::Hartree) {
        gp.g = 1.0;
        gp.eps_effective = kind.eps;
        if (!(gp.eps_effective > 0.0))
            throw DegenerateScaling("Hartree eps must be positive");
        return gp;
    }
    const double R = effective_radius(lam);
    gp.g = 1.0 / (16.0 * std::pow(R, 2.0 * kind.kappa()));

    auto ctx = make_exact_ctx(lam, kind);
    const auto modes = lam.modes_ordered();
    const size_t M = modes.size();
    if (ctx.ok) {
        BigRat emax = 0;
        for (size_t i = 0; i < M; ++i)
            for (size_t j = 0; j < M; ++j) {
                BigRat ratio = ctx.g_inv / (BigRat(16) * ctx.w[i] * ctx.w[j]);
                BigRat e = (i == j) ? BigRat(1, 2) - ratio / 2 : BigRat(1) - ratio;
                if (abs_rat(e) > emax) emax = abs_rat(e);
            }
        gp.eps_effective = static_cast<double>(emax);
    } else {
        double emax = 0.0;
        for (size_t i = 0; i < M; ++i)
            for (size_t j = 0; j < M; ++j) {
                double e = (i == j)
                               ? 0.5 - action_coupling(modes[i], modes[i], kind) / (2.0 * gp.g)
                               : 1.0 - action_coupling(modes[i], modes[j], kind) / gp.g;
                emax = std::max(emax, std::abs(e));
            }
        gp.eps_effective = emax;
    }
    if (gp.eps_effective == 0.0)
        throw DegenerateScaling("eps_effective vanished: fully degenerate coupling matrix");
    return gp;
}

ReducedCoeffs reduced_coeffs(const LambdaSet& lam, const EquationKind& kind) {
    const auto gp = gauge_params(lam, kind);
    const auto modes = lam.modes_ordered();
    const int M = static_cast<int>(modes.size());
    const int N = lam.N();

    ReducedCoeffs rc;
    rc.epsilon = gp.eps_effective;
    rc.g = gp.g;
    rc.kappa = kind.kappa();
    rc.A = Eigen::MatrixXd(M, M);

    auto ctx = make_exact_ctx(lam, kind);
    std::vector<BigRat> Eexact;
    if (ctx.ok) {
        Eexact.resize(static_cast<size_t>(M) * M);
        BigRat emax = 0;
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) {
                BigRat ratio = ctx.g_inv / (BigRat(16) * ctx.w[i] * ctx.w[j]);
                BigRat e = (i == j) ? BigRat(1, 2) - ratio / 2 : BigRat(1) - ratio;
                Eexact[i * M + j] = e;
                if (abs_rat(e) > emax) emax = abs_rat(e);
            }
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                rc.A(i, j) = static_cast<double>(Eexact[i * M + j] / emax);
    } else {
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) {
                double e = (i == j)
                               ? 0.5 - action_coupling(modes[i], modes[i], kind) / (2.0 * gp.g)
                               : 1.0 - action_coupling(modes[i], modes[j], kind) / gp.g;
                rc.A(i, j) = e / gp.eps_effective;
            }
    }

    for (const auto& t : lam.tuples) {
        double s;
        if (kind.pde == PdeKind::Hartree)
            s = 0.25 * (kind.V(t.n[0] - t.n[1]) + kind.V(t.n[0] - t.n[3]) +
                        kind.V(t.n[2] - t.n[1]) + kind.V(t.n[2] - t.n[3]));
        else {
            // C/g = R^{2k}/(prod_i |n_i|^{k/2}); the ratio stays O(1) where C
            // and g separately underflow toward 1e-60 scales
            double p = 1.0;
            for (const auto& n : t.n)
                p *= std::pow(static_cast<double>(n.norm2()), kind.kappa() / 4.0);
            rc.C_h.push_back(std::pow(effective_radius(lam), 2.0 * kind.kappa()) / p);
            continue;
        }
        rc.C_h.push_back(s / gp.g);
    }

    rc.a.resize(N);
    rc.b.resize(N);
    rc.c.resize(N);
    rc.d = Eigen::MatrixXd::Zero(N, N);

    if (ctx.ok) {
        auto Eb = [&](int i, int j, int n, int m) -> const BigRat& {
            return Eexact[(4 * i + n - 1) * M + (4 * j + m - 1)];
        };
        BigRat eps = 0;
        for (const auto& e : Eexact)
            if (abs_rat(e) > eps) eps = abs_rat(e);
        for (int j = 0; j < N; ++j) {
            BigRat s = 0;
            for (int r = 0; r < N; ++r)
                s += Eb(j, r, 1, 2) + Eb(j, r, 1, 4) + Eb(j, r, 2, 3) + Eb(j, r, 3, 4) -
                     (Eb(j, r, 2, 2) + Eb(r, j, 2, 4) + Eb(r, j, 4, 2) + Eb(j, r, 4, 4));
            rc.a[j] = static_cast<double>(-s / eps);
            BigRat bb = Eb(j, j, 1, 1) + 2 * Eb(j, j, 1, 3) + Eb(j, j, 3, 3) -
                        2 * (Eb(j, j, 1, 2) + Eb(j, j, 1, 4) + Eb(j, j, 2, 3) + Eb(j, j, 3, 4)) +
                        Eb(j, j, 2, 2) + 2 * Eb(j, j, 2, 4) + Eb(j, j, 4, 4);
            rc.b[j] = static_cast<double>(-bb / eps);
        }
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) {
                BigRat s = Eb(i, j, 1, 1) + Eb(i, j, 1, 3) + Eb(i, j, 3, 1) + Eb(i, j, 3, 3) +
                           Eb(i, j, 2, 2) + Eb(i, j, 2, 4) + Eb(i, j, 4, 2) + Eb(i, j, 4, 4) -
                           (Eb(i, j, 1, 2) + Eb(i, j, 2, 1) + Eb(i, j, 1, 4) + Eb(i, j, 4, 1) +
                            Eb(i, j, 2, 3) + Eb(i, j, 3, 2) + Eb(i, j, 3, 4) + Eb(i, j, 4, 3));
                rc.d(i, j) = static_cast<double>(-s / eps);
                rc.d(j, i) = rc.d(i, j);
            }
    } else {
        auto Ab = [&rc](int i, int j, int n, int m) { return rc.A(4 * i + n - 1, 4 * j + m - 1); };
        for (int j = 0; j < N; ++j) {
            double s = 0;
            for (int r = 0; r < N; ++r)
                s += Ab(j, r, 1, 2) + Ab(j, r, 1, 4) + Ab(j, r, 2, 3) + Ab(j, r, 3, 4) -
                     (Ab(j, r, 2, 2) + Ab(r, j, 2, 4) + Ab(r, j, 4, 2) + Ab(j, r, 4, 4));
            rc.a[j] = -s;
            rc.b[j] = -(Ab(j, j, 1, 1) + 2 * Ab(j, j, 1, 3) + Ab(j, j, 3, 3) -
                        2 * (Ab(j, j, 1, 2) + Ab(j, j, 1, 4) + Ab(j, j, 2, 3) + Ab(j, j, 3, 4)) +
                        Ab(j, j, 2, 2) + 2 * Ab(j, j, 2, 4) + Ab(j, j, 4, 4));
        }
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) {
                double s = Ab(i, j, 1, 1) + Ab(i, j, 1, 3) + Ab(i, j, 3, 1) + Ab(i, j, 3, 3) +
                           Ab(i, j, 2, 2) + Ab(i, j, 2, 4) + Ab(i, j, 4, 2) + Ab(i, j, 4, 4) -
                           (Ab(i, j, 1, 2) + Ab(i, j, 2, 1) + Ab(i, j, 1, 4) + Ab(i, j, 4, 1) +
                            Ab(i, j, 2, 3) + Ab(i, j, 3, 2) + Ab(i, j, 3, 4) + Ab(i, j, 4, 3));
                rc.d(i, j) = -s;
                rc.d(j, i) = rc.d(i, j);
            }
    }
    for (int j = 0; j < N; ++j) rc.c[j] = (2.0 / gp.eps_effective) * (rc.C_h[j] - 1.0);
    return rc;
}

TupleFactors d12_closed_form(const LambdaSet& lam, const EquationKind& kind,
                             const ReducedCoeffs& coeffs) {
    if (kind.pde == PdeKind::Hartree)
        throw KindMismatch("closed form requires Wave or Beam");
    const int N = lam.N();
    TupleFactors tf;
    tf.paper_prefactor = 3.0 / (32.0 * coeffs.g);

    auto ctx = make_exact_ctx(lam, kind);
    if (ctx.ok) {
        for (int r = 0; r < N; ++r) {
            const BigRat &w0 = ctx.w[4 * r], &w1 = ctx.w[4 * r + 1], &w2 = ctx.w[4 * r + 2],
                         &w3 = ctx.w[4 * r + 3];
            BigRat p = (w0 - w1) * (w0 * w1 - w2 * w3) / (w0 * w1 * w2 * w3);
            tf.P.push_back(static_cast<double>(p));
        }
    } else {
        const double kap = kind.kappa();
        for (const auto& t : lam.tuples) {
            std::array<long double, 4> w;
            for (int i = 0; i < 4; ++i)
                w[i] = powl(static_cast<long double>(t.n[i].norm2()), kap / 2.0L);
            long double p = (w[0] - w[1]) * (w[0] * w[1] - w[2] * w[3]) / (w[0] * w[1] * w[2] * w[3]);
            tf.P.push_back(static_cast<double>(p));
        }
    }
    // stored normalization: d_ij = P_i P_j / (16 g eps)
    tf.prefactor = 1.0 / (16.0 * coeffs.g * coeffs.epsilon);
    tf.d_closed = Eigen::MatrixXd::Zero(N, N);
    if (ctx.ok) {
        // carry the product exactly: 1/(16 g) = R^{2 kappa}
        BigRat pref = ctx.g_inv / 16;
        BigRat eps = 0;
        const auto modes = lam.modes_ordered();
        const int M = static_cast<int>(modes.size());
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) {
                BigRat ratio = ctx.g_inv / (BigRat(16) * ctx.w[i] * ctx.w[j]);
                BigRat e = (i == j) ? BigRat(1, 2) - ratio / 2 : BigRat(1) - ratio;
                if (abs_rat(e) > eps) eps = abs_rat(e);
            }
        std::vector<BigRat> Pq;
        for (int r = 0; r < N; ++r) {
            const BigRat &w0 = ctx.w[4 * r], &w1 = ctx.w[4 * r + 1], &w2 = ctx.w[4 * r + 2],
                         &w3 = ctx.w[4 * r + 3];
            Pq.push_back((w0 - w1) * (w0 * w1 - w2 * w3) / (w0 * w1 * w2 * w3));
        }
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                if (i != j) tf.d_closed(i, j) = static_cast<double>(pref * Pq[i] * Pq[j] / eps);
    } else {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                if (i != j) tf.d_closed(i, j) = tf.prefactor * tf.P[i] * tf.P[j];
    }
    return tf;
}

Eigen::MatrixXd assemble_D(const Eigen::MatrixXd& d) {
    const int N = static_cast<int>(d.rows());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N - 1, N - 1);
    for (int k = 0; k < N - 1; ++k) {
        double s = 0;
        for (int j = 0; j < N; ++j)
            if (j != k) s += d(k, j);
        D(k, k) = s;
        for (int l = 0; l < N - 1; ++l)
            if (l != k) D(k, l) = -d(k, l);
    }
    return D;
}

double det_D_direct(const Eigen::MatrixXd& d) { return assemble_D(d).determinant(); }

double det_D_factored(const std::vector<double>& P, double prefactor) {
    const int N = static_cast<int>(P.size());
    double prod = 1, sum = 0;
    for (double p : P) {
        prod *= p;
        sum += p;
    }
    return std::pow(prefactor, N - 1) * prod * std::pow(sum, N - 2);
}

DetDResult det_D(const ReducedCoeffs& coeffs, const LambdaSet* lam, const EquationKind* kind) {
    DetDResult r{det_D_direct(coeffs.d), std::nullopt};
    if (lam && kind && kind->pde != PdeKind::Hartree) {
        auto tf = d12_closed_form(*lam, *kind, coeffs);
        r.factored = det_D_factored(tf.P, tf.prefactor);
    }
    return r;
}

NondegeneracyReport nondegeneracy_report(const ReducedCoeffs& coeffs) {
    NondegeneracyReport rep;
    const int N = coeffs.N();
    double dscale = N >= 2 ? coeffs.d.cwiseAbs().maxCoeff() : 0.0;
    rep.d12 = N >= 2 ? coeffs.d(0, 1) : 0.0;
    rep.cond_5_9 = std::abs(rep.d12) > 1e-12 * std::max(1.0, dscale);
    if (N >= 2) {
        rep.residual_5_10 = coeffs.ab(0) + coeffs.ab(1) + coeffs.d(0, 1);
        double sc = std::abs(coeffs.ab(0)) + std::abs(coeffs.ab(1)) + std::abs(coeffs.d(0, 1));
        rep.cond_5_10 = std::abs(rep.residual_5_10) < 1e-9 * std::max(1.0, sc);
        rep.product_5_11 = coeffs.ab(0) * coeffs.ab(1);
        rep.cond_5_11 = rep.product_5_11 > 0.0;
        rep.detD = det_D_direct(coeffs.d);
        rep.cond_5_41 = std::abs(rep.detD) > 1e-12 * std::pow(std::max(1.0, dscale), N - 1);
    }
    return rep;
}

Mode tune_gamma_energy_matching(const LambdaSet& lam, EquationKind& kind) {
    if (kind.pde != PdeKind::Hartree)
        throw KindMismatch("gamma tuning applies to Hartree only");
    auto residual = [&]() {
        auto rc = reduced_coeffs(lam, kind);
        return rc.ab(0) + rc.ab(1) + rc.d(0, 1);
    };
    std::vector<Mode> candidates;
    const auto modes = lam.modes_ordered();
    for (size_t i = 0; i < modes.size(); ++i)
        for (size_t j = 0; j < modes.size(); ++j)
            if (i / 4 != j / 4) candidates.push_back(GammaMap::canon(modes[i] - modes[j]));
    for (const auto& cls : candidates) {
        double save = kind.gamma.at(cls);
        double r0 = residual();
        kind.gamma.set(cls, save + 1.0);
        double r1 = residual();
        double slope = r1 - r0;
        if (std::abs(slope) < 1e-12) {
            kind.gamma.set(cls, save);
            continue;
        }
        kind.gamma.set(cls, save - r0 / slope);
        return cls;
    }
    throw DegenerateScaling("no gamma class with nonzero influence on the residual");
}

ordered_json ReducedCoeffs::to_json() const {
    ordered_json j;
    j["epsilon"] = epsilon;
    j["g"] = g;
    j["kappa"] = kappa;
    auto mat = [](const Eigen::MatrixXd& m) {
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < m.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (int jj = 0; jj < m.cols(); ++jj) row.push_back(m(i, jj));
            rows.push_back(row);
        }
        return rows;
    };
    j["A"] = mat(A);
    j["C_h"] = C_h;
    j["a"] = a;
    j["b"] = b;
    j["c"] = c;
    j["d"] = mat(d);
    return j;
}

ordered_json NondegeneracyReport::to_json() const {
    ordered_json j;
    j["d12"] = d12;
    j["cond_5_9_d12_nonzero"] = cond_5_9;
    j["residual_5_10"] = residual_5_10;
    j["cond_5_10_energy_matching"] = cond_5_10;
    j["product_5_11"] = product_5_11;
    j["cond_5_11_same_sign"] = cond_5_11;
    j["detD"] = detD;
    j["cond_5_41_detD_nonzero"] = cond_5_41;
    return j;
}

}  // namespace reslab
