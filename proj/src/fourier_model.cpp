#include "reslab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "reslab/exactq.hpp"
#include "reslab/ode.hpp"

namespace reslab {

double w_rho_norm(const GalerkinSet& g, const FourierState& s) {
    double sum = 0;
    for (int i = 0; i < g.size(); ++i)
        sum += std::abs(s.a[i]) *
               std::exp(s.rho * std::sqrt(static_cast<double>(g.modes[i].norm2())));
    return sum;
}

double w_rho_norm_diff(const GalerkinSet& g, const FourierState& s1, const FourierState& s2) {
    double sum = 0;
    for (int i = 0; i < g.size(); ++i)
        sum += std::abs(s1.a[i] - s2.a[i]) *
               std::exp(s1.rho * std::sqrt(static_cast<double>(g.modes[i].norm2())));
    return sum;
}

double MonomialTable::H(const std::vector<cplx>& a, double t) const {
    cplx sum = 0;
    for (const auto& m : mono) {
        cplx p = m.coeff;
        if (m.Omega != 0.0) p *= std::polar(1.0, m.Omega * t);
        for (int i = 0; i < 4; ++i) {
            const cplx& v = a[m.idx[i]];
            p *= m.conj[i] ? std::conj(v) : v;
        }
        sum += p;
    }
    return sum.real();
}

void MonomialTable::add_field(const std::vector<cplx>& a, double t,
                              std::vector<cplx>& out) const {
    for (const auto& m : mono) {
        cplx base = m.coeff;
        if (m.Omega != 0.0) base *= std::polar(1.0, m.Omega * t);
        cplx f[4];
        for (int i = 0; i < 4; ++i) {
            const cplx& v = a[m.idx[i]];
            f[i] = m.conj[i] ? std::conj(v) : v;
        }
        for (int i = 0; i < 4; ++i) {
            if (!m.conj[i]) continue;
            cplx p = base;
            for (int j = 0; j < 4; ++j)
                if (j != i) p *= f[j];
            out[m.idx[i]] += cplx(0, -1) * p;
        }
    }
}

namespace {

struct KeyPart {
    Mode m;
    bool conj;
    bool operator<(const KeyPart& o) const {
        if (!(m == o.m)) return m < o.m;
        return conj < o.conj;
    }
};
using MonoKey = std::array<KeyPart, 4>;

bool omega_sum_zero(const std::array<Mode, 4>& m, const std::array<int, 4>& s, PdeKind kind) {
    if (kind == PdeKind::Wave) {
        std::vector<std::pair<int, BigInt>> terms;
        for (int i = 0; i < 4; ++i) terms.emplace_back(s[i], norm2_big(m[i]));
        return sqrt_sum_is_zero(terms);
    }
    __int128 acc = 0;
    for (int i = 0; i < 4; ++i) acc += s[i] * m[i].norm2();
    return acc == 0;
}

}  // namespace

GalerkinModel make_galerkin_model(const LambdaSet& lam, const EquationKind& kind,
                                  int closure_level) {
    GalerkinModel model;
    model.kind = kind;
    auto& g = model.gset;
    g.closure_level = closure_level;
    for (const auto& m : lam.modes_ordered()) {
        g.index[m] = g.size();
        g.modes.push_back(m);
    }
    g.n_lambda = g.size();

    const auto lmodes = lam.modes_ordered();
    const int L = static_cast<int>(lmodes.size());
    const bool hart = kind.pde == PdeKind::Hartree;

    struct Cand {
        std::array<Mode, 4> m;
        std::array<bool, 4> conj;
        double coeff;
        int outside;
    };
    std::vector<Cand> cands;

    auto lattice_ok = [&](Mode m) {
        return hart ? true : (m.in_odd_lattice() && !m.is_zero());
    };
    auto coeff_of = [&](const std::array<Mode, 4>& m) {
        // ordered (A,B,C,D): (1/2) V_{A-B} from the convolution quartic
        if (hart) return 0.5 * kind.V(m[0] - m[1]);
        double p = 1;
        for (int i = 0; i < 4; ++i)
            p *= std::sqrt(std::sqrt(static_cast<double>(m[i].norm2())));
        if (kind.kappa() == 2) p = p * p;
        return 1.0 / (16.0 * p);
    };

    std::vector<std::array<bool, 4>> patterns;
    if (hart) {
        patterns.push_back({false, true, false, true});
    } else {
        for (int mask = 0; mask < 16; ++mask)
            patterns.push_back({bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8)});
    }

    std::set<Mode> lambda_set(lmodes.begin(), lmodes.end());
    auto in_lambda = [&](Mode m) { return lambda_set.count(m) > 0; };

    for (const auto& cj : patterns) {
        std::array<int, 4> s;
        for (int i = 0; i < 4; ++i) s[i] = cj[i] ? -1 : +1;
        for (int i1 = 0; i1 < L; ++i1)  // all four indices in Lambda
            for (int i2 = 0; i2 < L; ++i2)
                for (int i3 = 0; i3 < L; ++i3) {
                    Mode sum = s[0] * lmodes[i1] + s[1] * lmodes[i2] + s[2] * lmodes[i3];
                    Mode m4 = -s[3] * sum;
                    if (!in_lambda(m4)) continue;
                    Cand c{{lmodes[i1], lmodes[i2], lmodes[i3], m4}, cj, 0.0, 0};
                    c.coeff = coeff_of(c.m);
                    cands.push_back(c);
                }
        if (closure_level >= 1) {  // exactly one index outside, forced by momentum
            for (int pos = 0; pos < 4; ++pos)
                for (int i1 = 0; i1 < L; ++i1)
                    for (int i2 = 0; i2 < L; ++i2)
                        for (int i3 = 0; i3 < L; ++i3) {
                            std::array<Mode, 4> m;
                            std::array<int, 3> tri{i1, i2, i3};
                            int k = 0;
                            Mode sum{0, 0};
                            for (int p = 0; p < 4; ++p)
                                if (p != pos) {
                                    m[p] = lmodes[tri[k++]];
                                    sum = sum + s[p] * m[p];
                                }
                            m[pos] = -s[pos] * sum;
                            if (in_lambda(m[pos]) || !lattice_ok(m[pos])) continue;
                            Cand c{m, cj, 0.0, 1};
                            c.coeff = coeff_of(c.m);
                            cands.push_back(c);
                        }
        }
    }

    std::map<MonoKey, std::pair<double, int>> acc;
    for (const auto& c : cands) {
        MonoKey key;
        for (int i = 0; i < 4; ++i) key[i] = {c.m[i], c.conj[i]};
        std::sort(key.begin(), key.end());
        auto& slot = acc[key];
        slot.first += c.coeff;
        slot.second = c.outside;
    }

    for (const auto& [key, val] : acc)
        for (const auto& kp : key)
            if (g.find(kp.m) < 0) {
                g.index[kp.m] = g.size();
                g.modes.push_back(kp.m);
            }
    if (!hart) {  // negation closure for real-field synthesis
        std::vector<Mode> neg;
        for (const auto& m : g.modes)
            if (g.find(-m) < 0) neg.push_back(-m);
        for (const auto& m : neg)
            if (g.find(m) < 0) {
                g.index[m] = g.size();
                g.modes.push_back(m);
            }
    }

    model.omega.resize(g.size());
    for (int i = 0; i < g.size(); ++i) model.omega[i] = omega(g.modes[i], kind.pde);

    for (const auto& [key, val] : acc) {
        QuarticMonomial qm;
        std::array<Mode, 4> mm;
        std::array<int, 4> ss;
        for (int i = 0; i < 4; ++i) {
            mm[i] = key[i].m;
            qm.idx[i] = g.find(key[i].m);
            qm.conj[i] = key[i].conj;
            ss[i] = key[i].conj ? -1 : +1;
        }
        qm.coeff = val.first;
        qm.outside = val.second;
        if (omega_sum_zero(mm, ss, kind.pde)) {
            qm.Omega = 0.0;
        } else {
            double om = 0;
            for (int i = 0; i < 4; ++i) om += ss[i] * omega(mm[i], kind.pde);
            qm.Omega = om;
        }
        model.s41.mono.push_back(qm);
        if (qm.outside == 0 && qm.Omega == 0.0) model.resonant.mono.push_back(qm);
    }
    return model;
}

void GalerkinModel::full_field(const std::vector<cplx>& a, std::vector<cplx>& out) const {
    out.assign(a.size(), cplx(0, 0));
    for (size_t k = 0; k < a.size(); ++k) out[k] = cplx(0, -1) * omega[k] * a[k];
    s41.add_field(a, 0.0, out);
}

double GalerkinModel::full_H(const std::vector<cplx>& a) const {
    double s = 0;
    for (size_t k = 0; k < a.size(); ++k) s += omega[k] * std::norm(a[k]);
    return s + s41.H(a, 0.0);
}

void GalerkinModel::rotating_field(double t, const std::vector<cplx>& a,
                                   std::vector<cplx>& out) const {
    out.assign(a.size(), cplx(0, 0));
    s41.add_field(a, t, out);
}

void GalerkinModel::resonant_field(const std::vector<cplx>& a, std::vector<cplx>& out) const {
    out.assign(a.size(), cplx(0, 0));
    resonant.add_field(a, 0.0, out);
}

double GalerkinModel::resonant_H(const std::vector<cplx>& a) const { return resonant.H(a, 0.0); }

double GalerkinModel::mass(const std::vector<cplx>& a) const {
    double s = 0;
    for (const auto& v : a) s += std::norm(v);
    return s;
}

void GaugeResonantModel::field(const std::vector<cplx>& alpha, std::vector<cplx>& out) const {
    const int M = static_cast<int>(alpha.size());
    out.assign(M, cplx(0, 0));
    std::vector<double> I(M);
    for (int k = 0; k < M; ++k) I[k] = std::norm(alpha[k]);
    const double eps = epsilon();
    for (int k = 0; k < M; ++k) {
        double asum = 0;
        for (int r = 0; r < M; ++r) asum += coeffs.A(k, r) * I[r];
        cplx grad = (2.0 * I[k] + 4.0 * eps * asum) * alpha[k];
        int h = k / 4, slot = k % 4;
        const cplx &a1 = alpha[4 * h], &a2 = alpha[4 * h + 1], &a3 = alpha[4 * h + 2],
                   &a4 = alpha[4 * h + 3];
        cplx partner;
        switch (slot) {
            case 0: partner = a2 * std::conj(a3) * a4; break;
            case 1: partner = a1 * a3 * std::conj(a4); break;
            case 2: partner = std::conj(a1) * a2 * a4; break;
            default: partner = a1 * std::conj(a2) * a3; break;
        }
        grad -= 4.0 * coupling(h) * partner;
        out[k] = cplx(0, -1) * grad;
    }
}

double GaugeResonantModel::H(const std::vector<cplx>& alpha) const {
    const int M = static_cast<int>(alpha.size());
    std::vector<double> I(M);
    for (int k = 0; k < M; ++k) I[k] = std::norm(alpha[k]);
    double s = 0;
    for (int k = 0; k < M; ++k) s += I[k] * I[k];
    double quad = 0;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) quad += coeffs.A(i, j) * I[i] * I[j];
    s += 2.0 * epsilon() * quad;
    for (int h = 0; h < N(); ++h) {
        cplx z = alpha[4 * h] * std::conj(alpha[4 * h + 1]) * alpha[4 * h + 2] *
                 std::conj(alpha[4 * h + 3]);
        s -= 8.0 * coupling(h) * z.real();
    }
    return s;
}

double GaugeResonantModel::mass(const std::vector<cplx>& alpha) const {
    double s = 0;
    for (const auto& v : alpha) s += std::norm(v);
    return s;
}

std::vector<double> GaugeResonantModel::first_integrals(const std::vector<cplx>& alpha) const {
    std::vector<double> out;
    for (int h = 0; h < N(); ++h) {
        double I1 = std::norm(alpha[4 * h]), I2 = std::norm(alpha[4 * h + 1]),
               I3 = std::norm(alpha[4 * h + 2]), I4 = std::norm(alpha[4 * h + 3]);
        out.push_back(I1 - I3);
        out.push_back(I2 - I4);
        out.push_back(I3 + I4);
    }
    return out;
}

ReducedLift reduce_state(const std::vector<cplx>& alpha, const ReducedCoeffs& coeffs,
                         double tol) {
    const int Nf = coeffs.N();
    if (static_cast<int>(alpha.size()) != 4 * Nf)
        throw std::invalid_argument("alpha size mismatch");
    ReducedLift lift;
    lift.pde_time_per_alpha = -(8.0 / 3.0) * coeffs.g;
    std::vector<double> psi(Nf), K(Nf);
    for (int h = 0; h < Nf; ++h) {
        double I[4], th[4];
        for (int s = 0; s < 4; ++s) {
            const cplx& v = alpha[4 * h + s];
            if (std::abs(v) == 0.0)
                throw ZeroMode("zero amplitude at family " + std::to_string(h));
            I[s] = std::norm(v);
            th[s] = std::arg(v);
        }
        double r1 = I[0] - I[2], r2 = I[1] - I[3], r3 = I[2] + I[3] - 1.0;
        if (std::abs(r1) > tol || std::abs(r2) > tol || std::abs(r3) > tol)
            throw OffManifold("S residuals (" + std::to_string(r1) + ", " + std::to_string(r2) +
                              ", " + std::to_string(r3) + ") at family " + std::to_string(h));
        lift.S13m.push_back(r1);
        lift.S24m.push_back(r2);
        lift.S34p.push_back(I[2] + I[3]);
        lift.theta1.push_back(th[0]);
        lift.theta2.push_back(th[1]);
        lift.psi_tilde.push_back(th[1] + th[3]);
        psi[h] = wrap_angle(th[0] - th[1] + th[2] - th[3]);
        K[h] = I[2];
    }
    lift.reduced = ReducedState::angular(psi, K);
    return lift;
}

std::vector<cplx> lift_state(const ReducedLift& lift) {
    const int Nf = lift.reduced.blocks();
    std::vector<cplx> alpha(4 * Nf);
    for (int h = 0; h < Nf; ++h) {
        double K = lift.reduced.K(h), psi = lift.reduced.psi(h);
        double I3 = K, I1 = K + lift.S13m[h];
        double I4 = lift.S34p[h] - K, I2 = I4 + lift.S24m[h];
        double th1 = lift.theta1[h], th2 = lift.theta2[h];
        double th3 = psi + lift.psi_tilde[h] - th1;
        double th4 = lift.psi_tilde[h] - th2;
        alpha[4 * h + 0] = std::polar(std::sqrt(std::max(0.0, I1)), th1);
        alpha[4 * h + 1] = std::polar(std::sqrt(std::max(0.0, I2)), th2);
        alpha[4 * h + 2] = std::polar(std::sqrt(std::max(0.0, I3)), th3);
        alpha[4 * h + 3] = std::polar(std::sqrt(std::max(0.0, I4)), th4);
    }
    return alpha;
}

BnfGenerator bnf_generator(const GalerkinModel& model) {
    BnfGenerator gen;
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& m : model.s41.mono) {
        if (m.Omega == 0.0) continue;  // resonant monomials get coefficient 0
        QuarticMonomial f = m;
        f.coeff = m.coeff * cplx(0, -1) / m.Omega;
        gen.table.mono.push_back(f);
        dmin = std::min(dmin, std::abs(m.Omega));
    }
    gen.min_divisor = dmin;
    return gen;
}

namespace {

void integrate_complex(
    const std::function<void(double, const std::vector<cplx>&, std::vector<cplx>&)>& field,
    std::vector<cplx>& a, double t0, double t1, double tol,
    const std::function<void(double, const std::vector<cplx>&)>& observer, double record_dt) {
    const size_t n = a.size();
    Dopri5::Vec y(2 * n);
    for (size_t i = 0; i < n; ++i) {
        y[2 * i] = a[i].real();
        y[2 * i + 1] = a[i].imag();
    }
    std::vector<cplx> ac(n), dc(n);
    auto rhs = [&](double t, const Dopri5::Vec& yy, Dopri5::Vec& dy) {
        for (size_t i = 0; i < n; ++i) ac[i] = cplx(yy[2 * i], yy[2 * i + 1]);
        field(t, ac, dc);
        for (size_t i = 0; i < n; ++i) {
            dy[2 * i] = dc[i].real();
            dy[2 * i + 1] = dc[i].imag();
        }
    };
    Dopri5Options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-2;
    Dopri5 st(rhs, y, t0, opt);
    double dir = t1 >= t0 ? 1.0 : -1.0;
    double next_rec = t0 + dir * record_dt;
    if (observer) observer(t0, a);
    while (dir * (t1 - st.t()) > 1e-14 * std::max(1.0, std::abs(t1))) {
        st.step(dir);
        double ta = st.t_prev(), h = st.h_last();
        if (dir * (st.t() - t1) > 0) {
            auto yc = st.dense((t1 - ta) / h);
            st.set_state(yc, t1);
        }
        if (observer && record_dt > 0) {
            while (dir * (st.t() - next_rec) >= 0) {
                auto ys = st.dense((next_rec - ta) / h);
                std::vector<cplx> snap(n);
                for (size_t i = 0; i < n; ++i) snap[i] = cplx(ys[2 * i], ys[2 * i + 1]);
                observer(next_rec, snap);
                next_rec += dir * record_dt;
            }
        }
    }
    for (size_t i = 0; i < n; ++i) a[i] = cplx(st.y()[2 * i], st.y()[2 * i + 1]);
}

}  // namespace

FourierState bnf_transform(const GalerkinModel& model, const BnfGenerator& gen,
                           const FourierState& state, int direction) {
    FourierState out = state;
    auto field = [&](double, const std::vector<cplx>& a, std::vector<cplx>& da) {
        da.assign(a.size(), cplx(0, 0));
        gen.table.add_field(a, 0.0, da);
    };
    integrate_complex(field, out.a, 0.0, direction >= 0 ? 1.0 : -1.0, 1e-12, nullptr, 0.0);
    return out;
}

FourierTrajectory integrate_galerkin(const GalerkinModel& model, Frame frame,
                                     const FourierState& a0, double t0, double t1,
                                     double record_dt, double tol) {
    FourierTrajectory tr;
    std::vector<cplx> a = a0.a;
    auto field = [&](double t, const std::vector<cplx>& aa, std::vector<cplx>& da) {
        switch (frame) {
            case Frame::Lab: model.full_field(aa, da); break;
            case Frame::Rotating: model.rotating_field(t, aa, da); break;
            case Frame::Resonant: model.resonant_field(aa, da); break;
        }
    };
    tr.H_start = frame == Frame::Lab ? model.full_H(a) : model.resonant_H(a);
    auto obs = [&](double t, const std::vector<cplx>& snap) {
        tr.t.push_back(t);
        FourierState s;
        s.a = snap;
        s.rho = a0.rho;
        tr.states.push_back(std::move(s));
        if (frame != Frame::Rotating) {
            double Hn = frame == Frame::Lab ? model.full_H(snap) : model.resonant_H(snap);
            tr.H_max_drift = std::max(tr.H_max_drift, std::abs(Hn - tr.H_start));
        }
    };
    integrate_complex(field, a, t0, t1, tol, obs, record_dt > 0 ? record_dt : (t1 - t0));
    if (tr.t.empty() || tr.t.back() != t1) {
        tr.t.push_back(t1);
        FourierState s;
        s.a = a;
        s.rho = a0.rho;
        tr.states.push_back(std::move(s));
    }
    return tr;
}

FourierTrajectory rescale_trajectory(const FourierTrajectory& tr, double delta) {
    FourierTrajectory out;
    out.H_start = tr.H_start;
    out.H_max_drift = tr.H_max_drift;
    for (size_t i = 0; i < tr.t.size(); ++i) {
        out.t.push_back(tr.t[i] / (delta * delta));
        FourierState s = tr.states[i];
        for (auto& v : s.a) v *= delta;
        out.states.push_back(std::move(s));
    }
    return out;
}

ApproxReport approximation_experiment(const GalerkinModel& model, const FourierState& r0,
                                      const std::vector<double>& deltas, double T0, double tol,
                                      bool bnf_route) {
    ApproxReport rep;
    BnfGenerator gen;
    if (bnf_route) gen = bnf_generator(model);
    for (double delta : deltas) {
        FourierState a0 = r0;
        for (auto& v : a0.a) v *= delta;
        const double Tend = T0 / (delta * delta);
        const double dt = Tend / 200.0;
        auto trA = integrate_galerkin(model, Frame::Resonant, a0, 0.0, Tend, dt, tol);
        FourierTrajectory trB;
        if (!bnf_route) {
            trB = integrate_galerkin(model, Frame::Rotating, a0, 0.0, Tend, dt, tol);
        } else {
            FourierState b0 = bnf_transform(model, gen, a0, +1);
            trB = integrate_galerkin(model, Frame::Lab, b0, 0.0, Tend, dt, tol);
            for (size_t i = 0; i < trB.t.size(); ++i) {
                FourierState s = bnf_transform(model, gen, trB.states[i], -1);
                for (int k = 0; k < model.gset.size(); ++k)
                    s.a[k] *= std::polar(1.0, -model.omega[k] * trB.t[i]);
                trB.states[i] = std::move(s);
            }
        }
        double sup = 0;
        size_t n = std::min(trA.states.size(), trB.states.size());
        for (size_t i = 0; i < n; ++i)
            sup = std::max(sup, w_rho_norm_diff(model.gset, trA.states[i], trB.states[i]));
        rep.deltas.push_back(delta);
        rep.sup_errors.push_back(sup);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(rep.deltas.size());
    for (int i = 0; i < n; ++i) {
        double x = std::log(rep.deltas[i]), y = std::log(std::max(1e-300, rep.sup_errors[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

ordered_json ApproxReport::to_json() const {
    ordered_json j;
    j["deltas"] = deltas;
    j["sup_errors"] = sup_errors;
    j["fitted_exponent"] = fitted_exponent;
    return j;
}

SynthesizedSeries synthesize_solution(const GalerkinModel& model, const FourierTrajectory& tr,
                                      double delta) {
    SynthesizedSeries out;
    const bool hart = model.kind.pde == PdeKind::Hartree;
    const double kap = model.kind.kappa();
    out.modes.assign(model.gset.modes.begin(), model.gset.modes.begin() + model.gset.n_lambda);
    for (size_t i = 0; i < tr.t.size(); ++i) {
        double t_pde = tr.t[i] / (delta * delta);
        out.t_pde.push_back(t_pde);
        std::vector<cplx> amps;
        std::vector<double> acts;
        for (int k = 0; k < model.gset.n_lambda; ++k) {
            const cplx& a = tr.states[i].a[k];
            double weight =
                hart ? delta
                     : delta / std::sqrt(2.0) /
                           std::pow(static_cast<double>(model.gset.modes[k].norm2()), kap / 4.0);
            // phase rotations (3.15)/(4.9) restore the lab-frame phase and do
            // not change the modulus
            cplx u = weight * a * std::polar(1.0, model.omega[k] * t_pde);
            amps.push_back(u);
            acts.push_back(std::norm(a));
        }
        out.amplitude.push_back(std::move(amps));
        out.action.push_back(std::move(acts));
    }
    return out;
}

}  // namespace reslab
