#include "reslab/melnikov.hpp"

#include <cmath>

#include "reslab/ode.hpp"

namespace reslab {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;

double Kplus(double t) { return 1.0 / (1.0 + std::exp(-kSqrt3 * t)); }

}  // namespace

std::string to_string(MelnikovFamily f) {
    switch (f) {
        case MelnikovFamily::Heteroclinic: return "heteroclinic";
        case MelnikovFamily::DeltaHomoclinic: return "delta_homoclinic";
        case MelnikovFamily::PeriodicOrbit: return "periodic_orbit";
        case MelnikovFamily::ChainVector: return "chain_vector";
    }
    return "?";
}

double kernel_integral(double tau) {
    double x = kSqrt3 * tau;
    if (std::abs(x) < 1e-4)
        return (1.0 + x / 2 + x * x / 12 - x * x * x * x / 720) / kSqrt3;
    return tau / (1.0 - std::exp(-x));
}

double kernel_integral_d1(double tau) {
    double x = kSqrt3 * tau;
    if (std::abs(x) < 1e-4) return 0.5 + x / 6 - x * x * x / 180;
    double em = std::exp(-x);
    double den = 1.0 - em;
    return (1.0 - em * (1.0 + x)) / (den * den);
}

double het_bracket(double tau) {
    double x = kSqrt3 * tau;
    if (std::abs(x) < 1e-4) return -2.0 / 3.0 - x * x / 30.0;
    double sh = std::sinh(x / 2);
    return (2.0 - x / std::tanh(x / 2)) / (sh * sh);
}

double kernel_integral_d2(double tau) { return -kSqrt3 / 4.0 * het_bracket(tau); }

double pair_correlation(double tau) { return kernel_integral(tau) + kernel_integral(-tau); }

double pair_correlation_d1(double tau) {
    return kernel_integral_d1(tau) - kernel_integral_d1(-tau);
}

double pair_correlation_d2(double tau) { return 2.0 * kernel_integral_d2(tau); }

HetPotential het_reduced_potential(double tau0, const ReducedCoeffs& rc) {
    HetPotential p;
    const double ab1 = rc.ab(0), ab2 = rc.ab(1);
    p.value = ab1 * kernel_integral(tau0) + ab2 * kernel_integral(-tau0);
    p.d1 = ab1 * kernel_integral_d1(tau0) - ab2 * kernel_integral_d1(-tau0);
    p.d2 = (ab1 + ab2) * kernel_integral_d2(tau0);
    return p;
}

double heteroclinic_eta_tilde(const ReducedCoeffs& rc) {
    // int K(1-K) dt = 1/sqrt3 along gamma_+ and cos(2pi/3) = -1/2
    return -(rc.b[0] + rc.b[1]) / kSqrt3 - (rc.c[0] + rc.c[1]) / (2.0 * kSqrt3);
}

NTuplePotential n_tuple_potential(const Eigen::VectorXd& tau_tilde, const ReducedCoeffs& rc) {
    const int N = rc.N();
    const int n = N - 1;
    NTuplePotential p;
    p.grad = Eigen::VectorXd::Zero(n);
    p.hessian = Eigen::MatrixXd::Zero(n, n);
    p.value = 0;
    // leading order of the delta -> 0 homoclinic potential: the pair kernel is
    // -tau coth(sqrt3 tau/2) (the correlation is maximal at tau = 0)
    const auto& d = rc.d;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double s = tau_tilde[i] - tau_tilde[j];
            p.value -= d(i, j) * pair_correlation(s);
            double g = -d(i, j) * pair_correlation_d1(s);
            p.grad[i] += g;
            p.grad[j] -= g;
            double hh = -d(i, j) * pair_correlation_d2(s);
            p.hessian(i, i) += hh;
            p.hessian(j, j) += hh;
            p.hessian(i, j) -= hh;
            p.hessian(j, i) -= hh;
        }
        p.value -= d(i, N - 1) * pair_correlation(tau_tilde[i]);
        p.grad[i] -= d(i, N - 1) * pair_correlation_d1(tau_tilde[i]);
        p.hessian(i, i) -= d(i, N - 1) * pair_correlation_d2(tau_tilde[i]);
    }
    p.hessian_origin = -assemble_D(rc.d) / kSqrt3;
    return p;
}

double kernel_integral_quadrature(double tau, const QuadratureSettings& qs) {
    double T = qs.t_cut + std::abs(tau);
    return integrate_segment([tau](double t) { return Kplus(t + tau) * (1.0 - Kplus(t)); }, -T, T,
                             qs.abs_tol);
}

double kernel_integral_quadrature_minus(double tau, const QuadratureSettings& qs) {
    auto Kminus = [](double t) { return 1.0 / (1.0 + std::exp(kSqrt3 * t)); };
    double T = qs.t_cut + std::abs(tau);
    return integrate_segment(
        [&, tau](double t) { return Kminus(t + tau) * (1.0 - Kminus(t)); }, -T, T, qs.abs_tol);
}

double potential_quadrature(MelnikovFamily family, const std::vector<double>& tau,
                            const ReducedCoeffs& rc, double delta, const QuadratureSettings& qs) {
    const int N = rc.N();
    double taumax = 0;
    for (double t : tau) taumax = std::max(taumax, std::abs(t));
    const double T = qs.t_cut + taumax;

    if (family == MelnikovFamily::Heteroclinic) {
        if (N != 2) throw std::invalid_argument("heteroclinic potential requires N = 2");
        double res = rc.ab(0) + rc.ab(1) + rc.d(0, 1);
        double sc = std::abs(rc.ab(0)) + std::abs(rc.ab(1)) + std::abs(rc.d(0, 1));
        if (std::abs(res) > 1e-6 * std::max(1.0, sc))
            throw NonDecaying(
                "energy matching (5.10) violated; heteroclinic integrand does not decay");
        auto H1 = [&](double t) {
            double s = 0;
            for (int j = 0; j < 2; ++j) {
                double K = Kplus(t + tau[j]);
                s += rc.a[j] * K + rc.b[j] * K * K - 0.5 * rc.c[j] * K * (1 - K);
            }
            return s + rc.d(0, 1) * Kplus(t + tau[0]) * Kplus(t + tau[1]);
        };
        return integrate_segment(H1, -T, T, qs.abs_tol);
    }
    if (family == MelnikovFamily::DeltaHomoclinic || family == MelnikovFamily::ChainVector) {
        auto H1 = [&](double t) {
            double s = 0;
            for (int j = 0; j < N; ++j) {
                double K = homoclinic_K(t + tau[j], delta);
                double psi = homoclinic_psi(t + tau[j]);
                s += rc.a[j] * K + (rc.b[j] + 1.0) * K * K +
                     rc.c[j] * K * (1 - K) * std::cos(psi);
            }
            for (int i = 0; i < N; ++i)
                for (int j = i + 1; j < N; ++j)
                    s += rc.d(i, j) * homoclinic_K(t + tau[i], delta) *
                         homoclinic_K(t + tau[j], delta);
            return s;
        };
        return integrate_segment(H1, -T, T, qs.abs_tol);
    }
    throw std::invalid_argument("potential_quadrature: unsupported family");
}

double homoclinic_correlation(double tau, double delta, const QuadratureSettings& qs) {
    double T = qs.t_cut + std::abs(tau);
    return integrate_segment(
        [tau, delta](double s) { return homoclinic_K(s + tau, delta) * homoclinic_K(s, delta); },
        -T, T, qs.abs_tol);
}

double homoclinic_correlation_d1(double tau, double delta, const QuadratureSettings& qs) {
    double T = qs.t_cut + std::abs(tau);
    return integrate_segment(
        [tau, delta](double s) { return homoclinic_dK(s + tau, delta) * homoclinic_K(s, delta); },
        -T, T, qs.abs_tol);
}

double homoclinic_correlation_d2(double tau, double delta, const QuadratureSettings& qs) {
    auto d2K = [delta](double t) {
        double den = 1.0 - delta / 3.0 * (1.0 - 2.0 * std::cosh(kSqrt3 * t));
        double d1 = delta / 3.0 * 2.0 * kSqrt3 * std::sinh(kSqrt3 * t);
        double d2 = delta * 2.0 * std::cosh(kSqrt3 * t);
        return -d2 / (den * den) + 2.0 * d1 * d1 / (den * den * den);
    };
    double T = qs.t_cut + std::abs(tau);
    return integrate_segment(
        [&, tau, delta](double s) { return d2K(s + tau) * homoclinic_K(s, delta); }, -T, T,
        qs.abs_tol);
}

double homoclinic_eta_star(const ReducedCoeffs& rc, double delta, const QuadratureSettings& qs) {
    const int N = rc.N();
    double s = 0;
    for (int j = 0; j < N; ++j)
        s += integrate_segment(
            [&, j](double t) {
                double K = homoclinic_K(t, delta);
                double psi = homoclinic_psi(t);
                return rc.a[j] * K + (rc.b[j] + 1.0) * K * K +
                       rc.c[j] * K * (1 - K) * std::cos(psi);
            },
            -qs.t_cut, qs.t_cut, qs.abs_tol);
    return s;
}

namespace {

// 1-dof delta-modified block ODE with quadrature accumulators:
// psi' = (1-2K)(1+2cos psi) - 2 delta K, K' = 2K(1-K) sin psi.
// `extra(s, psi, K, dacc)` supplies the accumulator derivatives.
template <class Extra>
void run_block(double delta, std::array<double, 2>& z, double s0, double s1, Extra&& extra,
               double* acc, int nacc) {
    if (s0 == s1) return;
    Dopri5::Vec y(2 + nacc, 0.0);
    y[0] = z[0];
    y[1] = z[1];
    for (int i = 0; i < nacc; ++i) y[2 + i] = acc ? acc[i] : 0.0;
    auto rhs = [delta, &extra, nacc](double s, const Dopri5::Vec& y, Dopri5::Vec& dy) {
        double psi = y[0], K = y[1];
        dy[0] = (1 - 2 * K) * (1 + 2 * std::cos(psi)) - 2 * delta * K;
        dy[1] = 2 * K * (1 - K) * std::sin(psi);
        if (nacc) extra(s, psi, K, &dy[2]);
    };
    Dopri5Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    Dopri5 st(rhs, y, s0, opt);
    double dir = s1 > s0 ? 1.0 : -1.0;
    while (dir * (s1 - st.t()) > 1e-14 * std::max(1.0, std::abs(s1))) {
        st.step(dir);
        if (dir * (st.t() - s1) > 0) {
            auto yc = st.dense((s1 - st.t_prev()) / st.h_last());
            st.set_state(yc, s1);
            break;
        }
    }
    z[0] = st.y()[0];
    z[1] = st.y()[1];
    for (int i = 0; i < nacc; ++i) acc[i] = st.y()[2 + i];
}

// K at psi = 0 on the upper branch of the delta-modified block at energy h;
// aligned with the homoclinic top K0(0) = 1/(1+delta/3) as h -> 0
double top_K(double h, double delta) {
    auto H1 = [delta](double K) { return 3.0 * K * (1 - K) - delta * K * K; };
    double lo = 0.5, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (H1(mid) > h)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::array<double, 2> orbit_state_at(double phase, double h, double delta) {
    std::array<double, 2> z{0.0, top_K(h, delta)};
    run_block(delta, z, 0.0, phase, [](double, double, double, double*) {}, nullptr, 0);
    return z;
}

}  // namespace

double melnikov_periodic(double h, double delta, const ReducedCoeffs& rc, double tau0,
                         const QuadratureSettings& qs) {
    const double d12 = rc.d(0, 1);
    const double T = qs.t_cut;
    // integrate in s = tau0 + t: block 1 rides the orbit at phase s;
    // integrand -d12 K2'^(0)(s - tau0) K1(s)
    auto z = orbit_state_at(tau0 - T, h, delta);
    double acc[1] = {0.0};
    run_block(
        delta, z, tau0 - T, tau0 + T,
        [&](double s, double, double K, double* dacc) {
            dacc[0] = -d12 * homoclinic_dK(s - tau0, delta) * K;
        },
        acc, 1);
    return acc[0];
}

double melnikov_periodic_limit(double delta, const ReducedCoeffs& rc, double tau0,
                               const QuadratureSettings& qs) {
    const double d12 = rc.d(0, 1);
    double T = qs.t_cut + std::abs(tau0);
    return integrate_segment(
        [&](double t) { return -d12 * homoclinic_dK(t, delta) * homoclinic_K(tau0 + t, delta); },
        -T, T, qs.abs_tol);
}

Eigen::VectorXd chain_melnikov(int i, int j, const std::vector<double>& tau,
                               const ReducedCoeffs& rc, double h, double delta,
                               const QuadratureSettings& qs) {
    const int N = rc.N();
    const int n = N - 1;
    double taumax = 0;
    for (double t : tau) taumax = std::max(taumax, std::abs(t));
    const double T = qs.t_cut + taumax;

    // half-line integral with block `blk` on the h-orbit and the others on
    // homoclinics; s is the orbit-block phase, t = s - tau[blk]
    auto half = [&](int blk, double t_from, double t_to) {
        auto z = orbit_state_at(tau[blk] + t_from, h, delta);
        std::vector<double> acc(n, 0.0);
        run_block(
            delta, z, tau[blk] + t_from, tau[blk] + t_to,
            [&](double s, double psi, double K, double* dacc) {
                double t = s - tau[blk];
                double Kb[16], dKb[16];
                for (int l = 0; l < N; ++l) {
                    if (l == blk) {
                        Kb[l] = K;
                        dKb[l] = 2 * K * (1 - K) * std::sin(psi);
                    } else {
                        Kb[l] = homoclinic_K(t + tau[l], delta);
                        dKb[l] = homoclinic_dK(t + tau[l], delta);
                    }
                }
                for (int k = 0; k < n; ++k) {
                    double coup = 0;
                    for (int l = 0; l < N; ++l)
                        if (l != k) coup += rc.d(l, k) * Kb[l];
                    dacc[k] = -dKb[k] * coup;
                }
            },
            acc.data(), n);
        Eigen::VectorXd out(n);
        for (int k = 0; k < n; ++k) out[k] = acc[k];
        return out;
    };
    return half(i, -T, 0.0) + half(j, 0.0, T);
}

Eigen::VectorXd chain_melnikov_limit(const std::vector<double>& tau, const ReducedCoeffs& rc,
                                     double delta, const QuadratureSettings& qs) {
    const int N = rc.N();
    const int n = N - 1;
    double taumax = 0;
    for (double t : tau) taumax = std::max(taumax, std::abs(t));
    double T = qs.t_cut + taumax;
    Eigen::VectorXd M(n);
    for (int k = 0; k < n; ++k) {
        M[k] = integrate_segment(
            [&](double t) {
                double coup = 0;
                for (int l = 0; l < N; ++l)
                    if (l != k) coup += rc.d(l, k) * homoclinic_K(t + tau[l], delta);
                return -homoclinic_dK(t + tau[k], delta) * coup;
            },
            -T, T, qs.abs_tol);
    }
    return M;
}

Eigen::VectorXd chain_distance_vector(int i, int j, const std::vector<double>& tau,
                                      const ReducedCoeffs& rc, double h, double delta, double eps,
                                      const QuadratureSettings& qs) {
    const int n = rc.N() - 1;
    if (i == j) throw std::invalid_argument("chain distance requires i != j");
    Eigen::VectorXd d0 = Eigen::VectorXd::Zero(n);
    if (i < n) d0[i] = h;
    if (j < n) d0[j] = -h;
    return d0 + eps * chain_melnikov(i, j, tau, rc, h, delta, qs);
}

namespace {

bool hessian_nondegenerate(const Eigen::MatrixXd& H) {
    double scale = H.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    return std::abs(H.determinant()) > 1e-8 * scale;
}

}  // namespace

MelnikovReport find_critical_point(MelnikovFamily family, const ReducedCoeffs& rc, double delta,
                                   double h, const Eigen::VectorXd& init, double tol) {
    MelnikovReport rep;
    rep.family = family;
    rep.delta = delta;
    rep.h = h;
    rep.epsilon = rc.epsilon;

    auto finish_1d = [&](double tau, double d2, double value, const std::string& method) {
        rep.tau_star = Eigen::VectorXd::Constant(1, tau);
        rep.hessian = Eigen::MatrixXd::Constant(1, 1, d2);
        rep.value_at_star = value;
        rep.method = method;
        rep.nondegenerate = hessian_nondegenerate(rep.hessian);
    };

    if (family == MelnikovFamily::Heteroclinic) {
        if ((rc.ab(0)) * (rc.ab(1)) <= 0)
            throw DegenerateHessian("condition (5.11) fails: no interior critical point");
        double tau = init.size() ? init[0] : 0.0;
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            auto p = het_reduced_potential(tau, rc);
            if (std::abs(p.d1) < tol) {
                ok = true;
                break;
            }
            if (p.d2 == 0) break;
            tau -= std::clamp(p.d1 / p.d2, -2.0, 2.0);
        }
        if (!ok) {  // bisection fallback on the derivative sign change
            double lo = -40, hi = 40;
            double flo = het_reduced_potential(lo, rc).d1;
            double fhi = het_reduced_potential(hi, rc).d1;
            if (flo * fhi > 0) throw NoConvergence("no bracketed critical point");
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = het_reduced_potential(mid, rc).d1;
                if ((flo < 0) == (fm < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            tau = 0.5 * (lo + hi);
        }
        auto p = het_reduced_potential(tau, rc);
        rep.eta_constant = heteroclinic_eta_tilde(rc);
        finish_1d(tau, p.d2, p.value + *rep.eta_constant, "closed_form");
        if (!rep.nondegenerate) throw DegenerateHessian("heteroclinic Hessian below threshold");
        return rep;
    }

    if (family == MelnikovFamily::DeltaHomoclinic) {
        const double d12 = rc.N() >= 2 ? rc.d(0, 1) : 0.0;
        if (d12 == 0.0) throw DegenerateHessian("d12 = 0: integrable case");
        double tau = init.size() ? init[0] : 0.0;
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            double g = d12 * homoclinic_correlation_d1(tau, delta);
            double H = d12 * homoclinic_correlation_d2(tau, delta);
            if (std::abs(g) < tol * std::max(1.0, std::abs(d12))) {
                ok = true;
                break;
            }
            if (H == 0) break;
            tau -= std::clamp(g / H, -2.0, 2.0);
        }
        if (!ok) throw NoConvergence("delta-homoclinic Newton failed");
        double H = d12 * homoclinic_correlation_d2(tau, delta);
        finish_1d(tau, H, d12 * homoclinic_correlation(tau, delta), "quadrature");
        if (!rep.nondegenerate) throw DegenerateHessian("homoclinic Hessian below threshold");
        return rep;
    }

    if (family == MelnikovFamily::ChainVector) {
        const int n = rc.N() - 1;
        Eigen::VectorXd tau = init.size() == n ? init : Eigen::VectorXd::Zero(n);
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            auto p = n_tuple_potential(tau, rc);
            if (p.grad.norm() < tol) {
                ok = true;
                break;
            }
            Eigen::VectorXd step = p.hessian.fullPivLu().solve(p.grad);
            if (!step.allFinite()) break;
            tau -= step.cwiseMax(-2.0).cwiseMin(2.0);
        }
        if (!ok) throw NoConvergence("chain-vector Newton failed");
        auto p = n_tuple_potential(tau, rc);
        rep.tau_star = tau;
        rep.hessian = p.hessian;
        rep.value_at_star = p.value;
        rep.method = "closed_form";
        rep.nondegenerate = hessian_nondegenerate(p.hessian);
        if (!rep.nondegenerate) throw DegenerateHessian("chain Hessian is singular");
        return rep;
    }

    // PeriodicOrbit: zero of M_h^(0) by secant, finite-difference derivative
    {
        double tau = init.size() ? init[0] : 0.0;
        double f0 = melnikov_periodic(h, delta, rc, tau);
        double tau1 = tau + 0.05;
        double f1 = melnikov_periodic(h, delta, rc, tau1);
        bool ok = false;
        double gscale = std::max(1.0, std::abs(rc.d(0, 1)));
        for (int it = 0; it < 60; ++it) {
            if (std::abs(f1) < tol * gscale) {
                ok = true;
                break;
            }
            if (f1 == f0) break;
            double tn = tau1 - f1 * (tau1 - tau) / (f1 - f0);
            tau = tau1;
            f0 = f1;
            tau1 = std::clamp(tn, tau1 - 2.0, tau1 + 2.0);
            f1 = melnikov_periodic(h, delta, rc, tau1);
        }
        if (!ok) throw NoConvergence("periodic-orbit Melnikov zero not found");
        double dh = 1e-4;
        double der = (melnikov_periodic(h, delta, rc, tau1 + dh) -
                      melnikov_periodic(h, delta, rc, tau1 - dh)) /
                     (2 * dh);
        finish_1d(tau1, der, f1, "quadrature");
        if (!rep.nondegenerate) throw DegenerateHessian("periodic Melnikov zero is degenerate");
        return rep;
    }
}

ordered_json MelnikovReport::to_json() const {
    ordered_json j;
    j["family"] = to_string(family);
    std::vector<double> ts(tau_star.data(), tau_star.data() + tau_star.size());
    j["tau_star"] = ts;
    j["value_at_star"] = value_at_star;
    ordered_json hess = ordered_json::array();
    for (int i = 0; i < hessian.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (int k = 0; k < hessian.cols(); ++k) row.push_back(hessian(i, k));
        hess.push_back(row);
    }
    j["hessian"] = hess;
    j["nondegenerate"] = nondegenerate;
    j["method"] = method;
    j["delta"] = delta;
    j["h"] = h;
    j["epsilon"] = epsilon;
    if (eta_constant) j["eta_constant"] = *eta_constant;
    return j;
}

}  // namespace reslab
