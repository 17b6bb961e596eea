#pragma once
#include <Eigen/Dense>
#include <optional>
#include <string>

#include "reslab/coeffs.hpp"
#include "reslab/quad.hpp"
#include "reslab/reduced_model.hpp"

namespace reslab {

struct NonDecaying : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureFail : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateHessian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MelnikovFamily { Heteroclinic, DeltaHomoclinic, PeriodicOrbit, ChainVector };
std::string to_string(MelnikovFamily f);

struct MelnikovReport {
    MelnikovFamily family = MelnikovFamily::DeltaHomoclinic;
    Eigen::VectorXd tau_star;
    double value_at_star = 0.0;
    Eigen::MatrixXd hessian;
    bool nondegenerate = false;
    std::string method;  // "closed_form" or "quadrature"
    double delta = 0, h = 0, epsilon = 0;
    std::optional<double> eta_constant;
    ordered_json to_json() const;
};

// ---- closed forms ----------------------------------------------------------

// tau/(1 - e^{-sqrt3 tau}), the correlation integral (5.15); 1/sqrt3 at 0
double kernel_integral(double tau);
double kernel_integral_d1(double tau);
double kernel_integral_d2(double tau);  // even in tau

// (2 - sqrt3 t coth(sqrt3 t/2)) csch^2(sqrt3 t/2): the Lemma 5.5 bracket;
// limit -2/3 at t = 0
double het_bracket(double tau);

// tau coth(sqrt3 tau/2) and derivatives: the per-pair homoclinic correlation
double pair_correlation(double tau);
double pair_correlation_d1(double tau);
double pair_correlation_d2(double tau);

struct HetPotential {
    double value;  // up to the additive constant eta~
    double d1;
    double d2;
};
// Reduced heteroclinic Melnikov potential:
//   L(tau0) = (a1+b1) k(tau0) + (a2+b2) k(-tau0)
// (the quadrature of H1 along gamma_+ fixes this orientation).
HetPotential het_reduced_potential(double tau0, const ReducedCoeffs& rc);
// eta~ = -(b1+b2)/sqrt3 - (c1+c2)/(2 sqrt3)
double heteroclinic_eta_tilde(const ReducedCoeffs& rc);

struct NTuplePotential {
    double value;  // leading order, additive constant omitted
    Eigen::VectorXd grad;
    Eigen::MatrixXd hessian;          // at tau_tilde
    Eigen::MatrixXd hessian_origin;   // D/sqrt3
};
NTuplePotential n_tuple_potential(const Eigen::VectorXd& tau_tilde, const ReducedCoeffs& rc);

// ---- quadrature oracles ----------------------------------------------------

// oracle for kernel_integral: adaptive quadrature of K+(t+tau)(1-K+(t))
double kernel_integral_quadrature(double tau, const QuadratureSettings& qs = {});
// gamma_- branch: K-(t+tau)(1-K-(t)); kernel + this = pair_correlation
double kernel_integral_quadrature_minus(double tau, const QuadratureSettings& qs = {});

// full potential along the closed-form orbit; Heteroclinic requires the
// energy matching (5.10) within 1e-6 (NonDecaying otherwise); DeltaHomoclinic
// accepts any N and includes the additive constant
double potential_quadrature(MelnikovFamily family, const std::vector<double>& tau,
                            const ReducedCoeffs& rc, double delta,
                            const QuadratureSettings& qs = {});

// delta-homoclinic pair correlation by quadrature: int K0(s+tau) K0(s) ds
double homoclinic_correlation(double tau, double delta, const QuadratureSettings& qs = {});
double homoclinic_correlation_d1(double tau, double delta, const QuadratureSettings& qs = {});
double homoclinic_correlation_d2(double tau, double delta, const QuadratureSettings& qs = {});

// eta* of (5.44)/(5.24)
double homoclinic_eta_star(const ReducedCoeffs& rc, double delta,
                           const QuadratureSettings& qs = {});

// ---- periodic-orbit Melnikov (6.2) and chain distance (Lemma 7.5) ----------

// M_h^(0)(tau0) = -d12 int K2'^(0)(t) K1^(h)(tau0 + t) dt with the block-1
// factor on the delta-modified h-level orbit (quadrature-by-ODE)
double melnikov_periodic(double h, double delta, const ReducedCoeffs& rc, double tau0,
                         const QuadratureSettings& qs = {});
// h -> 0 limit: block-1 factor on the delta-homoclinic
double melnikov_periodic_limit(double delta, const ReducedCoeffs& rc, double tau0,
                               const QuadratureSettings& qs = {});

// d_{0,h} + eps*M_h(tau): N-1 components of (7.11)
Eigen::VectorXd chain_distance_vector(int i, int j, const std::vector<double>& tau,
                                      const ReducedCoeffs& rc, double h, double delta, double eps,
                                      const QuadratureSettings& qs = {});
// the Melnikov part alone
Eigen::VectorXd chain_melnikov(int i, int j, const std::vector<double>& tau,
                               const ReducedCoeffs& rc, double h, double delta,
                               const QuadratureSettings& qs = {});
// homoclinic limit (7.12)
Eigen::VectorXd chain_melnikov_limit(const std::vector<double>& tau, const ReducedCoeffs& rc,
                                     double delta, const QuadratureSettings& qs = {});

// ---- critical points -------------------------------------------------------

MelnikovReport find_critical_point(MelnikovFamily family, const ReducedCoeffs& rc, double delta,
                                   double h, const Eigen::VectorXd& init, double tol = 1e-10);

}  // namespace reslab
