#pragma once
#include <complex>
#include <unordered_map>
#include <vector>

#include "reslab/coeffs.hpp"
#include "reslab/lambda.hpp"
#include "reslab/reduced_model.hpp"

namespace reslab {

using cplx = std::complex<double>;

struct OffManifold : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroMode : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite mode set: Lambda first (in family order), then the momentum-closure
// partners of the S_{4,<=1} monomials, negation-closed for Wave/Beam.
struct GalerkinSet {
    std::vector<Mode> modes;
    std::unordered_map<Mode, int, ModeHash> index;
    int n_lambda = 0;  // first n_lambda entries are the Lambda modes
    int closure_level = 1;

    int find(Mode m) const {
        auto it = index.find(m);
        return it == index.end() ? -1 : it->second;
    }
    int size() const { return static_cast<int>(modes.size()); }
};

struct FourierState {
    std::vector<cplx> a;  // parallel to gset.modes
    double rho = 0.0;
};

double w_rho_norm(const GalerkinSet& g, const FourierState& s);
double w_rho_norm_diff(const GalerkinSet& g, const FourierState& s1, const FourierState& s2);

// quartic monomial coeff * prod_i a^(c_i)_{m_i} (c: conjugation flags)
struct QuarticMonomial {
    std::array<int, 4> idx;
    std::array<bool, 4> conj;
    cplx coeff;
    double Omega;  // rotating-frame phase rate (0 exactly on resonances)
    int outside;   // number of indices outside Lambda (0 or 1)
};

struct MonomialTable {
    std::vector<QuarticMonomial> mono;
    double H(const std::vector<cplx>& a, double t = 0.0) const;
    // adds -i dH/d(conj a_k) to out[k]
    void add_field(const std::vector<cplx>& a, double t, std::vector<cplx>& out) const;
};

struct GalerkinModel {
    GalerkinSet gset;
    EquationKind kind;
    std::vector<double> omega;   // linear frequencies per mode
    MonomialTable s41;           // all S_{4,<=1} monomials (resonant and not)
    MonomialTable resonant;      // the Omega = 0, all-in-Lambda subfamily

    // full truncated field, lab frame: a' = -i(omega a + dH4/da-bar)
    void full_field(const std::vector<cplx>& a, std::vector<cplx>& out) const;
    double full_H(const std::vector<cplx>& a) const;
    // rotating (gauge) frame: the quadratic part removed, coefficients rotate
    void rotating_field(double t, const std::vector<cplx>& a, std::vector<cplx>& out) const;
    // resonant model field (frame-independent)
    void resonant_field(const std::vector<cplx>& a, std::vector<cplx>& out) const;
    double resonant_H(const std::vector<cplx>& a) const;
    double mass(const std::vector<cplx>& a) const;
};

GalerkinModel make_galerkin_model(const LambdaSet& lam, const EquationKind& kind,
                                  int closure_level = 1);

// ---- gauge-normalized resonant model on V_Lambda (4.12) --------------------

// alpha laid out in the Lambda family order (4 modes per family)
struct GaugeResonantModel {
    ReducedCoeffs coeffs;
    double eps = -1.0;  // override; defaults to coeffs.epsilon
    double epsilon() const { return eps >= 0 ? eps : coeffs.epsilon; }
    // coupling along the one-parameter family: C_h(eps) = 1 + eps c_h / 2
    double coupling(int h) const { return 1.0 + 0.5 * epsilon() * coeffs.c[h]; }
    int N() const { return coeffs.N(); }
    void field(const std::vector<cplx>& alpha, std::vector<cplx>& out) const;
    double H(const std::vector<cplx>& alpha) const;
    double mass(const std::vector<cplx>& alpha) const;
    // (4.16): per family: S13-, S24-, S34+ (the independent triple)
    std::vector<double> first_integrals(const std::vector<cplx>& alpha) const;
};

// ---- symplectic reduction bridge --------------------------------------------

struct ReducedLift {
    ReducedState reduced;  // angular chart
    std::vector<double> S13m, S24m, S34p;             // conserved per family
    std::vector<double> theta1, theta2, psi_tilde;    // cyclic phases per family
    // time bookkeeping: t_pde = -(8/3)(16 g) tau_alpha and s_reduced = 4 tau_alpha
    // (the +4 orientation is pinned numerically by the flow correspondence)
    double alpha_time_per_reduced = 0.25;
    double pde_time_per_alpha = 0.0;  // -(8/3) * 16 g
};

ReducedLift reduce_state(const std::vector<cplx>& alpha, const ReducedCoeffs& coeffs,
                         double tol = 1e-8);
std::vector<cplx> lift_state(const ReducedLift& lift);

// ---- weak normal form generator ---------------------------------------------

struct BnfGenerator {
    MonomialTable table;  // imaginary coefficients -iC/Omega on non-resonant monomials
    double min_divisor = 0.0;
};
BnfGenerator bnf_generator(const GalerkinModel& model);
// time +-1 flow of the generator field (norm warning threshold 0.3)
FourierState bnf_transform(const GalerkinModel& model, const BnfGenerator& gen,
                           const FourierState& state, int direction);

// ---- trajectories and the approximation experiment --------------------------

struct FourierTrajectory {
    std::vector<double> t;
    std::vector<FourierState> states;
    double H_start = 0, H_max_drift = 0;
};

enum class Frame { Lab, Rotating, Resonant };
FourierTrajectory integrate_galerkin(const GalerkinModel& model, Frame frame,
                                     const FourierState& a0, double t0, double t1,
                                     double record_dt, double tol = 1e-10);

// exact reparametrization r^delta(t) = delta r(delta^2 t)
FourierTrajectory rescale_trajectory(const FourierTrajectory& tr, double delta);

struct ApproxReport {
    std::vector<double> deltas;
    std::vector<double> sup_errors;
    double fitted_exponent = 0.0;
    ordered_json to_json() const;
};
// resonant model vs gauge-rotated truncated quartic from the same datum over
// [0, T0/delta^2]; errors in the rho-weighted l1 norm
ApproxReport approximation_experiment(const GalerkinModel& model, const FourierState& r0,
                                      const std::vector<double>& deltas, double T0,
                                      double tol = 1e-10, bool bnf_route = false);

// ---- first-order synthesis ---------------------------------------------------

struct SynthesizedSeries {
    std::vector<double> t_pde;
    std::vector<Mode> modes;
    std::vector<std::vector<cplx>> amplitude;  // [time][mode] complex u-coefficients
    std::vector<std::vector<double>> action;   // [time][mode] |a|^2 of the first order
};
SynthesizedSeries synthesize_solution(const GalerkinModel& model, const FourierTrajectory& tr,
                                      double delta);

}  // namespace reslab
