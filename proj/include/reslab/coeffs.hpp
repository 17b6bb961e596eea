#pragma once
#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "reslab/lambda.hpp"

namespace reslab {

struct DegenerateScaling : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct KindMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coefficients of the reduced N-degree-of-freedom model
//   H = sum K_j(1-K_j)(1+2cos psi_j)
//     + eps [ sum a_j K_j + sum b_j K_j^2 + sum_{i<j} d_ij K_i K_j
//           + sum c_j K_j(1-K_j) cos psi_j ].
struct ReducedCoeffs {
    double epsilon = 0.0;  // epsilon_effective (max-magnitude entry of eps*A)
    double g = 1.0;        // gauge constant
    int kappa = 2;
    Eigen::MatrixXd A;          // 4N x 4N symmetric, normalized by epsilon
    std::vector<double> C_h;    // tuple couplings, 1 + O(eps)
    std::vector<double> a, b, c;
    Eigen::MatrixXd d;          // N x N symmetric, zero diagonal

    int N() const { return static_cast<int>(a.size()); }
    double ab(int j) const { return a[j] + b[j]; }
    ordered_json to_json() const;
};

struct GaugeParams {
    double g;
    double eps_effective;
};

// g = 1 (Hartree) or 1/(16 R^{2 kappa}) (Wave/Beam; normalizes C/g = 1+O(eps));
// eps_effective = given eps (Hartree) or max |1 - C/g| entry per (4.13).
GaugeParams gauge_params(const LambdaSet& lam, const EquationKind& kind);

ReducedCoeffs reduced_coeffs(const LambdaSet& lam, const EquationKind& kind);

// Per-tuple factors P_r with d_ij = prefactor * P_i * P_j (Wave/Beam).
struct TupleFactors {
    std::vector<double> P;
    double prefactor;        //  1/(16 g eps): stored-normalization constant
    double paper_prefactor;  //  3/(32 g): the printed variant, for reports
    Eigen::MatrixXd d_closed;
};
TupleFactors d12_closed_form(const LambdaSet& lam, const EquationKind& kind,
                             const ReducedCoeffs& coeffs);

// det of the (N-1)x(N-1) interaction matrix D: diagonal sum_{j != k} d_kj,
// off-diagonal -d_kl.
Eigen::MatrixXd assemble_D(const Eigen::MatrixXd& d);
double det_D_direct(const Eigen::MatrixXd& d);
double det_D_factored(const std::vector<double>& P, double prefactor);

struct DetDResult {
    double direct;
    std::optional<double> factored;  // Wave/Beam only
};
DetDResult det_D(const ReducedCoeffs& coeffs, const LambdaSet* lam = nullptr,
                 const EquationKind* kind = nullptr);

struct NondegeneracyReport {
    double d12 = 0.0;
    bool cond_5_9 = false;  // d12 != 0
    double residual_5_10 = 0.0;
    bool cond_5_10 = false;  // a1+b1+a2+b2+d12 = 0 within 1e-9
    double product_5_11 = 0.0;
    bool cond_5_11 = false;  // (a1+b1)(a2+b2) > 0
    double detD = 0.0;
    bool cond_5_41 = false;  // det D != 0
    ordered_json to_json() const;
};
NondegeneracyReport nondegeneracy_report(const ReducedCoeffs& coeffs);

// Solves one gamma coefficient so the energy-matching residual
// a1+b1+a2+b2+d12 vanishes (linear in the gamma's). Returns the tuned class.
Mode tune_gamma_energy_matching(const LambdaSet& lam, EquationKind& kind);

}  // namespace reslab
