#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "reslab/coeffs.hpp"

namespace reslab {

enum class Chart : std::uint8_t { Angular, Lower, Upper };

inline double wrap_angle(double psi) {
    psi = std::fmod(psi, 2 * M_PI);
    if (psi > M_PI) psi -= 2 * M_PI;
    if (psi <= -M_PI) psi += 2 * M_PI;
    return psi;
}

// State of the reduced Hamiltonian: per block either (psi, K) or a blow-down
// cartesian pair. Lower chart: x = sqrt(2K) cos(psi/2), y = sqrt(2K) sin(psi/2)
// (regularizes K=0); Upper: same with K -> 1-K (regularizes K=1). The
// cartesian charts double-cover the angle, which is immaterial for the flow.
struct ReducedState {
    std::vector<double> q;      // 2 entries per block
    std::vector<Chart> chart;   // per block

    int blocks() const { return static_cast<int>(chart.size()); }

    static ReducedState angular(const std::vector<double>& psi, const std::vector<double>& K);

    double K(int j) const;
    double psi(int j) const;  // wrapped to (-pi, pi]
    void set_block_angular(int j, double psi, double K);
    void to_chart(int j, Chart c);
    ReducedState in_chart(const std::vector<Chart>& charts) const;
    ReducedState all_angular() const;
    ReducedState reversed() const;  // involution (psi, K) -> (-psi, K)
};

// Reduced Hamiltonian with optional delta-modification (-delta K_j^2) and an
// epsilon override decoupled from coeffs.epsilon for parameter sweeps.
struct ReducedModel {
    ReducedCoeffs coeffs;
    double eps = 0.0;
    double delta = 0.0;

    ReducedModel() = default;
    explicit ReducedModel(ReducedCoeffs rc, double eps_override = -1.0, double delta_ = 0.0)
        : coeffs(std::move(rc)), eps(eps_override >= 0 ? eps_override : coeffs.epsilon),
          delta(delta_) {}
    static ReducedModel bare(int N, double eps = 0.0, double delta = 0.0);  // a=b=c=d=0

    int blocks() const { return coeffs.N(); }

    double H(const ReducedState& z) const;
    void grad_block(const ReducedState& z, int j, double coup, double out[2]) const;  // dH/d(q_j)
    void field(const ReducedState& z, std::vector<double>& out) const;
    double coupling(const ReducedState& z, int j) const;  // eps * sum_{i!=j} d_ij K_i
};

struct SaddlePoint {
    int sign = +1;   // +: psi near +2pi/3, -: near -2pi/3
    int level = 0;   // 0: K=0, 1: K=1
    ReducedState location;
    std::vector<double> eigenvalues;  // per block (positive rate in the (psi,K) chart)
    std::vector<double> psi_star;     // per block saddle angle
};

// Saddles on the invariant tori {K=0}, {K=1}; exact for every eps (T_0, T_1
// stay invariant), angles solve (1+2cos psi) + eps(...)=0 per block.
SaddlePoint saddle_point(const ReducedModel& m, int sign, int level);

// Unperturbed heteroclinic gamma_pm (5.7): psi_j = sign*2pi/3,
// K_j = 1/(1+e^{-+sqrt3 tau_j}).
ReducedState heteroclinic_state(int sign, const std::vector<double>& tau);

// delta-modified homoclinic (5.18) component: psi(t) = 2 atan(-sqrt3 tanh(sqrt3 t/2)),
// K(t) = 1/(1 - (delta/3)(1 - 2 cosh(sqrt3 t))).
double homoclinic_psi(double t);
double homoclinic_K(double t, double delta);
double homoclinic_dK(double t, double delta);
ReducedState modified_homoclinic_state(const std::vector<double>& tau, double delta);

}  // namespace reslab
