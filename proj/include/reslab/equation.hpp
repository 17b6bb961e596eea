#pragma once
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "reslab/mode.hpp"

namespace reslab {

enum class PdeKind { Wave, Beam, Hartree };

std::string to_string(PdeKind k);
PdeKind pde_kind_from_string(const std::string& s);

// Fourier profile of the Hartree convolution potential, V_j = 1 + eps*gamma_j.
// V real and even is encoded by storing gamma on canonical representatives
// (gamma_{-j} = gamma_j).
struct GammaMap {
    std::map<Mode, double> values;

    static Mode canon(Mode d) {
        if (d.x < 0 || (d.x == 0 && d.y < 0)) return -d;
        return d;
    }
    double at(Mode d) const {
        auto it = values.find(canon(d));
        return it == values.end() ? 0.0 : it->second;
    }
    void set(Mode d, double v) { values[canon(d)] = v; }
    bool empty() const { return values.empty(); }
};

struct EquationKind {
    PdeKind pde = PdeKind::Beam;
    int nonlinearity_sign = +1;  // +1 defocusing, -1 focusing; drops out of the normal form coefficients
    double eps = 0.0;            // Hartree perturbation size in V_j = 1 + eps*gamma_j
    GammaMap gamma;

    int kappa() const { return pde == PdeKind::Wave ? 1 : 2; }
    bool odd_lattice() const { return pde != PdeKind::Hartree; }
    double V(Mode d) const { return 1.0 + eps * gamma.at(d); }

    static EquationKind wave() { return EquationKind{PdeKind::Wave, +1, 0.0, {}}; }
    static EquationKind beam() { return EquationKind{PdeKind::Beam, +1, 0.0, {}}; }
    static EquationKind hartree(double eps, GammaMap g = {}) {
        return EquationKind{PdeKind::Hartree, +1, eps, std::move(g)};
    }
};

// Linear frequency omega(j): |j| for Wave, |j|^2 for Beam and Hartree.
inline double omega(Mode j, PdeKind kind) {
    double n2 = static_cast<double>(j.norm2());
    return kind == PdeKind::Wave ? std::sqrt(n2) : n2;
}

// Quartic coefficient C^{sigma}_{j1 j2 j3 j4} of (the normal ordering of) the
// quartic part of the Hamiltonian. Returns 0 when momentum fails or, for
// Hartree, when the sign pattern is not (+-+-)/(-+-+).
double quartic_coefficient(const std::array<Mode, 4>& j, const std::array<int, 4>& sigma,
                           const EquationKind& kind);

}  // namespace reslab
