#pragma once
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "reslab/equation.hpp"
#include "reslab/mode.hpp"

namespace reslab {

using ordered_json = nlohmann::ordered_json;

// Ordered resonant 4-tuple (n1, n2, n3, n4): parents n1, n3 in generation 1,
// children n2, n4 in generation 2.
struct ResonantTuple {
    std::array<Mode, 4> n;
    Mode parent1() const { return n[0]; }
    Mode child1() const { return n[1]; }
    Mode parent2() const { return n[2]; }
    Mode child2() const { return n[3]; }
};

// Momentum + frequency resonance of the alternating-sign family, with the
// four modes pairwise distinct. Exact integer arithmetic for kappa = 2;
// kappa = 1 decided through squarefree-kernel certificates.
bool is_resonant(const ResonantTuple& t, PdeKind kind);

struct LambdaSet {
    PdeKind kind = PdeKind::Beam;
    std::vector<ResonantTuple> tuples;
    double epsilon_target = 0.0;
    double radius = 0.0;

    int N() const { return static_cast<int>(tuples.size()); }
    // modes in the canonical flat order n_{4(h-1)+k}
    std::vector<Mode> modes_ordered() const;
    std::vector<Mode> generation1() const;
    std::vector<Mode> generation2() const;
};

struct ConditionCheck {
    std::string name;
    bool ok = true;
    std::string witness;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;
    bool all_ok() const {
        for (const auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
    const ConditionCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
    ordered_json to_json() const;
};

// Checks 1L-4L, (4.5)/(4.6)/(4.7) as applicable, tuple resonance, lattice
// membership and mode distinctness. Failures carry a witness string.
ValidationReport validate_lambda(const LambdaSet& lam);

ordered_json lambda_to_json(const LambdaSet& lam);
LambdaSet lambda_from_json(const ordered_json& j);

}  // namespace reslab
