#pragma once
#include <stdexcept>

#include "reslab/lambda.hpp"

namespace reslab {

struct BuildGiveUp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultRetryBudget = 10'000;

// Rectangles over Z^2_odd, epsilon/4-close (pre-scaling) to the degenerate
// unit-circle prototype; deterministic in (N, eps, seed).
LambdaSet build_beam_lambda(int N, double eps, std::uint64_t seed,
                            int retry_budget = kDefaultRetryBudget);

// Parallelograms on ellipses with a focus at 0, built from rational
// Pythagorean triples with the odd/odd, even/odd parity pattern, scaled by an
// odd multiplier into Z^2_odd.
LambdaSet build_wave_lambda(int N, double eps, std::uint64_t seed,
                            int retry_budget = kDefaultRetryBudget);

// Integer rectangles in Z^2 satisfying the pairwise-difference condition.
LambdaSet build_hartree_lambda(int N, std::uint64_t seed,
                               int retry_budget = kDefaultRetryBudget);

}  // namespace reslab
