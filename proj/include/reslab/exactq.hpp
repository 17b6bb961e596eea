#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <utility>
#include <vector>

#include "reslab/mode.hpp"

namespace reslab {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

BigInt isqrt_floor(const BigInt& n);
bool is_perfect_square(const BigInt& n, BigInt* root = nullptr);

// m = kernel * square^2 with kernel squarefree. Trial division up to `budget`;
// returns nullopt if a cofactor > budget^2 remains undecided.
struct SquarefreeKernel {
    BigInt kernel;
    BigInt square;
};
std::optional<SquarefreeKernel> squarefree_kernel(BigInt m, long long budget = 2'000'000);

// Exactly decide sum_i sign_i * sqrt(m_i) == 0 for nonnegative integers m_i.
// Uses linear independence of square roots of distinct squarefree integers.
// `exact` is set false (and the numeric fallback value is used by callers)
// only when a kernel factorization exceeds its budget.
bool sqrt_sum_is_zero(const std::vector<std::pair<int, BigInt>>& terms, bool* exact = nullptr);

inline BigInt norm2_big(Mode m) {
    return BigInt(m.x) * m.x + BigInt(m.y) * m.y;
}

// Rational 2-vector for pre-scaling Lambda construction.
struct QVec {
    BigRat x, y;
    friend QVec operator+(const QVec& a, const QVec& b) { return {a.x + b.x, a.y + b.y}; }
    friend QVec operator-(const QVec& a, const QVec& b) { return {a.x - b.x, a.y - b.y}; }
    friend QVec operator-(const QVec& a) { return {-a.x, -a.y}; }
    friend QVec operator*(const BigRat& c, const QVec& a) { return {c * a.x, c * a.y}; }
    friend bool operator==(const QVec& a, const QVec& b) { return a.x == b.x && a.y == b.y; }
    BigRat norm2() const { return x * x + y * y; }
};

BigInt lcm_den(const BigInt& acc, const BigRat& q);

}  // namespace reslab
