#include "reslab/exactq.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace reslab {

BigInt isqrt_floor(const BigInt& n) {
    if (n < 0) throw std::invalid_argument("isqrt of negative");
    if (n == 0) return 0;
    return boost::multiprecision::sqrt(n);
}

bool is_perfect_square(const BigInt& n, BigInt* root) {
    if (n < 0) return false;
    BigInt r = isqrt_floor(n);
    if (r * r == n) {
        if (root) *root = r;
        return true;
    }
    return false;
}

namespace {

using u128 = unsigned __int128;

bool fits_u128(const BigInt& m) { return m >= 0 && m <= BigInt(1) << 120; }

u128 to_u128(const BigInt& m) {
    u128 r = 0;
    BigInt t = m;
    int shift = 0;
    while (t > 0) {
        r |= static_cast<u128>(static_cast<std::uint64_t>(t & 0xffffffffffffffffull)) << shift;
        t >>= 64;
        shift += 64;
    }
    return r;
}

BigInt from_u128(u128 v) {
    BigInt lo = static_cast<std::uint64_t>(v & ~std::uint64_t(0));
    BigInt hi = static_cast<std::uint64_t>(v >> 64);
    return (hi << 64) | lo;
}

std::optional<SquarefreeKernel> kernel_u128(u128 m, unsigned long long budget) {
    u128 kernel = 1, square = 1;
    for (unsigned long long p = 2; p <= budget && static_cast<u128>(p) * p <= m;
         p == 2 ? p = 3 : p += 2) {
        if (m % p != 0) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        for (int i = 0; i < e / 2; ++i) square *= p;
        if (e % 2) kernel *= p;
    }
    if (m == 1) return SquarefreeKernel{from_u128(kernel), from_u128(square)};
    BigInt rem = from_u128(m), r;
    if (is_perfect_square(rem, &r))
        return SquarefreeKernel{from_u128(kernel), from_u128(square) * r};
    if (rem <= BigInt(budget) * budget)
        return SquarefreeKernel{from_u128(kernel) * rem, from_u128(square)};
    return std::nullopt;
}

}  // namespace

std::optional<SquarefreeKernel> squarefree_kernel(BigInt m, long long budget) {
    if (m < 0) return std::nullopt;
    if (m == 0) return SquarefreeKernel{0, 1};
    if (fits_u128(m)) return kernel_u128(to_u128(m), static_cast<unsigned long long>(budget));
    BigInt kernel = 1, square = 1;
    for (long long p = 2; p <= budget && BigInt(p) * p <= m; p == 2 ? p = 3 : p += 2) {
        if (m % p != 0) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        for (int i = 0; i < e / 2; ++i) square *= p;
        if (e % 2) kernel *= p;
    }
    if (m == 1) return SquarefreeKernel{kernel, square};
    BigInt r;
    if (is_perfect_square(m, &r)) return SquarefreeKernel{kernel, square * r};
    if (m <= BigInt(budget) * budget) return SquarefreeKernel{kernel * m, square};
    return std::nullopt;
}

bool sqrt_sum_is_zero(const std::vector<std::pair<int, BigInt>>& terms, bool* exact) {
    if (exact) *exact = true;
    BigInt rational = 0;  // contribution of perfect-square radicands
    std::vector<std::pair<int, BigInt>> irrational;
    for (const auto& [sign, m] : terms) {
        if (m == 0) continue;
        BigInt r;
        if (is_perfect_square(m, &r))
            rational += BigInt(sign) * r;
        else
            irrational.emplace_back(sign, m);
    }
    if (irrational.empty()) return rational == 0;
    // a single irrational radical cannot cancel against rationals
    if (irrational.size() == 1) return false;
    std::map<BigInt, BigInt> by_kernel;
    for (const auto& [sign, m] : irrational) {
        auto sk = squarefree_kernel(m);
        if (!sk) {
            if (exact) *exact = false;
            long double s = static_cast<long double>(rational), scale = 1;
            for (const auto& [sg, mm] : irrational) {
                s += sg * sqrtl(static_cast<long double>(mm));
                scale += sqrtl(static_cast<long double>(mm));
            }
            return fabsl(s) <= 1e-12L * scale;
        }
        by_kernel[sk->kernel] += BigInt(sign) * sk->square;
    }
    if (rational != 0) return false;
    for (const auto& [k, c] : by_kernel)
        if (c != 0) return false;
    return true;
}

BigInt lcm_den(const BigInt& acc, const BigRat& q) {
    BigInt d = boost::multiprecision::denominator(q);
    BigInt g = boost::multiprecision::gcd(acc, d);
    return acc / g * d;
}

}  // namespace reslab
