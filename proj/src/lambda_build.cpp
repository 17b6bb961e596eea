#include "reslab/lambda_build.hpp"
#include <cstdlib>
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "reslab/exactq.hpp"
#include "reslab/rng.hpp"

namespace reslab {

namespace {

long long to_ll_checked(const BigInt& v) {
    if (v > BigInt(std::numeric_limits<long long>::max() / 2) ||
        v < BigInt(std::numeric_limits<long long>::min() / 2))
        throw BuildGiveUp("scaled coordinate overflows int64");
    return static_cast<long long>(v);
}

Mode scale_to_mode(const QVec& z, const BigInt& mult, Mode shift = {0, 0}) {
    BigRat x = BigRat(mult) * z.x, y = BigRat(mult) * z.y;
    if (boost::multiprecision::denominator(x) != 1 || boost::multiprecision::denominator(y) != 1)
        throw BuildGiveUp("multiplier does not clear denominators");
    return Mode{to_ll_checked(boost::multiprecision::numerator(x)) + shift.x,
                to_ll_checked(boost::multiprecision::numerator(y)) + shift.y};
}

}  // namespace

LambdaSet build_beam_lambda(int N, double eps, std::uint64_t seed, int retry_budget) {
    if (N < 2) throw std::invalid_argument("N >= 2 required");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps in (0,1) required");
    Rng rng(seed ^ 0xbea30000u);

    // power-of-two jitter denominator fine enough for an eps/8 spread
    long long den = 32;
    while (den * eps < 64.0) den *= 2;
    const long long K = std::max<long long>(1, static_cast<long long>(den * eps / 8.0));
    const long long Kt = std::max<long long>(1, static_cast<long long>(den * eps / 4.0));

    for (int attempt = 0; attempt < retry_budget; ++attempt) {
        // shared rational rotation angle ~ 90 degrees: tan(theta/2) = t
        BigRat t = BigRat(den + rng.range(-Kt, Kt), den);
        BigRat one(1), two(2);
        BigRat tt = t * t;
        BigRat rc = (one - tt) / (one + tt);  // cos(theta)
        BigRat rs = two * t / (one + tt);     // sin(theta)

        LambdaSet lam;
        lam.kind = PdeKind::Beam;
        lam.epsilon_target = eps;
        std::vector<std::array<QVec, 4>> rect(N);
        BigInt L = 1;
        auto jit = [&]() { return BigRat(rng.range(-K, K), den); };
        for (int i = 0; i < N; ++i) {
            QVec m{jit(), jit()};
            QVec v{one + jit(), jit()};
            QVec w{rc * v.x - rs * v.y, rs * v.x + rc * v.y};
            rect[i] = {m + v, m + w, m - v, m - w};
            for (const auto& z : rect[i]) {
                L = lcm_den(L, z.x);
                L = lcm_den(L, z.y);
            }
        }
        // scale 2R with R a power-of-two multiple of the denominator lcm,
        // doubled until R*eps is comfortably large
        BigInt R = L;
        while (BigRat(R) * BigRat(eps) <= 10) R *= 2;
        BigInt S = 2 * R;
        try {
            for (int i = 0; i < N; ++i) {
                ResonantTuple tup;
                for (int k = 0; k < 4; ++k) tup.n[k] = scale_to_mode(rect[i][k], S, Mode{1, 0});
                lam.tuples.push_back(tup);
            }
        } catch (const BuildGiveUp&) {
            continue;
        }
        lam.radius = static_cast<double>(S);
        if (validate_lambda(lam).all_ok()) return lam;
    }
    throw BuildGiveUp("build_beam_lambda: retry budget exhausted");
}

namespace {

// parameters (m odd, n even), m,n > 0, with m^2 + n^2 = s
std::vector<std::pair<long long, long long>> odd_even_reps(long long s) {
    std::vector<std::pair<long long, long long>> reps;
    for (long long m = 1; m * m < s; m += 2) {
        long long n2 = s - m * m;
        long long n = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(n2))));
        for (long long nn = std::max<long long>(0, n - 1); nn <= n + 1; ++nn)
            if (nn > 0 && nn % 2 == 0 && nn * nn == n2) reps.push_back({m, nn});
    }
    return reps;
}

}  // namespace

LambdaSet build_wave_lambda(int N, double eps, std::uint64_t seed, int retry_budget) {
    if (N < 2) throw std::invalid_argument("N >= 2 required");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps in (0,1) required");
    Rng rng(seed ^ 0x3a7e0000u);

    // odd s = 1 mod 4 with many (odd, even) representations as sums of two squares
    static const std::vector<long long> s_pool = {1105, 5525, 4225, 27625, 32045, 71825};
    std::vector<long long> usable;
    for (long long s : s_pool)
        if (static_cast<int>(odd_even_reps(s).size()) >= 2 * N + 1) usable.push_back(s);
    if (usable.empty()) throw BuildGiveUp("no parameter circle with enough rational points");

    for (int attempt = 0; attempt < retry_budget; ++attempt) {
        long long s = usable[rng.below(usable.size())];
        auto reps = odd_even_reps(s);
        // ellipse family: a_j = 1 + (u/v)^2, b_j = 1 - (u/v)^2, c_j = 2u/v,
        // with u even, v odd so that a, b are odd/odd and c is even/odd
        long long v = static_cast<long long>(std::ceil(16.0 * N / eps));
        v += rng.range(0, 20) * 2 + (v % 2 == 0 ? 1 : 0);
        std::vector<long long> us(N);
        {
            std::set<long long> chosen;
            for (int j = 0; j < N; ++j) {
                long long u;
                do
                    u = 2 * rng.range(1, 2 * N);
                while (chosen.count(u));
                chosen.insert(u);
                us[j] = u;
            }
        }

        // pick 2N distinct point parameters, with seeded sign flips of n
        std::vector<int> perm(reps.size());
        for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
        for (size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[rng.below(i)]);

        LambdaSet lam;
        lam.kind = PdeKind::Wave;
        lam.epsilon_target = eps;
        BigInt L = 1;
        std::vector<std::array<QVec, 4>> quads(N);
        bool ok = true;
        for (int j = 0; j < N && ok; ++j) {
            BigRat u2v2 = BigRat(us[j] * us[j], v * v);
            BigRat a = BigRat(1) + u2v2, b = BigRat(1) - u2v2, c = BigRat(2 * us[j], v);
            auto point = [&](int pi) {
                auto [mm, nn] = reps[static_cast<size_t>(perm[pi]) % reps.size()];
                long long sgn = rng.below(2) ? 1 : -1;
                BigRat cosw = BigRat(mm * mm - nn * nn, s);
                BigRat sinw = BigRat(2 * mm * nn * sgn, s);
                return QVec{c + a * cosw, b * sinw};
            };
            QVec n1 = point(2 * j), n2 = point(2 * j + 1);
            QVec F{BigRat(2) * c, BigRat(0)};
            QVec n3 = F - n1, n4 = F - n2;
            if (n1 == n2 || n1 == n4 || n1 == n3 || n2 == n3 || n2 == n4 || n3 == n4) {
                ok = false;
                break;
            }
            quads[j] = {n1, n2, n3, n4};
            for (const auto& z : quads[j]) {
                L = lcm_den(L, z.x);
                L = lcm_den(L, z.y);
            }
        }
        if (!ok) continue;
        if (L % 2 == 0) continue;  // odd multiplier required for the parity pattern
        BigInt Q = L;
        while (BigRat(Q) * BigRat(eps) <= 10) Q *= 3;  // stay odd
        try {
            for (int j = 0; j < N; ++j) {
                ResonantTuple tup;
                for (int k = 0; k < 4; ++k) tup.n[k] = scale_to_mode(quads[j][k], Q);
                lam.tuples.push_back(tup);
            }
        } catch (const BuildGiveUp&) {
            continue;
        }
        lam.radius = static_cast<double>(Q);
        auto rep = validate_lambda(lam);
        if (rep.all_ok()) return lam;
        if (std::getenv("RESLAB_DEBUG_BUILD")) {
            fprintf(stderr, "wave attempt %d failed:\n", attempt);
            for (const auto& c : rep.checks)
                if (!c.ok) fprintf(stderr, "  %s: %s\n", c.name.c_str(), c.witness.c_str());
        }
    }
    throw BuildGiveUp("build_wave_lambda: retry budget exhausted");
}

LambdaSet build_hartree_lambda(int N, std::uint64_t seed, int retry_budget) {
    if (N < 2) throw std::invalid_argument("N >= 2 required");
    Rng rng(seed ^ 0x4a27ee00u);
    const long long B = 8 + 3 * N;

    for (int attempt = 0; attempt < retry_budget; ++attempt) {
        LambdaSet lam;
        lam.kind = PdeKind::Hartree;
        bool ok = true;
        for (int i = 0; i < N && ok; ++i) {
            Mode p{rng.range(-B, B), rng.range(-B, B)};
            Mode u{rng.range(-B, B), rng.range(-B, B)};
            if (u.is_zero()) {
                ok = false;
                break;
            }
            long long g = std::__gcd(std::llabs(u.x), std::llabs(u.y));
            Mode perp{-u.y / g, u.x / g};
            long long sgn = rng.below(2) ? 1 : -1;
            Mode w = (sgn * rng.range(1, 3)) * perp;
            if (w == u || w == -u) {
                ok = false;
                break;
            }
            // parents opposite corners, children the other diagonal
            lam.tuples.push_back(ResonantTuple{{p, p + u, p + u + w, p + w}});
        }
        if (!ok) continue;
        if (validate_lambda(lam).all_ok()) return lam;
    }
    throw BuildGiveUp("build_hartree_lambda: retry budget exhausted");
}

}  // namespace reslab
