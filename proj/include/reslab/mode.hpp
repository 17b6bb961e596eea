#pragma once
#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>

namespace reslab {

// Lattice mode (j1, j2) in Z^2. For the Wave/Beam phase space the lattice is
// Z^2_odd = { j1 odd, j2 even }.
struct Mode {
    long long x = 0;
    long long y = 0;

    friend Mode operator+(Mode a, Mode b) { return {a.x + b.x, a.y + b.y}; }
    friend Mode operator-(Mode a, Mode b) { return {a.x - b.x, a.y - b.y}; }
    friend Mode operator-(Mode a) { return {-a.x, -a.y}; }
    friend Mode operator*(long long c, Mode a) { return {c * a.x, c * a.y}; }
    friend bool operator==(Mode a, Mode b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Mode a, Mode b) { return !(a == b); }
    friend bool operator<(Mode a, Mode b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }

    __int128 norm2() const {
        return static_cast<__int128>(x) * x + static_cast<__int128>(y) * y;
    }
    bool is_zero() const { return x == 0 && y == 0; }
    bool in_odd_lattice() const { return (std::llabs(x) % 2 == 1) && (y % 2 == 0); }

    std::string str() const { return "(" + std::to_string(x) + "," + std::to_string(y) + ")"; }
};

struct ModeHash {
    std::size_t operator()(const Mode& m) const {
        std::uint64_t h = static_cast<std::uint64_t>(m.x) * 0x9e3779b97f4a7c15ull;
        h ^= static_cast<std::uint64_t>(m.y) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace reslab
