#include "reslab/lambda.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "reslab/exactq.hpp"

namespace reslab {

std::string to_string(PdeKind k) {
    switch (k) {
        case PdeKind::Wave: return "wave";
        case PdeKind::Beam: return "beam";
        case PdeKind::Hartree: return "hartree";
    }
    return "?";
}

PdeKind pde_kind_from_string(const std::string& s) {
    if (s == "wave") return PdeKind::Wave;
    if (s == "beam") return PdeKind::Beam;
    if (s == "hartree") return PdeKind::Hartree;
    throw std::invalid_argument("unknown equation kind: " + s);
}

double quartic_coefficient(const std::array<Mode, 4>& j, const std::array<int, 4>& sigma,
                           const EquationKind& kind) {
    Mode p{0, 0};
    for (int i = 0; i < 4; ++i) p = p + sigma[i] * j[i];
    if (!p.is_zero()) return 0.0;
    if (kind.pde == PdeKind::Hartree) {
        const bool pmpm = sigma[0] == +1 && sigma[1] == -1 && sigma[2] == +1 && sigma[3] == -1;
        const bool mpmp = sigma[0] == -1 && sigma[1] == +1 && sigma[2] == -1 && sigma[3] == +1;
        if (!pmpm && !mpmp) return 0.0;
        return kind.V(j[0] - j[1]);
    }
    double prod = 1.0;
    for (int i = 0; i < 4; ++i) {
        double n2 = static_cast<double>(j[i].norm2());
        if (n2 == 0.0) return 0.0;  // 0 mode excluded from the odd lattice
        prod *= (kind.kappa() == 1) ? std::sqrt(std::sqrt(n2)) : std::sqrt(n2);
    }
    return 1.0 / (16.0 * prod);
}

namespace {

bool freq_zero(const std::array<Mode, 4>& n, const std::array<int, 4>& sig, PdeKind kind) {
    if (kind == PdeKind::Wave) {
        std::vector<std::pair<int, BigInt>> terms;
        for (int i = 0; i < 4; ++i) terms.emplace_back(sig[i], norm2_big(n[i]));
        return sqrt_sum_is_zero(terms);
    }
    __int128 s = 0;
    for (int i = 0; i < 4; ++i) s += sig[i] * n[i].norm2();
    return s == 0;
}

bool momentum_zero(const std::array<Mode, 4>& n, const std::array<int, 4>& sig) {
    Mode p{0, 0};
    for (int i = 0; i < 4; ++i) p = p + sig[i] * n[i];
    return p.is_zero();
}

std::string tuple_str(const std::array<Mode, 4>& n, const std::array<int, 4>& sig) {
    std::string s;
    for (int i = 0; i < 4; ++i) {
        s += (sig[i] > 0 ? "+" : "-");
        s += n[i].str();
    }
    return s;
}

}  // namespace

bool is_resonant(const ResonantTuple& t, PdeKind kind) {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (t.n[i] == t.n[j]) return false;
    static constexpr std::array<int, 4> alt{+1, -1, +1, -1};
    return momentum_zero(t.n, alt) && freq_zero(t.n, alt, kind);
}

std::vector<Mode> LambdaSet::modes_ordered() const {
    std::vector<Mode> v;
    v.reserve(4 * tuples.size());
    for (const auto& t : tuples)
        for (const auto& m : t.n) v.push_back(m);
    return v;
}

std::vector<Mode> LambdaSet::generation1() const {
    std::vector<Mode> v;
    for (const auto& t : tuples) {
        v.push_back(t.n[0]);
        v.push_back(t.n[2]);
    }
    return v;
}

std::vector<Mode> LambdaSet::generation2() const {
    std::vector<Mode> v;
    for (const auto& t : tuples) {
        v.push_back(t.n[1]);
        v.push_back(t.n[3]);
    }
    return v;
}

namespace {

// canonical key of a nuclear family modulo trivial permutations
struct FamilyKey {
    Mode p1, p2, c1, c2;
    bool operator<(const FamilyKey& o) const {
        if (!(p1 == o.p1)) return p1 < o.p1;
        if (!(p2 == o.p2)) return p2 < o.p2;
        if (!(c1 == o.c1)) return c1 < o.c1;
        return c2 < o.c2;
    }
    bool operator==(const FamilyKey& o) const {
        return p1 == o.p1 && p2 == o.p2 && c1 == o.c1 && c2 == o.c2;
    }
};

FamilyKey family_key(const ResonantTuple& t) {
    FamilyKey k{t.n[0], t.n[2], t.n[1], t.n[3]};
    if (k.p2 < k.p1) std::swap(k.p1, k.p2);
    if (k.c2 < k.c1) std::swap(k.c1, k.c2);
    return k;
}

}  // namespace

ValidationReport validate_lambda(const LambdaSet& lam) {
    ValidationReport rep;
    auto add = [&rep](std::string name, bool ok, std::string witness = "") {
        rep.checks.push_back({std::move(name), ok, std::move(witness)});
    };
    const auto modes = lam.modes_ordered();
    const int M = static_cast<int>(modes.size());
    const PdeKind kind = lam.kind;

    {  // mode distinctness across the whole set
        std::set<Mode> seen;
        std::string bad;
        for (const auto& m : modes)
            if (!seen.insert(m).second && bad.empty()) bad = m.str();
        add("modes_distinct", bad.empty(), bad);
    }

    if (kind != PdeKind::Hartree) {
        std::string bad;
        for (const auto& m : modes)
            if (!m.in_odd_lattice() || m.is_zero()) {
                bad = m.str();
                break;
            }
        add("lattice_membership", bad.empty(), bad);
    }

    {  // every stored tuple is a resonance of the alternating family
        std::string bad;
        for (const auto& t : lam.tuples)
            if (!is_resonant(t, kind)) {
                bad = tuple_str(t.n, {+1, -1, +1, -1});
                break;
            }
        add("tuples_resonant", bad.empty(), bad);
    }

    const auto gen1 = lam.generation1();
    const auto gen2 = lam.generation2();
    std::set<Mode> lambda_all(modes.begin(), modes.end());
    std::set<Mode> set1(gen1.begin(), gen1.end());
    std::set<Mode> set2(gen2.begin(), gen2.end());

    {  // 1L: closure under nuclear-family (alternating-tuple) completion: three
        // modes of Lambda placed in any slots of an alternating tuple force the
        // fourth slot inside Lambda or outside the lattice
        std::string bad;
        static constexpr std::array<int, 4> alt{+1, -1, +1, -1};
        for (int free = 0; free < 4 && bad.empty(); ++free) {
            for (int i1 = 0; i1 < M && bad.empty(); ++i1)
                for (int i2 = 0; i2 < M && bad.empty(); ++i2)
                    for (int i3 = 0; i3 < M && bad.empty(); ++i3) {
                        std::array<Mode, 4> cand;
                        std::array<int, 3> known{i1, i2, i3};
                        int ki = 0;
                        Mode s{0, 0};
                        for (int slot = 0; slot < 4; ++slot)
                            if (slot != free) {
                                cand[slot] = modes[known[ki++]];
                                s = s + alt[slot] * cand[slot];
                            }
                        cand[free] = -alt[free] * s;
                        if (kind != PdeKind::Hartree &&
                            (!cand[free].in_odd_lattice() || cand[free].is_zero()))
                            continue;
                        if (lambda_all.count(cand[free])) continue;
                        if (freq_zero(cand, alt, kind))
                            bad = tuple_str(cand, alt) + " completes outside Lambda";
                    }
        }
        add("completeness_1L", bad.empty(), bad);
    }

    {  // 2L/3L: each parent/child belongs to exactly one family mod trivial perms
        std::set<FamilyKey> found;
        static constexpr std::array<int, 4> alt{+1, -1, +1, -1};
        const int P = static_cast<int>(gen1.size());
        for (int a = 0; a < P; ++a)
            for (int b = 0; b < P; ++b)
                for (int c = 0; c < P; ++c)
                    for (int d = 0; d < P; ++d) {
                        ResonantTuple t{{gen1[a], gen2[b], gen1[c], gen2[d]}};
                        if (!is_resonant(t, kind)) continue;
                        found.insert(family_key(t));
                    }
        std::set<FamilyKey> stored;
        for (const auto& t : lam.tuples) stored.insert(family_key(t));
        std::map<Mode, int> parent_count, child_count;
        for (const auto& f : found) {
            parent_count[f.p1]++;
            parent_count[f.p2]++;
            child_count[f.c1]++;
            child_count[f.c2]++;
        }
        std::string bad2, bad3;
        for (const auto& m : set1) {
            int c = parent_count.count(m) ? parent_count[m] : 0;
            if (c != 1 && bad2.empty())
                bad2 = m.str() + " belongs to " + std::to_string(c) + " families";
        }
        for (const auto& m : set2) {
            int c = child_count.count(m) ? child_count[m] : 0;
            if (c != 1 && bad3.empty())
                bad3 = m.str() + " belongs to " + std::to_string(c) + " families";
        }
        if (bad2.empty() && found != stored) bad2 = "family set differs from stored tuples";
        add("spouse_children_2L", bad2.empty(), bad2);
        add("sibling_parents_3L", bad3.empty(), bad3);
    }

    {  // 4L: no non-trivial resonance of the full family A beyond the stored ones
        std::set<std::vector<std::pair<Mode, int>>> family_sigmul;
        for (const auto& t : lam.tuples) {
            for (int gs : {+1, -1}) {
                std::vector<std::pair<Mode, int>> key;
                for (int i = 0; i < 4; ++i) key.emplace_back(t.n[i], gs * (i % 2 == 0 ? +1 : -1));
                std::sort(key.begin(), key.end(), [](const auto& a, const auto& b) {
                    if (!(a.first == b.first)) return a.first < b.first;
                    return a.second < b.second;
                });
                family_sigmul.insert(key);
            }
        }
        std::string bad;
        std::array<int, 4> sig;
        std::array<Mode, 4> cand;
        for (int i1 = 0; i1 < M && bad.empty(); ++i1)
            for (int i2 = i1; i2 < M && bad.empty(); ++i2)
                for (int i3 = i2; i3 < M && bad.empty(); ++i3)
                    for (int i4 = i3; i4 < M && bad.empty(); ++i4) {
                        cand = {modes[i1], modes[i2], modes[i3], modes[i4]};
                        for (int smask = 0; smask < 8 && bad.empty(); ++smask) {
                            sig[0] = +1;
                            for (int b = 1; b < 4; ++b) sig[b] = (smask >> (b - 1)) & 1 ? -1 : +1;
                            if (!momentum_zero(cand, sig)) continue;
                            if (!freq_zero(cand, sig, kind)) continue;
                            // trivial if the signed multiset cancels pairwise
                            std::map<Mode, int> net;
                            for (int i = 0; i < 4; ++i) net[cand[i]] += sig[i];
                            bool trivial = true;
                            for (const auto& [m, c] : net)
                                if (c != 0) trivial = false;
                            if (trivial) continue;
                            std::vector<std::pair<Mode, int>> key;
                            for (int i = 0; i < 4; ++i) key.emplace_back(cand[i], sig[i]);
                            std::sort(key.begin(), key.end(), [](const auto& a, const auto& b) {
                                if (!(a.first == b.first)) return a.first < b.first;
                                return a.second < b.second;
                            });
                            if (family_sigmul.count(key)) continue;
                            bad = tuple_str(cand, sig);
                        }
                    }
        add("faithfulness_4L", bad.empty(), bad);
    }

    if (kind != PdeKind::Hartree) {
        {  // (4.6): all 4N norms pairwise distinct
            std::string bad;
            for (int i = 0; i < M && bad.empty(); ++i)
                for (int j = i + 1; j < M; ++j)
                    if (modes[i].norm2() == modes[j].norm2()) {
                        bad = modes[i].str() + " vs " + modes[j].str();
                        break;
                    }
            add("norms_distinct_4_6", bad.empty(), bad);
        }
        {  // (4.7): annulus containment
            std::string bad;
            if (lam.radius <= 0.0) {
                bad = "radius not set";
            } else {
                for (const auto& m : modes) {
                    double r = std::sqrt(static_cast<double>(m.norm2()));
                    if (std::abs(r - lam.radius) >= lam.radius * lam.epsilon_target) {
                        bad = m.str() + " |n|=" + std::to_string(r);
                        break;
                    }
                }
            }
            add("annulus_4_7", bad.empty(), bad);
        }
    }

    if (kind == PdeKind::Hartree) {  // (4.5) modulo the same-family forced coincidences
        std::map<Mode, std::vector<std::pair<int, int>>> diff_map;  // difference -> (i,j) flat indices
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                if (i != j) diff_map[modes[i] - modes[j]].push_back({i, j});
        auto same_family_forced = [&](std::pair<int, int> a, std::pair<int, int> b) {
            if (a.first / 4 != a.second / 4 || b.first / 4 != b.second / 4) return false;
            if (a.first / 4 != b.first / 4) return false;
            int a1 = a.first % 4, a2 = a.second % 4, b1 = b.first % 4, b2 = b.second % 4;
            // momentum n1 - n2 + n3 - n4 = 0 forces (in slot indices 0..3):
            // n0-n1 = n3-n2, n0-n3 = n1-n2 and their reverses
            auto match = [&](int x1, int x2, int y1, int y2) {
                return (a1 == x1 && a2 == x2 && b1 == y1 && b2 == y2) ||
                       (a1 == y1 && a2 == y2 && b1 == x1 && b2 == x2);
            };
            return match(0, 1, 3, 2) || match(1, 0, 2, 3) || match(0, 3, 1, 2) || match(3, 0, 2, 1);
        };
        std::string bad;
        for (const auto& [d, pairs] : diff_map) {
            if (pairs.size() < 2) continue;
            for (size_t a = 0; a < pairs.size() && bad.empty(); ++a)
                for (size_t b = a + 1; b < pairs.size() && bad.empty(); ++b)
                    if (!same_family_forced(pairs[a], pairs[b]))
                        bad = modes[pairs[a].first].str() + "-" + modes[pairs[a].second].str() +
                              " = " + modes[pairs[b].first].str() + "-" +
                              modes[pairs[b].second].str();
            if (!bad.empty()) break;
        }
        add("differences_4_5", bad.empty(), bad);
    }

    return rep;
}

ordered_json ValidationReport::to_json() const {
    ordered_json j;
    j["all_ok"] = all_ok();
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks) {
        ordered_json e;
        e["condition"] = c.name;
        e["ok"] = c.ok;
        if (!c.ok) e["witness"] = c.witness;
        arr.push_back(e);
    }
    j["checks"] = arr;
    return j;
}

ordered_json lambda_to_json(const LambdaSet& lam) {
    ordered_json j;
    j["kind"] = to_string(lam.kind);
    ordered_json tuples = ordered_json::array();
    for (const auto& t : lam.tuples) {
        ordered_json tt = ordered_json::array();
        for (const auto& m : t.n) tt.push_back({m.x, m.y});
        tuples.push_back(tt);
    }
    j["tuples"] = tuples;
    j["epsilon_target"] = lam.epsilon_target;
    j["radius"] = lam.radius;
    return j;
}

LambdaSet lambda_from_json(const ordered_json& j) {
    LambdaSet lam;
    lam.kind = pde_kind_from_string(j.at("kind").get<std::string>());
    for (const auto& tt : j.at("tuples")) {
        if (tt.size() != 4) throw std::invalid_argument("tuple must have 4 modes");
        ResonantTuple t;
        for (int i = 0; i < 4; ++i)
            t.n[i] = Mode{tt[i][0].get<long long>(), tt[i][1].get<long long>()};
        lam.tuples.push_back(t);
    }
    lam.epsilon_target = j.value("epsilon_target", 0.0);
    lam.radius = j.value("radius", 0.0);
    return lam;
}

}  // namespace reslab
