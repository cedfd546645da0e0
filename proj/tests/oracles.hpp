#pragma once

// Test-only brute-force oracles. These are kept deliberately naive and
// independent of the library's search code: they enumerate raw injections /
// permutations / colorings and check definitions directly.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "fraisse/structure.hpp"

namespace oracle {

using fraisse::FinStructure;
using fraisse::Tuple;

// Checks preserve-and-reflect directly from the definition.
inline bool raw_is_embedding(const std::vector<int>& map, const FinStructure& a,
                             const FinStructure& b) {
    std::set<int> used(map.begin(), map.end());
    if (used.size() != map.size()) return false;
    for (std::size_t s = 0; s < a.relations.size(); ++s) {
        // preserve
        for (const auto& t : a.relations[s]) {
            Tuple img;
            for (int v : t) img.push_back(map[v - 1]);
            if (!std::binary_search(b.relations[s].begin(), b.relations[s].end(), img))
                return false;
        }
        // reflect
        for (const auto& t : b.relations[s]) {
            bool inside = true;
            Tuple pre;
            for (int v : t) {
                auto it = std::find(map.begin(), map.end(), v);
                if (it == map.end()) { inside = false; break; }
                pre.push_back(static_cast<int>(it - map.begin()) + 1);
            }
            if (!inside) continue;
            if (!std::binary_search(a.relations[s].begin(), a.relations[s].end(), pre))
                return false;
        }
    }
    return true;
}

// Every injective map {1..|A|} -> {1..|B|} that is an embedding, by full
// enumeration of injections.
inline std::vector<std::vector<int>> naive_embeddings(const FinStructure& a,
                                                      const FinStructure& b) {
    std::vector<std::vector<int>> out;
    std::vector<int> map(a.size, 0);
    std::vector<char> used(b.size + 1, 0);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == a.size) {
            if (raw_is_embedding(map, a, b)) out.push_back(map);
            return;
        }
        for (int v = 1; v <= b.size; ++v) {
            if (used[v]) continue;
            used[v] = 1;
            map[i] = v;
            self(self, i + 1);
            used[v] = 0;
        }
    };
    rec(rec, 0);
    return out;
}

inline bool naive_isomorphic(const FinStructure& a, const FinStructure& b) {
    if (a.size != b.size) return false;
    for (const auto& m : naive_embeddings(a, b))
        if (static_cast<int>(m.size()) == b.size) return true;
    return a.size == 0;
}

// Number of isomorphism classes in a list, by pairwise naive comparison.
inline int naive_iso_class_count(const std::vector<FinStructure>& xs) {
    std::vector<FinStructure> reps;
    for (const auto& x : xs) {
        bool fresh = true;
        for (const auto& r : reps)
            if (naive_isomorphic(x, r)) { fresh = false; break; }
        if (fresh) reps.push_back(x);
    }
    return static_cast<int>(reps.size());
}

} // namespace oracle
