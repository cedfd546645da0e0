#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "fraisse/structure.hpp"

namespace fraisse {

// An embedding map: map[i-1] is the image of vertex i of the domain. Domain
// and codomain travel separately; every function below states which pair a
// map is read against.
using EmbMap = std::vector<int>;

inline void check_map_shape(const EmbMap& map, const FinStructure& a, const FinStructure& b) {
    if (static_cast<int>(map.size()) != a.size)
        throw InputError("embedding map: length != |A|");
    for (int v : map)
        if (v < 1 || v > b.size)
            throw InputError("embedding map: image vertex " + std::to_string(v) +
                             " outside {1.." + std::to_string(b.size) + "}");
}

inline void check_same_signature(const FinStructure& a, const FinStructure& b) {
    if (!same_signature(a.sig, b.sig)) throw InputError("signature mismatch");
}

// True iff `map` is injective and preserves and reflects every relation.
// Malformed maps (wrong length, out-of-range entries) throw; a false result
// always means a well-formed non-embedding.
inline bool is_embedding(const EmbMap& map, const FinStructure& a, const FinStructure& b) {
    check_same_signature(a, b);
    check_map_shape(map, a, b);
    std::vector<char> used(b.size + 1, 0);
    for (int v : map) {
        if (used[v]) return false;
        used[v] = 1;
    }
    Tuple img;
    for (std::size_t s = 0; s < a.relations.size(); ++s) {
        for (const auto& t : a.relations[s]) {
            img.resize(t.size());
            for (std::size_t j = 0; j < t.size(); ++j) img[j] = map[t[j] - 1];
            if (!b.has_tuple(static_cast<int>(s), img)) return false;
        }
        // reflection: every codomain tuple inside the image must pull back
        for (const auto& t : b.relations[s]) {
            bool inside = true;
            for (int v : t)
                if (v < 1 || v > b.size || !used[v]) { inside = false; break; }
            if (!inside) continue;
            Tuple pre(t.size());
            for (std::size_t j = 0; j < t.size(); ++j) {
                for (int i = 1; i <= a.size; ++i)
                    if (map[i - 1] == t[j]) { pre[j] = i; break; }
            }
            if (!a.has_tuple(static_cast<int>(s), pre)) return false;
        }
    }
    return true;
}

namespace detail {

// Backtracking embedding search A -> B. Per-vertex incidence lists keep the
// incremental consistency check proportional to local degree instead of the
// total tuple count of B.
struct PairSearch {
    const FinStructure& a;
    const FinStructure& b;
    std::vector<std::vector<std::pair<int, const Tuple*>>> a_inc, b_inc;
    std::vector<int> map, inv;

    PairSearch(const FinStructure& a_, const FinStructure& b_)
        : a(a_), b(b_), a_inc(a_.size + 1), b_inc(b_.size + 1),
          map(a_.size, 0), inv(b_.size + 1, 0) {
        for (std::size_t s = 0; s < a.relations.size(); ++s)
            for (const auto& t : a.relations[s]) {
                int prev = 0;
                for (int x : t)
                    if (x != prev) { // avoid double entries for repeated vertices
                        a_inc[x].emplace_back(static_cast<int>(s), &t);
                        prev = x;
                    }
            }
        for (std::size_t s = 0; s < b.relations.size(); ++s)
            for (const auto& t : b.relations[s]) {
                int prev = 0;
                for (int x : t)
                    if (x != prev) {
                        b_inc[x].emplace_back(static_cast<int>(s), &t);
                        prev = x;
                    }
            }
    }

    // Consistency of tuples completed by assigning image of vertex v.
    bool extend_ok(int v) const {
        Tuple buf;
        for (const auto& [s, tp] : a_inc[v]) {
            const Tuple& t = *tp;
            bool assigned = true;
            buf.resize(t.size());
            for (std::size_t j = 0; j < t.size(); ++j) {
                int m = map[t[j] - 1];
                if (m == 0) { assigned = false; break; }
                buf[j] = m;
            }
            if (assigned && !b.has_tuple(s, buf)) return false;
        }
        int img = map[v - 1];
        for (const auto& [s, tp] : b_inc[img]) {
            const Tuple& t = *tp;
            bool inside = true;
            buf.resize(t.size());
            for (std::size_t j = 0; j < t.size(); ++j) {
                int p = inv[t[j]];
                if (p == 0) { inside = false; break; }
                buf[j] = p;
            }
            if (inside && !a.has_tuple(s, buf)) return false;
        }
        return true;
    }

    // DFS over the positions in `order`; yield returns false to stop.
    template <typename Yield>
    bool run(const std::vector<int>& order, std::size_t k, Yield&& yield) {
        if (k == order.size()) return yield(map);
        int v = order[k];
        for (int img = 1; img <= b.size; ++img) {
            if (inv[img] != 0) continue;
            map[v - 1] = img;
            inv[img] = v;
            bool keep_going = true;
            if (extend_ok(v)) keep_going = run(order, k + 1, yield);
            inv[img] = 0;
            if (!keep_going) { map[v - 1] = 0; return false; }
        }
        map[v - 1] = 0;
        return true;
    }

    // Seeds the pins; returns false when the pins themselves are invalid.
    bool pin(const std::vector<std::pair<int, int>>& pins) {
        for (auto [v, img] : pins) {
            if (v < 1 || v > a.size) throw InputError("pinned embedding: pin vertex out of range");
            if (img < 1 || img > b.size || inv[img] != 0 || map[v - 1] != 0) return false;
            map[v - 1] = img;
            inv[img] = v;
            if (!extend_ok(v)) return false;
        }
        return true;
    }
};

template <typename Yield>
void enumerate_pinned(const FinStructure& a, const FinStructure& b,
                      const std::vector<std::pair<int, int>>& pins, Yield&& yield) {
    check_same_signature(a, b);
    PairSearch search(a, b);
    if (!search.pin(pins)) return;
    std::vector<int> order;
    for (int v = 1; v <= a.size; ++v)
        if (search.map[v - 1] == 0) order.push_back(v);
    search.run(order, 0, yield);
}

} // namespace detail

// All embeddings of A into B, ordered lexicographically by image tuple
// (map(1),...,map(|A|)). This order is a stable contract: coloring indices
// refer to positions in this list.
inline std::vector<EmbMap> enumerate_embeddings(const FinStructure& a, const FinStructure& b) {
    check_same_signature(a, b);
    std::vector<EmbMap> out;
    detail::PairSearch search(a, b);
    std::vector<int> order(a.size);
    for (int v = 1; v <= a.size; ++v) order[v - 1] = v;
    search.run(order, 0, [&](const std::vector<int>& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

// First embedding of A into B whose values agree with `pins` (a list of
// (vertex of A, vertex of B) constraints), or nullopt. Used by
// extension-property checks and the flim construction.
inline std::optional<EmbMap> find_embedding_pinned(const FinStructure& a, const FinStructure& b,
                                                   const std::vector<std::pair<int, int>>& pins) {
    std::optional<EmbMap> found;
    detail::enumerate_pinned(a, b, pins, [&](const std::vector<int>& m) {
        found = m;
        return false;
    });
    return found;
}

// All embeddings agreeing with the pins, in DFS order.
inline std::vector<EmbMap> enumerate_embeddings_pinned(
    const FinStructure& a, const FinStructure& b,
    const std::vector<std::pair<int, int>>& pins) {
    std::vector<EmbMap> out;
    detail::enumerate_pinned(a, b, pins, [&](const std::vector<int>& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

// First embedding h of A into B with h∘inner = target, where inner maps
// {1..k} into A. This is the "does g extend along the inclusion" question.
inline std::optional<EmbMap> extend_along(const FinStructure& a, const FinStructure& b,
                                          const EmbMap& inner, const EmbMap& target) {
    if (inner.size() != target.size()) throw InputError("extend_along: map size mismatch");
    std::vector<std::pair<int, int>> pins;
    for (std::size_t i = 0; i < inner.size(); ++i) pins.emplace_back(inner[i], target[i]);
    return find_embedding_pinned(a, b, pins);
}

inline EmbMap compose(const EmbMap& outer, const EmbMap& inner) {
    EmbMap out(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
        int v = inner[i];
        if (v < 1 || v > static_cast<int>(outer.size()))
            throw InputError("compose: inner image outside outer domain");
        out[i] = outer[v - 1];
    }
    return out;
}

inline EmbMap identity_map(int n) {
    EmbMap id(n);
    for (int i = 0; i < n; ++i) id[i] = i + 1;
    return id;
}

inline std::optional<EmbMap> inverse_of(const EmbMap& map, int codomain_size) {
    EmbMap inv(codomain_size, 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (inv[map[i] - 1] != 0) return std::nullopt;
        inv[map[i] - 1] = static_cast<int>(i) + 1;
    }
    for (int v : inv)
        if (v == 0) return std::nullopt;
    return inv;
}

// The automorphism group of A as a list (contains the identity; closed
// under composition and inverse).
inline std::vector<EmbMap> automorphisms(const FinStructure& a) {
    return enumerate_embeddings(a, a);
}

} // namespace fraisse
