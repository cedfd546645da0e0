#pragma once

#include <map>
#include <optional>

#include "fraisse/embedding.hpp"
#include "fraisse/hash.hpp"
#include "fraisse/structure.hpp"

namespace fraisse {

// An indexed embedding set Emb(A, target). Colorings and thickness verdicts
// refer to positions in `embs`; the fingerprint pins the enumeration order
// so certificates can detect index drift.
struct EmbBase {
    FinStructure a;
    FinStructure target;
    std::vector<EmbMap> embs;
    std::map<EmbMap, int> index;
    std::uint64_t fingerprint = 0;
};

inline EmbBase make_emb_base(const FinStructure& a, const FinStructure& target) {
    EmbBase base;
    base.a = a;
    base.target = target;
    base.embs = enumerate_embeddings(a, target);
    Fnv64 h;
    h.u64(structure_hash(a)).u64(structure_hash(target));
    for (std::size_t i = 0; i < base.embs.size(); ++i) {
        base.index[base.embs[i]] = static_cast<int>(i);
        h.ints(base.embs[i]);
    }
    base.fingerprint = h.value();
    return base;
}

// A partial coloring of an indexed set: assignment[i] in {1..num_colors},
// 0 = undefined.
struct Coloring {
    int num_colors = 0;
    std::vector<int> assignment;
    std::uint64_t base_fingerprint = 0;

    bool operator==(const Coloring&) const = default;

    bool full() const {
        for (int c : assignment)
            if (c == 0) return false;
        return true;
    }

    std::vector<int> color_class(int c) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (assignment[i] == c) out.push_back(static_cast<int>(i));
        return out;
    }

    std::vector<int> domain() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (assignment[i] != 0) out.push_back(static_cast<int>(i));
        return out;
    }
};

inline Coloring make_coloring(const EmbBase& base, int num_colors, std::vector<int> assignment) {
    if (assignment.size() != base.embs.size())
        throw InputError("coloring: assignment length != embedding count");
    for (int c : assignment)
        if (c < 0 || c > num_colors) throw InputError("coloring: color out of range");
    return Coloring{num_colors, std::move(assignment), base.fingerprint};
}

inline void check_same_base(const Coloring& x, const Coloring& y) {
    if (x.base_fingerprint != y.base_fingerprint || x.assignment.size() != y.assignment.size())
        throw InputError("colorings have different bases");
}

inline void check_same_domain(const Coloring& x, const Coloring& y) {
    check_same_base(x, y);
    for (std::size_t i = 0; i < x.assignment.size(); ++i)
        if ((x.assignment[i] == 0) != (y.assignment[i] == 0))
            throw InputError("colorings have different domains");
}

// Product coloring with the bijective pairing (γ-1)·ℓ + δ into {1..kℓ}.
// (The naive γ·(ℓ-1)+δ pairing collides, e.g. (1,3) and (2,1) at ℓ=3.)
inline Coloring product_coloring(const Coloring& gamma, const Coloring& delta) {
    check_same_domain(gamma, delta);
    Coloring out;
    out.num_colors = gamma.num_colors * delta.num_colors;
    out.base_fingerprint = gamma.base_fingerprint;
    out.assignment.resize(gamma.assignment.size(), 0);
    for (std::size_t i = 0; i < gamma.assignment.size(); ++i)
        if (gamma.assignment[i] != 0)
            out.assignment[i] = (gamma.assignment[i] - 1) * delta.num_colors + delta.assignment[i];
    return out;
}

// True iff delta's classes refine gamma's: delta(x) = delta(y) implies
// gamma(x) = gamma(y) on the common domain.
inline bool refines(const Coloring& delta, const Coloring& gamma) {
    check_same_domain(delta, gamma);
    std::map<int, int> seen; // delta color -> gamma color
    for (std::size_t i = 0; i < delta.assignment.size(); ++i) {
        int d = delta.assignment[i];
        if (d == 0) continue;
        auto [it, fresh] = seen.emplace(d, gamma.assignment[i]);
        if (!fresh && it->second != gamma.assignment[i]) return false;
    }
    return true;
}

// Pullback along f: A_m -> A_n of a coloring of Emb(A_m, target), giving a
// coloring of Emb(A_n, target): f(γ)(x) = γ(x∘f), defined where x∘f is in
// γ's domain.
inline Coloring pullback_coloring(const EmbBase& base_m, const Coloring& gamma, const EmbMap& f,
                                  const EmbBase& base_n) {
    if (gamma.base_fingerprint != base_m.fingerprint)
        throw InputError("pullback_coloring: coloring does not live on base_m");
    if (!is_embedding(f, base_m.a, base_n.a))
        throw InputError("pullback_coloring: f is not an embedding A_m -> A_n");
    if (!(base_m.target == base_n.target)) throw InputError("pullback_coloring: target mismatch");
    Coloring out;
    out.num_colors = gamma.num_colors;
    out.base_fingerprint = base_n.fingerprint;
    out.assignment.resize(base_n.embs.size(), 0);
    for (std::size_t i = 0; i < base_n.embs.size(); ++i) {
        EmbMap xf = compose(base_n.embs[i], f);
        auto it = base_m.index.find(xf);
        if (it == base_m.index.end()) continue;
        out.assignment[i] = gamma.assignment[it->second];
    }
    return out;
}

// A partial isomorphism of the target: an embedding of an induced
// substructure back into the target.
struct PartialIso {
    std::vector<int> domain; // ascending vertices of the target
    EmbMap images;           // images[i] = image of domain[i]
};

inline void validate_partial_iso(const PartialIso& g, const FinStructure& target) {
    auto [sub, inc] = induced_substructure(target, g.domain);
    if (g.images.size() != g.domain.size()) throw InputError("partial iso: size mismatch");
    if (!is_embedding(g.images, sub, target)) throw InputError("not a partial isomorphism");
}

// Left logic action: (g·γ)(g∘x) = γ(x). Defined at y exactly when y factors
// as g∘x with x in γ's domain.
inline Coloring act_on_coloring(const EmbBase& base, const PartialIso& g, const Coloring& gamma) {
    if (gamma.base_fingerprint != base.fingerprint)
        throw InputError("act_on_coloring: coloring does not live on the given base");
    validate_partial_iso(g, base.target);
    std::vector<int> fwd(base.target.size + 1, 0), bwd(base.target.size + 1, 0);
    for (std::size_t i = 0; i < g.domain.size(); ++i) {
        fwd[g.domain[i]] = g.images[i];
        bwd[g.images[i]] = g.domain[i];
    }
    Coloring out;
    out.num_colors = gamma.num_colors;
    out.base_fingerprint = base.fingerprint;
    out.assignment.resize(base.embs.size(), 0);
    for (std::size_t yi = 0; yi < base.embs.size(); ++yi) {
        const EmbMap& y = base.embs[yi];
        EmbMap x(y.size());
        bool inside = true;
        for (std::size_t j = 0; j < y.size() && inside; ++j) {
            x[j] = bwd[y[j]];
            inside = x[j] != 0;
        }
        if (!inside) continue;
        auto it = base.index.find(x);
        if (it == base.index.end()) continue;
        out.assignment[yi] = gamma.assignment[it->second];
    }
    return out;
}

// Order-type coloring: each embedding is colored by the permutation pattern
// of its image tuple. The patterns occurring are numbered 1..k in
// lexicographic pattern order; this is the canonical lower-evidence family.
inline std::pair<Coloring, std::vector<std::vector<int>>> order_type_coloring(const EmbBase& base) {
    std::map<std::vector<int>, int> patterns;
    std::vector<int> pattern_of(base.embs.size());
    for (std::size_t i = 0; i < base.embs.size(); ++i) {
        const EmbMap& m = base.embs[i];
        std::vector<int> sorted_vals(m.begin(), m.end());
        std::sort(sorted_vals.begin(), sorted_vals.end());
        std::vector<int> pat(m.size());
        for (std::size_t j = 0; j < m.size(); ++j)
            pat[j] = static_cast<int>(std::lower_bound(sorted_vals.begin(), sorted_vals.end(),
                                                       m[j]) -
                                      sorted_vals.begin()) +
                     1;
        patterns.emplace(pat, 0);
        pattern_of[i] = 0; // filled below once numbering is fixed
    }
    int next = 1;
    for (auto& [pat, num] : patterns) num = next++;
    Coloring col;
    col.num_colors = next - 1;
    col.base_fingerprint = base.fingerprint;
    col.assignment.resize(base.embs.size());
    std::vector<std::vector<int>> pattern_list(patterns.size());
    for (auto& [pat, num] : patterns) pattern_list[num - 1] = pat;
    for (std::size_t i = 0; i < base.embs.size(); ++i) {
        const EmbMap& m = base.embs[i];
        std::vector<int> sorted_vals(m.begin(), m.end());
        std::sort(sorted_vals.begin(), sorted_vals.end());
        std::vector<int> pat(m.size());
        for (std::size_t j = 0; j < m.size(); ++j)
            pat[j] = static_cast<int>(std::lower_bound(sorted_vals.begin(), sorted_vals.end(),
                                                       m[j]) -
                                      sorted_vals.begin()) +
                     1;
        col.assignment[i] = patterns.at(pat);
    }
    return {col, pattern_list};
}

} // namespace fraisse
