#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "fraisse/hash.hpp"
#include "fraisse/signature.hpp"

namespace fraisse {

// A tuple of 1-based vertex ids.
using Tuple = std::vector<int>;

// A finite relational structure on universe {1..size}. Relations are kept
// sorted and duplicate-free so that structural equality is plain vector
// equality.
struct FinStructure {
    SignatureRef sig;
    int size = 0;
    std::vector<std::vector<Tuple>> relations; // one sorted tuple list per symbol

    bool operator==(const FinStructure& o) const {
        return size == o.size && relations == o.relations && same_signature(sig, o.sig);
    }

    bool has_tuple(int sym, const Tuple& t) const {
        const auto& rel = relations[sym];
        return std::binary_search(rel.begin(), rel.end(), t);
    }
};

inline void normalize_relations(FinStructure& s) {
    for (auto& rel : s.relations) {
        std::sort(rel.begin(), rel.end());
        rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
    }
}

// Validates every invariant of the type; `where` prefixes error messages so
// file parsers can report a precise field path.
inline void validate_structure(const FinStructure& s, const std::string& where = "structure") {
    if (!s.sig) throw InputError(where + ": missing signature");
    if (s.size < 0) throw InputError(where + ": negative size");
    if (s.relations.size() != s.sig->symbols.size())
        throw InputError(where + ": relation list count does not match signature");
    for (std::size_t i = 0; i < s.relations.size(); ++i) {
        const auto& sym = s.sig->symbols[i];
        for (const auto& t : s.relations[i]) {
            if (static_cast<int>(t.size()) != sym.arity)
                throw InputError(where + ".relations." + sym.name + ": tuple arity != " +
                                 std::to_string(sym.arity));
            for (int v : t)
                if (v < 1 || v > s.size)
                    throw InputError(where + ".relations." + sym.name + ": vertex " +
                                     std::to_string(v) + " outside {1.." +
                                     std::to_string(s.size) + "}");
        }
    }
}

inline FinStructure make_structure(SignatureRef sig, int size,
                                   std::vector<std::vector<Tuple>> relations) {
    FinStructure s{std::move(sig), size, std::move(relations)};
    if (s.relations.empty()) s.relations.resize(s.sig ? s.sig->symbols.size() : 0);
    normalize_relations(s);
    validate_structure(s);
    return s;
}

inline FinStructure empty_structure(SignatureRef sig) {
    return make_structure(std::move(sig), 0, {});
}

// Applies a relabeling perm (perm[v-1] = new name of v) to all tuples.
inline FinStructure relabel(const FinStructure& s, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != s.size) throw InputError("relabel: permutation size mismatch");
    FinStructure out{s.sig, s.size, {}};
    out.relations.resize(s.relations.size());
    for (std::size_t i = 0; i < s.relations.size(); ++i) {
        out.relations[i].reserve(s.relations[i].size());
        for (const auto& t : s.relations[i]) {
            Tuple mt(t.size());
            for (std::size_t j = 0; j < t.size(); ++j) mt[j] = perm[t[j] - 1];
            out.relations[i].push_back(std::move(mt));
        }
    }
    normalize_relations(out);
    return out;
}

// Substructure of B induced by the vertex set `subset` (1-based, deduped),
// relabeled to {1..|subset|} in ascending vertex order. The second component
// of the result of induced_substructure (below) is that ascending order,
// i.e. the inclusion map back into B.
inline FinStructure induced(const FinStructure& b, std::vector<int> subset) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    for (int v : subset)
        if (v < 1 || v > b.size) throw InputError("induced: vertex out of range");
    std::vector<int> pos(b.size + 1, 0);
    for (std::size_t i = 0; i < subset.size(); ++i) pos[subset[i]] = static_cast<int>(i) + 1;
    FinStructure out{b.sig, static_cast<int>(subset.size()), {}};
    out.relations.resize(b.relations.size());
    for (std::size_t i = 0; i < b.relations.size(); ++i) {
        for (const auto& t : b.relations[i]) {
            Tuple mt(t.size());
            bool inside = true;
            for (std::size_t j = 0; j < t.size() && inside; ++j) {
                mt[j] = pos[t[j]];
                inside = mt[j] != 0;
            }
            if (inside) out.relations[i].push_back(std::move(mt));
        }
    }
    normalize_relations(out);
    return out;
}

struct InducedResult {
    FinStructure sub;
    std::vector<int> inclusion; // inclusion[i-1] = vertex of B that i came from
};

inline InducedResult induced_substructure(const FinStructure& b, std::vector<int> subset) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    return InducedResult{induced(b, subset), subset};
}

// Stable content hash (signature, size, sorted relations).
inline std::uint64_t structure_hash(const FinStructure& s) {
    Fnv64 h;
    h.u64(s.sig ? s.sig->symbols.size() : 0);
    if (s.sig)
        for (const auto& sym : s.sig->symbols) h.bytes(sym.name).i64(sym.arity);
    h.i64(s.size);
    for (const auto& rel : s.relations) {
        h.u64(rel.size());
        for (const auto& t : rel) h.ints(t);
    }
    return h.value();
}

} // namespace fraisse
