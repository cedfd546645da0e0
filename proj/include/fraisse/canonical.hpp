#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "fraisse/embedding.hpp"
#include "fraisse/structure.hpp"

namespace fraisse {

// Canonical code of a structure: a byte string, equal for two structures iff
// they are isomorphic, minimal over all relabelings. The code is built in
// per-vertex blocks so that a partial assignment already fixes a comparable
// prefix; the search abandons a branch as soon as its prefix exceeds the
// best complete code found.
struct CanonicalCode {
    std::string code;
    std::vector<int> relabeling; // relabeling[v-1] = canonical name of v

    bool operator==(const CanonicalCode& o) const { return code == o.code; }
    bool operator<(const CanonicalCode& o) const { return code < o.code; }
};

namespace detail {

inline void put_u32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>((v >> 24) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>(v & 0xff));
}

struct CanonSearch {
    const FinStructure& a;
    std::vector<int> order;       // candidate vertices, invariant-sorted
    std::vector<int> perm;        // perm[v-1] = new label (0 = unassigned)
    std::vector<std::string> best_blocks;
    std::vector<int> best_perm;
    bool have_best = false;
    std::uint64_t epoch = 0;
    std::vector<std::string> cur_blocks;

    explicit CanonSearch(const FinStructure& s) : a(s) {}

    // Block for new label j: all tuples fully assigned whose maximal new
    // label is j, relabeled, tagged by symbol, sorted, serialized.
    std::string block_for(int j) const {
        std::vector<std::pair<int, Tuple>> items;
        for (std::size_t s = 0; s < a.relations.size(); ++s) {
            for (const auto& t : a.relations[s]) {
                int mx = 0;
                bool assigned = true;
                Tuple mt(t.size());
                for (std::size_t i = 0; i < t.size(); ++i) {
                    int nv = perm[t[i] - 1];
                    if (nv == 0) { assigned = false; break; }
                    mt[i] = nv;
                    mx = std::max(mx, nv);
                }
                if (assigned && mx == j) items.emplace_back(static_cast<int>(s), std::move(mt));
            }
        }
        std::sort(items.begin(), items.end());
        std::string out;
        put_u32(out, static_cast<std::uint32_t>(items.size()));
        for (const auto& [sym, mt] : items) {
            out.push_back(static_cast<char>(sym));
            for (int v : mt) out.push_back(static_cast<char>(v));
        }
        return out;
    }

    void dfs(int j, bool tied) {
        if (j > a.size) {
            best_blocks = cur_blocks;
            best_perm = perm;
            have_best = true;
            ++epoch;
            return;
        }
        for (int idx = 0; idx < a.size; ++idx) {
            int v = order[idx];
            if (perm[v - 1] != 0) continue;
            perm[v - 1] = j;
            std::string block = block_for(j);
            bool child_tied = tied;
            bool prune = false;
            if (have_best && tied) {
                int cmp = block.compare(best_blocks[j - 1]);
                if (cmp > 0) prune = true;
                else child_tied = (cmp == 0);
            } else if (!have_best) {
                child_tied = false;
            }
            if (!prune) {
                cur_blocks.push_back(std::move(block));
                std::uint64_t before = epoch;
                dfs(j + 1, child_tied);
                cur_blocks.pop_back();
                if (epoch != before) tied = true; // new best went through this prefix
            }
            perm[v - 1] = 0;
        }
    }
};

} // namespace detail

inline CanonicalCode canonical_form(const FinStructure& a) {
    if (a.size > 255) throw InputError("canonical_form: structures larger than 255 unsupported");
    std::string header;
    detail::put_u32(header, static_cast<std::uint32_t>(a.size));
    if (a.size == 0) return CanonicalCode{header, {}};

    detail::CanonSearch search(a);
    search.perm.assign(a.size, 0);

    // Invariant refinement: sort vertices by per-symbol, per-position
    // incidence counts. Purely a branch-ordering heuristic; exactness comes
    // from the exhaustive search.
    std::vector<std::vector<int>> inv_vec(a.size);
    for (std::size_t s = 0; s < a.relations.size(); ++s) {
        int arity = a.sig->symbols[s].arity;
        for (int v = 1; v <= a.size; ++v) {
            auto& iv = inv_vec[v - 1];
            std::size_t base = iv.size();
            iv.resize(base + arity, 0);
            for (const auto& t : a.relations[s])
                for (int p = 0; p < arity; ++p)
                    if (t[p] == v) ++iv[base + p];
        }
    }
    search.order.resize(a.size);
    for (int v = 1; v <= a.size; ++v) search.order[v - 1] = v;
    std::sort(search.order.begin(), search.order.end(),
              [&](int x, int y) { return inv_vec[x - 1] != inv_vec[y - 1]
                                             ? inv_vec[x - 1] < inv_vec[y - 1]
                                             : x < y; });

    search.dfs(1, true);

    std::string code = header;
    for (const auto& b : search.best_blocks) code += b;
    return CanonicalCode{std::move(code), std::move(search.best_perm)};
}

inline bool is_isomorphic(const FinStructure& a, const FinStructure& b) {
    if (!same_signature(a.sig, b.sig) || a.size != b.size) return false;
    return canonical_form(a).code == canonical_form(b).code;
}

// All vertex subsets of B inducing a copy of A, in lexicographic subset
// order. Deliberately routed through canonical codes rather than through
// enumerate_embeddings, so the two sides of the |Emb| = |copies|*|Aut|
// identity come from independent machinery.
inline std::vector<std::vector<int>> enumerate_copies(const FinStructure& a,
                                                      const FinStructure& b) {
    check_same_signature(a, b);
    std::vector<std::vector<int>> out;
    if (a.size > b.size) return out;
    const std::string want = canonical_form(a).code;
    std::vector<int> subset(a.size);
    for (int i = 0; i < a.size; ++i) subset[i] = i + 1;
    if (a.size == 0) {
        out.push_back({});
        return out;
    }
    while (true) {
        if (canonical_form(induced(b, subset)).code == want) out.push_back(subset);
        // next combination
        int i = a.size - 1;
        while (i >= 0 && subset[i] == b.size - (a.size - 1 - i)) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < a.size; ++j) subset[j] = subset[j - 1] + 1;
    }
    return out;
}

} // namespace fraisse
