#pragma once

#include <cmath>
#include <unordered_set>

#include "fraisse/canonical.hpp"
#include "fraisse/coloring.hpp"
#include "fraisse/flim.hpp"
#include "fraisse/generate.hpp"
#include "fraisse/parallel.hpp"

namespace fraisse {

// The colored objects of an arrow query: either Emb(A,C) (embedding form)
// or the copies of A in C (structural form). Each f in Emb(B,C) contributes
// a patch, the set of object indices it induces. A full r-coloring is "bad"
// when every patch sees at least k+1 colors; the arrow holds iff no bad
// coloring exists.
struct ArrowObjects {
    std::size_t object_count = 0;
    std::vector<std::vector<int>> patches;
    std::uint64_t fingerprint = 0;
};

inline ArrowObjects embedding_arrow_objects(const FinStructure& c, const FinStructure& b,
                                            const FinStructure& a) {
    ArrowObjects obj;
    EmbBase base = make_emb_base(a, c);
    obj.object_count = base.embs.size();
    obj.fingerprint = base.fingerprint;
    auto ab = enumerate_embeddings(a, b);
    for (const auto& f : enumerate_embeddings(b, c)) {
        std::vector<int> patch;
        for (const auto& e : ab) patch.push_back(base.index.at(compose(f, e)));
        std::sort(patch.begin(), patch.end());
        patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
        obj.patches.push_back(std::move(patch));
    }
    return obj;
}

inline ArrowObjects structural_arrow_objects(const FinStructure& c, const FinStructure& b,
                                             const FinStructure& a) {
    ArrowObjects obj;
    auto copies = enumerate_copies(a, c);
    obj.object_count = copies.size();
    std::map<std::vector<int>, int> index;
    Fnv64 h;
    h.u64(structure_hash(a)).u64(structure_hash(c)).bytes("copies");
    for (std::size_t i = 0; i < copies.size(); ++i) {
        index[copies[i]] = static_cast<int>(i);
        h.ints(copies[i]);
    }
    obj.fingerprint = h.value();
    auto inner = enumerate_copies(a, b);
    for (const auto& f : enumerate_embeddings(b, c)) {
        std::vector<int> patch;
        for (const auto& s : inner) {
            std::vector<int> img;
            for (int v : s) img.push_back(f[v - 1]);
            std::sort(img.begin(), img.end());
            patch.push_back(index.at(img));
        }
        std::sort(patch.begin(), patch.end());
        patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
        obj.patches.push_back(std::move(patch));
    }
    return obj;
}

struct ArrowResult {
    std::string status; // "holds" | "fails" | "trivial-holds"
    bool holds = false;
    int r = 0, k = 0;
    std::optional<Coloring> bad_coloring; // full, verified (status "fails")
    long nodes = 0;
    long prunings = 0;
    std::uint64_t fingerprint = 0;
};

namespace detail {

// DFS over colorings in index order. Colors are tried in increasing order
// with first-occurrence symmetry breaking (color c+1 may appear only after
// color c), so the first bad coloring found is the lexicographically least
// overall. A patch dies when its distinct colors plus its unassigned slots
// cannot reach k+1.
struct BadColoringSearch {
    const ArrowObjects& obj;
    int r, k;
    std::vector<int> color;                 // 0 = unassigned
    std::vector<std::vector<int>> on_object; // object -> patch indices
    std::vector<std::uint64_t> used_mask;    // per patch
    std::vector<int> distinct, unassigned;   // per patch
    long nodes = 0, prunings = 0;
    std::vector<int> found;

    BadColoringSearch(const ArrowObjects& o, int r_, int k_) : obj(o), r(r_), k(k_) {
        color.assign(obj.object_count, 0);
        on_object.resize(obj.object_count);
        used_mask.assign(obj.patches.size(), 0);
        distinct.assign(obj.patches.size(), 0);
        unassigned.resize(obj.patches.size());
        for (std::size_t p = 0; p < obj.patches.size(); ++p) {
            unassigned[p] = static_cast<int>(obj.patches[p].size());
            for (int e : obj.patches[p]) on_object[e].push_back(static_cast<int>(p));
        }
    }

    bool assign(std::size_t i, int c) {
        color[i] = c;
        bool ok = true;
        for (int p : on_object[i]) {
            --unassigned[p];
            if (!(used_mask[p] >> (c - 1) & 1)) {
                used_mask[p] |= std::uint64_t{1} << (c - 1);
                ++distinct[p];
            }
            if (distinct[p] + unassigned[p] <= k) ok = false;
        }
        return ok;
    }

    void unassign(std::size_t i, int c) {
        color[i] = 0;
        for (int p : on_object[i]) {
            ++unassigned[p];
            bool still_used = false;
            for (int e : obj.patches[p])
                if (color[e] == c) { still_used = true; break; }
            if (!still_used) {
                used_mask[p] &= ~(std::uint64_t{1} << (c - 1));
                --distinct[p];
            }
        }
    }

    // max_used = highest color index used so far (for symmetry breaking)
    bool dfs(std::size_t i, int max_used) {
        if (i == obj.object_count) {
            found = color;
            return true;
        }
        int limit = std::min(r, max_used + 1);
        for (int c = 1; c <= limit; ++c) {
            ++nodes;
            bool viable = assign(i, c);
            if (viable) {
                if (dfs(i + 1, std::max(max_used, c))) return true;
            } else {
                ++prunings;
            }
            unassign(i, c);
        }
        return false;
    }

    // Runs the same DFS but only below a fixed color prefix. Used to split
    // the root frontier across workers.
    bool dfs_under_prefix(const std::vector<int>& prefix) {
        int max_used = 0;
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            ++nodes;
            if (!assign(i, prefix[i])) {
                ++prunings;
                for (std::size_t j = i + 1; j-- > 0;) unassign(j, prefix[j]);
                return false;
            }
            max_used = std::max(max_used, prefix[i]);
        }
        bool hit = dfs(prefix.size(), max_used);
        for (std::size_t j = prefix.size(); j-- > 0;) unassign(j, prefix[j]);
        return hit;
    }
};

// All symmetry-broken color prefixes of the given length, in lexicographic
// order.
inline std::vector<std::vector<int>> color_prefixes(std::size_t len, int r) {
    std::vector<std::vector<int>> out{{}};
    for (std::size_t i = 0; i < len; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& p : out) {
            int max_used = 0;
            for (int c : p) max_used = std::max(max_used, c);
            for (int c = 1; c <= std::min(r, max_used + 1); ++c) {
                auto q = p;
                q.push_back(c);
                next.push_back(std::move(q));
            }
        }
        out = std::move(next);
    }
    return out;
}

} // namespace detail

struct ArrowOptions {
    int jobs = 1;
};

// Exhaustive search for a bad r-coloring over prepared arrow objects.
inline ArrowResult arrow_search(const ArrowObjects& obj, int r, int k,
                                const ArrowOptions& opt = {}) {
    if (k < 1) throw InputError("arrow: k must be >= 1");
    if (r > 62) throw InputError("arrow: more than 62 colors unsupported");
    ArrowResult res;
    res.r = r;
    res.k = k;
    res.fingerprint = obj.fingerprint;
    if (r <= k) {
        // every coloring uses at most r <= k colors on any patch
        res.status = "trivial-holds";
        res.holds = true;
        return res;
    }
    if (obj.object_count == 0) throw InputError("arrow: Emb(A,C) is empty");

    std::optional<std::vector<int>> bad;
    if (opt.jobs <= 1) {
        detail::BadColoringSearch search(obj, r, k);
        if (search.dfs(0, 0)) bad = search.found;
        res.nodes = search.nodes;
        res.prunings = search.prunings;
    } else {
        std::size_t plen = std::min<std::size_t>(obj.object_count, 4);
        auto prefixes = detail::color_prefixes(plen, r);
        struct Branch {
            std::optional<std::vector<int>> bad;
            long nodes = 0, prunings = 0;
        };
        auto branches = parallel_map<Branch>(prefixes.size(), opt.jobs, [&](std::size_t i) {
            detail::BadColoringSearch search(obj, r, k);
            Branch br;
            if (search.dfs_under_prefix(prefixes[i])) br.bad = search.found;
            br.nodes = search.nodes;
            br.prunings = search.prunings;
            return br;
        });
        for (const auto& br : branches) {
            res.nodes += br.nodes;
            res.prunings += br.prunings;
            if (!bad && br.bad) bad = br.bad; // prefixes are in lex order
        }
    }

    if (bad) {
        res.status = "fails";
        res.holds = false;
        Coloring col;
        col.num_colors = r;
        col.assignment = *bad;
        col.base_fingerprint = obj.fingerprint;
        res.bad_coloring = col;
    } else {
        res.status = "holds";
        res.holds = true;
    }
    return res;
}

// Independent check that a full coloring is bad: every patch sees >= k+1
// colors. Polynomial re-verification of failure certificates.
inline bool verify_bad_coloring(const ArrowObjects& obj, const Coloring& col, int k) {
    if (col.assignment.size() != obj.object_count || !col.full()) return false;
    if (col.base_fingerprint != obj.fingerprint) return false;
    for (const auto& patch : obj.patches) {
        std::set<int> colors;
        for (int e : patch) colors.insert(col.assignment[e]);
        if (static_cast<int>(colors.size()) <= k) return false;
    }
    return true;
}

// C hook-arrow (B) with A-embeddings: every r-coloring of Emb(A,C) admits
// f in Emb(B,C) whose induced A-embeddings use at most k colors.
inline ArrowResult arrow_check(const FinStructure& c, const FinStructure& b,
                               const FinStructure& a, int r, int k,
                               const ArrowOptions& opt = {}) {
    ArrowObjects obj = embedding_arrow_objects(c, b, a);
    ArrowResult res = arrow_search(obj, r, k, opt);
    if (res.bad_coloring && !verify_bad_coloring(obj, *res.bad_coloring, k))
        throw std::logic_error("arrow_check: unverifiable certificate");
    return res;
}

// Structural form: colors copies instead of embeddings.
inline ArrowResult structural_arrow_check(const FinStructure& c, const FinStructure& b,
                                          const FinStructure& a, int r, int k,
                                          const ArrowOptions& opt = {}) {
    ArrowObjects obj = structural_arrow_objects(c, b, a);
    ArrowResult res = arrow_search(obj, r, k, opt);
    if (res.bad_coloring && !verify_bad_coloring(obj, *res.bad_coloring, k))
        throw std::logic_error("structural_arrow_check: unverifiable certificate");
    return res;
}

// Smallest witness C in the class with C hook-arrow (B)^A_{r,k}, scanning
// generate_structures size by size.
struct WitnessResult {
    std::optional<FinStructure> witness;
    int scanned_to = 0; // last size fully scanned
};

inline WitnessResult find_arrow_witness(const ClassSpec& spec, const FinStructure& b,
                                        const FinStructure& a, int r, int k, int size_bound,
                                        const ArrowOptions& opt = {}) {
    WitnessResult out;
    for (int n = b.size; n <= size_bound; ++n) {
        for (const auto& c : generate_structures(spec, n)) {
            if (enumerate_embeddings(a, c).empty()) continue;
            if (enumerate_embeddings(b, c).empty()) continue;
            ArrowResult res = arrow_check(c, b, a, r, k, opt);
            if (res.holds) {
                out.witness = c;
                out.scanned_to = n;
                return out;
            }
        }
        out.scanned_to = n;
    }
    return out;
}

// ---- König bad-coloring tree ----------------------------------------------

struct BadTreeLevel {
    int level = 0;       // 1-based chain position
    int top_size = 0;    // size of the chain member
    long object_count = 0;
    long bad_count = 0;
    bool arrow_certified = false; // empty level certifies the arrow there
    std::vector<std::vector<int>> bad_colorings; // kept when small
    long restricting = 0; // level-t bad colorings whose restriction to t-1 is bad
    bool all_restrict = true;
    bool restriction_checked = true; // false when the previous level was truncated
};

struct BadTreeReport {
    std::vector<BadTreeLevel> levels;
};

// Level t counts the bad full r-colorings of Emb(A, chain[t-1]): colorings
// where no f in Emb(B, chain[t-1]) has its A-patch within k colors. Because
// chain members are initial segments, Emb(A, chain[t-1]) sits inside
// Emb(A, chain[t]) literally, and restriction is index projection.
inline BadTreeReport bad_coloring_tree(const FinStructure& a, const FinStructure& b,
                                       const FlimPrefix& prefix, int depth, int r, int k,
                                       std::size_t keep_limit = 1u << 20) {
    if (r < 1 || k < 1) throw InputError("bad_coloring_tree: r, k must be >= 1");
    BadTreeReport rep;
    int levels = std::min<int>(depth, static_cast<int>(prefix.chain.size()));
    std::vector<EmbMap> prev_embs;
    std::set<std::vector<int>> prev_bad;
    for (int t = 1; t <= levels; ++t) {
        const FinStructure& top = prefix.chain[t - 1];
        EmbBase base = make_emb_base(a, top);
        ArrowObjects obj;
        obj.object_count = base.embs.size();
        obj.fingerprint = base.fingerprint;
        auto ab = enumerate_embeddings(a, b);
        for (const auto& f : enumerate_embeddings(b, top)) {
            std::vector<int> patch;
            for (const auto& e : ab) patch.push_back(base.index.at(compose(f, e)));
            std::sort(patch.begin(), patch.end());
            patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
            obj.patches.push_back(std::move(patch));
        }

        double log_total = static_cast<double>(obj.object_count) * std::log2(std::max(2, r));
        if (log_total > 26)
            throw InputError("bad_coloring_tree: level " + std::to_string(t) +
                             " has too many colorings to enumerate");

        BadTreeLevel lvl;
        lvl.level = t;
        lvl.top_size = top.size;
        lvl.object_count = static_cast<long>(obj.object_count);

        // indices of the previous level's embeddings inside this level
        std::vector<int> proj;
        for (const auto& e : prev_embs) proj.push_back(base.index.at(e));

        bool prev_complete = (t == 1) ||
                             (rep.levels.back().bad_count ==
                              static_cast<long>(prev_bad.size()));
        lvl.restriction_checked = prev_complete;

        std::vector<int> coloring(obj.object_count, 1);
        std::set<std::vector<int>> bad_here;
        while (true) {
            bool bad = true;
            for (const auto& patch : obj.patches) {
                std::uint64_t mask = 0;
                for (int e : patch) mask |= std::uint64_t{1} << (coloring[e] - 1);
                int distinct = 0;
                for (std::uint64_t m = mask; m; m &= m - 1) ++distinct;
                if (distinct <= k) { bad = false; break; }
            }
            if (bad) {
                ++lvl.bad_count;
                if (bad_here.size() < keep_limit) bad_here.insert(coloring);
                if (t > 1 && prev_complete) {
                    std::vector<int> restricted;
                    for (int idx : proj) restricted.push_back(coloring[idx]);
                    if (prev_bad.count(restricted)) ++lvl.restricting;
                    else lvl.all_restrict = false;
                }
            }
            // odometer
            std::size_t i = 0;
            while (i < coloring.size() && coloring[i] == r) coloring[i++] = 1;
            if (i == coloring.size()) break;
            ++coloring[i];
        }
        lvl.arrow_certified = (lvl.bad_count == 0) && !obj.patches.empty();
        for (const auto& c : bad_here) lvl.bad_colorings.push_back(c);
        rep.levels.push_back(std::move(lvl));
        prev_embs = base.embs;
        prev_bad = std::move(bad_here);
    }
    return rep;
}

} // namespace fraisse
