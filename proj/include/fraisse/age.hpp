#pragma once

#include <numeric>
#include <optional>
#include <random>

#include "fraisse/class_spec.hpp"
#include "fraisse/generate.hpp"

namespace fraisse {

// Certificate of an amalgamation query over a common base A with
// f: A -> B and g: A -> C. On success, D and embeddings r: B -> D,
// s: C -> D with r∘f = s∘g (the square is re-verified before the
// certificate is issued). On failure, the searched bound, plus the free
// amalgam and the forbidden pattern it contains (the first thing the search
// rules out, kept because it is independently checkable).
struct APCertificate {
    bool holds = false;
    FinStructure base_a, side_b, side_c;
    EmbMap f, g;

    FinStructure amalgam; // valid iff holds
    EmbMap r, s;

    int exhausted_bound = 0; // valid iff !holds
    std::optional<FinStructure> free_amalgam;
    std::optional<MemberViolation> free_violation;

    long candidates_tried = 0;
};

namespace detail {

// The amalgamation search. The candidate universe is C's vertices followed
// by the unmatched B-only vertices; s is always the identity inclusion of C.
// Any amalgam in a hereditary class restricts to one on im(r) ∪ im(s), so
// searching candidates of size <= |B|+|C|-|A| is exhaustive whenever the
// caller's bound allows that size.
struct AmalgamSearch {
    const ClassSpec& spec;
    const FinStructure& a;
    const FinStructure& b;
    const FinStructure& c;
    const EmbMap& f;
    const EmbMap& g;
    int size_bound;
    std::optional<unsigned> seed;

    long tried = 0;
    long dfs_nodes = 0;
    std::optional<FinStructure> free_amalgam;
    std::optional<MemberViolation> free_violation;

    std::vector<int> b_only; // vertices of B outside im(f)

    std::optional<std::pair<FinStructure, EmbMap>> found; // (D, r)

    void prepare() {
        std::vector<char> in_f(b.size + 1, 0);
        for (int v : f) in_f[v] = 1;
        for (int v = 1; v <= b.size; ++v)
            if (!in_f[v]) b_only.push_back(v);
    }

    // r for a given matching: matched B-only vertices map to their C
    // partner, unmatched to fresh indices |C|+1, |C|+2, ...
    EmbMap r_for(const std::vector<std::pair<int, int>>& matching) const {
        EmbMap r(b.size, 0);
        for (std::size_t i = 0; i < f.size(); ++i) r[f[i] - 1] = g[i];
        for (auto [bv, cv] : matching) r[bv - 1] = cv;
        int fresh = c.size;
        for (int v : b_only) {
            if (r[v - 1] == 0) r[v - 1] = ++fresh;
        }
        return r;
    }

    // Candidate skeleton for a matching: C's relations plus B's pushed
    // through r. Returns nullopt when the forced parts disagree (r or s
    // would fail to preserve-and-reflect).
    std::optional<FinStructure> skeleton(const EmbMap& r, int dsize) const {
        FinStructure d{c.sig, dsize, {}};
        d.relations = c.relations;
        std::vector<char> in_r(dsize + 1, 0);
        for (int v : r) in_r[v] = 1;
        for (std::size_t sidx = 0; sidx < b.relations.size(); ++sidx) {
            for (const auto& t : b.relations[sidx]) {
                Tuple img(t.size());
                bool in_c = true;
                for (std::size_t j = 0; j < t.size(); ++j) {
                    img[j] = r[t[j] - 1];
                    if (img[j] > c.size) in_c = false;
                }
                if (in_c && !c.has_tuple(static_cast<int>(sidx), img))
                    return std::nullopt; // B forces a tuple C reflects away
                d.relations[sidx].push_back(img);
            }
            // C tuples lying inside im(r) must pull back into B
            for (const auto& t : c.relations[sidx]) {
                bool inside = true;
                for (int v : t)
                    if (!in_r[v]) { inside = false; break; }
                if (!inside) continue;
                Tuple pre(t.size());
                for (std::size_t j = 0; j < t.size(); ++j)
                    for (int bv = 1; bv <= b.size; ++bv)
                        if (r[bv - 1] == t[j]) { pre[j] = bv; break; }
                if (!b.has_tuple(static_cast<int>(sidx), pre)) return std::nullopt;
            }
        }
        normalize_relations(d);
        return d;
    }

    // Free tuples of a skeleton: those touching at least one fresh vertex
    // (im(r) \ im(s)) and at least one C vertex outside im(r). Everything
    // else is forced by B or C.
    std::vector<std::pair<int, Tuple>> free_tuples(const EmbMap& r, int dsize) const {
        std::vector<char> in_r(dsize + 1, 0);
        for (int v : r) in_r[v] = 1;
        std::vector<std::pair<int, Tuple>> out;
        for (std::size_t sidx = 0; sidx < spec.sig->symbols.size(); ++sidx) {
            int arity = spec.sig->symbols[sidx].arity;
            Tuple t(arity, 1);
            while (true) {
                bool has_fresh = false, has_outside = false;
                for (int v : t) {
                    if (v > c.size) has_fresh = true;
                    else if (!in_r[v]) has_outside = true;
                }
                if (has_fresh && has_outside) out.emplace_back(static_cast<int>(sidx), t);
                int i = arity - 1;
                while (i >= 0 && t[i] == dsize) --i;
                if (i < 0) break;
                ++t[i];
                for (int j = i + 1; j < arity; ++j) t[j] = 1;
            }
        }
        // small vertex sets first so subset checks fire as early as possible
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
            Tuple xs = x.second, ys = y.second;
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            std::sort(ys.begin(), ys.end());
            ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
            if (xs.size() != ys.size()) return xs.size() < ys.size();
            if (xs != ys) return xs < ys;
            return x < y;
        });
        return out;
    }

    // DFS over free-tuple decisions, exclude-first (so the lexicographically
    // least added set is found first). A subset is checked the moment its
    // last free tuple is decided; only subsets meeting both a fresh vertex
    // and a C-vertex outside im(r) can go bad.
    bool complete_with_added(FinStructure& d, const EmbMap& r) {
        auto free_list = free_tuples(r, d.size);
        std::vector<char> in_r(d.size + 1, 0);
        for (int v : r) in_r[v] = 1;

        // Watched subsets are built lazily from the free tuples: every
        // fresh-and-outside subset of a forbidden size carries at least one
        // free tuple (repeat a fresh and an outside vertex), so enumerating
        // supersets of each free tuple's vertex set finds them all.
        std::vector<std::vector<int>> watch_sets;
        std::vector<std::vector<int>> watch_tuples;
        std::map<std::vector<int>, int> watch_index;
        for (std::size_t i = 0; i < free_list.size(); ++i) {
            std::vector<int> vset = free_list[i].second;
            std::sort(vset.begin(), vset.end());
            vset.erase(std::unique(vset.begin(), vset.end()), vset.end());
            for (const auto& [sz, codes] : spec.forbidden_codes) {
                if (sz < static_cast<int>(vset.size()) || sz > d.size) continue;
                std::vector<int> others;
                for (int v = 1; v <= d.size; ++v)
                    if (!std::binary_search(vset.begin(), vset.end(), v)) others.push_back(v);
                int need = sz - static_cast<int>(vset.size());
                for_each_subset(static_cast<int>(others.size()), need,
                                [&](const std::vector<int>& pick) {
                                    std::vector<int> subset = vset;
                                    for (int p : pick) subset.push_back(others[p - 1]);
                                    std::sort(subset.begin(), subset.end());
                                    auto [it, fresh] = watch_index.emplace(
                                        subset, static_cast<int>(watch_sets.size()));
                                    if (fresh) {
                                        watch_sets.push_back(subset);
                                        watch_tuples.emplace_back();
                                    }
                                    watch_tuples[it->second].push_back(static_cast<int>(i));
                                });
                if (need == 0) {
                    auto [it, fresh] =
                        watch_index.emplace(vset, static_cast<int>(watch_sets.size()));
                    if (fresh) {
                        watch_sets.push_back(vset);
                        watch_tuples.emplace_back();
                    }
                    watch_tuples[it->second].push_back(static_cast<int>(i));
                }
            }
        }
        std::vector<int> remaining(watch_sets.size());
        std::vector<std::vector<int>> tuple_watchers(free_list.size());
        for (std::size_t w = 0; w < watch_sets.size(); ++w) {
            remaining[w] = static_cast<int>(watch_tuples[w].size());
            for (int ti : watch_tuples[w]) tuple_watchers[ti].push_back(static_cast<int>(w));
        }

        auto subset_ok = [&](std::size_t w) {
            auto sub = induced(d, watch_sets[w]);
            auto it = spec.forbidden_codes.find(sub.size);
            if (it == spec.forbidden_codes.end()) return true;
            return it->second.find(canonical_form(sub).code) == it->second.end();
        };

        auto rec = [&](auto&& self, std::size_t i, bool included) -> bool {
            ++dfs_nodes;
            if (i == free_list.size()) {
                ++tried;
                // safety net: full re-check of everything the pruning skipped
                FinStructure cand = d;
                normalize_relations(cand);
                if (!is_member(spec, cand)) return false;
                d = std::move(cand);
                return true;
            }
            (void)included;
            for (int choice = 0; choice < 2; ++choice) {
                if (choice == 1) d.relations[free_list[i].first].push_back(free_list[i].second);
                bool viable = true;
                for (int w : tuple_watchers[i]) {
                    if (--remaining[w] == 0 && !subset_ok(w)) viable = false;
                }
                if (viable && self(self, i + 1, choice == 1)) return true;
                for (int w : tuple_watchers[i]) ++remaining[w];
                if (choice == 1) d.relations[free_list[i].first].pop_back();
            }
            return false;
        };
        return rec(rec, 0, false);
    }

    std::optional<APCertificate> run() {
        prepare();
        int full = c.size + static_cast<int>(b_only.size());
        APCertificate cert;
        cert.base_a = a;
        cert.side_b = b;
        cert.side_c = c;
        cert.f = f;
        cert.g = g;

        // matchings between B-only and C-outside-im(g) vertices, by
        // decreasing size (the free amalgam, size 0 with nothing added, is
        // tried before anything else)
        std::vector<int> c_only;
        {
            std::vector<char> in_g(c.size + 1, 0);
            for (int v : g) in_g[v] = 1;
            for (int v = 1; v <= c.size; ++v)
                if (!in_g[v]) c_only.push_back(v);
        }
        int max_overlap = static_cast<int>(std::min(b_only.size(), c_only.size()));

        auto try_candidate = [&](const std::vector<std::pair<int, int>>& matching,
                                 bool free_only) -> bool {
            EmbMap r = r_for(matching);
            int dsize = full - static_cast<int>(matching.size());
            if (dsize > size_bound) return false;
            // amalgams are members of their size; skip sizes with none
            if (!class_inhabited_at(spec, dsize)) return false;
            auto skel = skeleton(r, dsize);
            if (!skel) return false;
            FinStructure d = *skel;
            bool ok;
            if (free_only) {
                ++tried;
                ok = is_member(spec, d);
                if (!ok && !free_amalgam) {
                    free_amalgam = d;
                    free_violation = member_violation(spec, d);
                }
            } else {
                ok = complete_with_added(d, r);
            }
            if (ok) found = {d, r};
            return ok;
        };

        // 1. the free amalgam
        if (full <= size_bound && try_candidate({}, true)) {
            // fallthrough to certificate below
        } else {
            // 2. identifications in decreasing overlap, then added tuples.
            // Consistent matchings are exactly embeddings of the induced
            // substructure on f(A) plus the matched vertices, pinned to g,
            // so they are enumerated by a pinned embedding search rather
            // than by raw injections.
            for (int o = max_overlap; o >= 0 && !found; --o) {
                auto matchings = matchings_of_size(o);
                if (seed && matchings.size() > 1) {
                    std::mt19937 rng(*seed + static_cast<unsigned>(o) * 7919u);
                    std::shuffle(matchings.begin(), matchings.end(), rng);
                }
                for (const auto& m : matchings) {
                    if (try_candidate(m, false)) break;
                }
            }
        }

        cert.candidates_tried = tried;
        cert.free_amalgam = free_amalgam;
        cert.free_violation = free_violation;
        if (found) {
            cert.holds = true;
            cert.amalgam = found->first;
            cert.r = found->second;
            cert.s = identity_map(c.size);
            return cert;
        }
        cert.holds = false;
        cert.exhausted_bound = size_bound;
        return cert;
    }

    // Consistent matchings of exactly o vertices of B-only into C: for each
    // o-subset M of B-only, embeddings of induced(B, f(A) ∪ M) into C that
    // extend g. Injectivity against the pins keeps matched images off g(A).
    std::vector<std::vector<std::pair<int, int>>> matchings_of_size(int o) const {
        std::vector<std::vector<std::pair<int, int>>> out;
        if (o == 0) {
            out.push_back({});
            return out;
        }
        std::vector<int> fa(f.begin(), f.end());
        for_each_subset(static_cast<int>(b_only.size()), o, [&](const std::vector<int>& pick) {
            std::vector<int> verts = fa;
            std::vector<int> matched;
            for (int p : pick) {
                verts.push_back(b_only[p - 1]);
                matched.push_back(b_only[p - 1]);
            }
            auto [bsub, binc] = induced_substructure(b, verts);
            // position of each B vertex inside bsub
            std::vector<int> pos(b.size + 1, 0);
            for (std::size_t i = 0; i < binc.size(); ++i) pos[binc[i]] = static_cast<int>(i) + 1;
            std::vector<std::pair<int, int>> pins;
            for (std::size_t i = 0; i < f.size(); ++i) pins.emplace_back(pos[f[i]], g[i]);
            for (const auto& h : enumerate_embeddings_pinned(bsub, c, pins)) {
                std::vector<std::pair<int, int>> m;
                for (int bv : matched) m.emplace_back(bv, h[pos[bv] - 1]);
                std::sort(m.begin(), m.end());
                out.push_back(std::move(m));
            }
        });
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

} // namespace detail

struct AmalgamOptions {
    int size_bound = 8;
    std::optional<unsigned> seed; // shuffles equally-ranked matchings only
};

// Searches for D in the class with r: B -> D, s: C -> D, r∘f = s∘g.
inline APCertificate amalgamate(const ClassSpec& spec, const FinStructure& a,
                                const FinStructure& b, const FinStructure& c, const EmbMap& f,
                                const EmbMap& g, const AmalgamOptions& opt = {}) {
    if (!is_embedding(f, a, b)) throw InputError("amalgamate: f is not an embedding A -> B");
    if (!is_embedding(g, a, c)) throw InputError("amalgamate: g is not an embedding A -> C");
    detail::AmalgamSearch search{spec, a, b, c, f, g, opt.size_bound, opt.seed};
    APCertificate cert = *search.run();
    if (cert.holds) {
        // the certificate must commute and re-verify
        if (!is_embedding(cert.r, b, cert.amalgam) || !is_embedding(cert.s, c, cert.amalgam) ||
            compose(cert.r, f) != compose(cert.s, g) || !is_member(spec, cert.amalgam))
            throw std::logic_error("amalgamate: produced a non-verifying certificate");
    }
    return cert;
}

// ---- inclusion pair types -------------------------------------------------

// An isomorphism type of a pair (B ⊆ C): stored as a canonical C together
// with the subset carrying B. `key` is the canonical code of C with the
// subset marked by an auxiliary unary symbol.
struct InclusionPair {
    FinStructure whole;     // C
    FinStructure part;      // induced B, relabeled to {1..|S|}
    std::vector<int> inclusion; // B -> C, ascending
    std::string key;
};

namespace detail {

inline std::string marked_code(const FinStructure& c, const std::vector<int>& subset) {
    std::vector<Symbol> symbols = c.sig->symbols;
    symbols.push_back({"@part", 1});
    SignatureRef marked_sig = make_signature(std::move(symbols));
    FinStructure m{marked_sig, c.size, {}};
    m.relations = c.relations;
    std::vector<Tuple> marks;
    for (int v : subset) marks.push_back({v});
    m.relations.push_back(std::move(marks));
    normalize_relations(m);
    return canonical_form(m).code;
}

} // namespace detail

// All inclusion pair types (B ⊊ C) with |C| <= bound, C in the class,
// ordered by (|C|, code(C), code(B), key). The empty B is included: its
// processing realizes JEP steps.
inline std::vector<InclusionPair> inclusion_pairs(const ClassSpec& spec, int bound) {
    std::vector<InclusionPair> out;
    std::set<std::string> seen;
    for (int n = 1; n <= bound; ++n) {
        for (const auto& c : generate_structures(spec, n)) {
            for (int k = 0; k < n; ++k) {
                detail::for_each_subset(n, k, [&](const std::vector<int>& subset) {
                    std::string key = detail::marked_code(c, subset);
                    if (!seen.insert(key).second) return;
                    auto [part, inc] = induced_substructure(c, subset);
                    out.push_back(InclusionPair{c, part, inc, key});
                });
                if (k == 0) { // for_each_subset skips k = 0
                    std::string key = detail::marked_code(c, {});
                    if (seen.insert(key).second)
                        out.push_back(InclusionPair{c, empty_structure(spec.sig), {}, key});
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const InclusionPair& x, const InclusionPair& y) {
        auto kx = std::make_tuple(x.whole.size, canonical_form(x.whole).code,
                                  canonical_form(x.part).code, x.key);
        auto ky = std::make_tuple(y.whole.size, canonical_form(y.whole).code,
                                  canonical_form(y.part).code, y.key);
        return kx < ky;
    });
    return out;
}

// ---- age class check ------------------------------------------------------

struct JepFailure {
    FinStructure left, right;
};

struct AgeReport {
    bool is_age_class = false;
    bool jep_holds = false;
    std::optional<JepFailure> jep_failure;
    std::vector<int> uninhabited_sizes; // sizes <= bound with no members
    int bound = 0;
};

inline AgeReport check_age_class(const ClassSpec& spec, int bound) {
    if (bound < 2) throw InputError("check_age_class: bound must be >= 2");
    AgeReport rep;
    rep.bound = bound;
    for (int n = 1; n <= bound; ++n)
        if (!class_inhabited_at(spec, n)) rep.uninhabited_sizes.push_back(n);

    rep.jep_holds = true;
    FinStructure empty = empty_structure(spec.sig);
    std::vector<FinStructure> reps;
    for (int n = 1; n <= bound && rep.jep_holds; ++n)
        for (const auto& s : generate_structures(spec, n)) reps.push_back(s);
    for (std::size_t i = 0; i < reps.size() && rep.jep_holds; ++i) {
        for (std::size_t j = i; j < reps.size() && rep.jep_holds; ++j) {
            AmalgamOptions opt;
            opt.size_bound = 2 * bound;
            APCertificate cert = amalgamate(spec, empty, reps[i], reps[j], {}, {}, opt);
            if (!cert.holds) {
                rep.jep_holds = false;
                rep.jep_failure = JepFailure{reps[i], reps[j]};
            }
        }
    }
    rep.is_age_class = rep.jep_holds && rep.uninhabited_sizes.empty();
    return rep;
}

// ---- AP check ------------------------------------------------------------

struct APReport {
    bool holds_at_bound = false;
    int triple_bound = 0;
    int amalgam_bound = 0;
    long triples_checked = 0;
    std::optional<APCertificate> failure;
};

inline APReport check_AP(const ClassSpec& spec, int triple_bound, int amalgam_bound) {
    if (triple_bound < 1 || amalgam_bound < 1) throw InputError("check_AP: bounds must be >= 1");
    APReport rep;
    rep.triple_bound = triple_bound;
    rep.amalgam_bound = amalgam_bound;

    auto pairs = inclusion_pairs(spec, triple_bound);
    // group by the A-part isomorphism type
    std::map<std::string, std::vector<const InclusionPair*>> groups;
    for (const auto& p : pairs) groups[canonical_form(p.part).code].push_back(&p);

    for (const auto& [acode, group] : groups) {
        const FinStructure a_rep = group.front()->part;
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i; j < group.size(); ++j) {
                const InclusionPair& pb = *group[i];
                const InclusionPair& pc = *group[j];
                // align both parts to a_rep
                auto hb = enumerate_embeddings(a_rep, pb.part);
                auto hc = enumerate_embeddings(a_rep, pc.part);
                // parts are isomorphic to a_rep, so bijections exist
                EmbMap fb, fc;
                for (const auto& m : hb)
                    if (static_cast<int>(m.size()) == pb.part.size) { fb = m; break; }
                for (const auto& m : hc)
                    if (static_cast<int>(m.size()) == pc.part.size) { fc = m; break; }
                EmbMap f = compose(pb.inclusion, fb);
                EmbMap g = compose(pc.inclusion, fc);
                AmalgamOptions opt;
                opt.size_bound = amalgam_bound;
                APCertificate cert = amalgamate(spec, a_rep, pb.whole, pc.whole, f, g, opt);
                ++rep.triples_checked;
                if (!cert.holds) {
                    rep.failure = std::move(cert);
                    rep.holds_at_bound = false;
                    return rep;
                }
            }
        }
    }
    rep.holds_at_bound = true;
    return rep;
}

} // namespace fraisse
