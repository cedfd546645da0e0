#pragma once

#include "fraisse/class_spec.hpp"
#include "fraisse/flim.hpp"
#include "fraisse/generate.hpp"
#include "fraisse/parallel.hpp"
#include "fraisse/thick.hpp"

namespace fraisse {

// An expansion class over a base class: the extended language contains the
// base language as a prefix, finitely many new symbols after it.
struct ExpansionSpec {
    std::string name;
    ClassSpec base;     // over L
    ClassSpec extended; // over L* >= L

    std::size_t base_symbols() const { return base.sig->symbols.size(); }
};

inline ExpansionSpec make_expansion_spec(std::string name, ClassSpec base, ClassSpec extended) {
    if (!signature_prefix_of(*base.sig, *extended.sig))
        throw InputError("expansion spec '" + name +
                         "': base signature is not a prefix of the extended one");
    return ExpansionSpec{std::move(name), std::move(base), std::move(extended)};
}

// Throws away the new-symbol relations; the L-relations survive verbatim.
inline FinStructure reduct(const ExpansionSpec& spec, const FinStructure& star) {
    if (!same_signature(star.sig, spec.extended.sig))
        throw InputError("reduct: structure is not over the extended signature");
    FinStructure out{spec.base.sig, star.size, {}};
    out.relations.assign(star.relations.begin(),
                         star.relations.begin() + static_cast<long>(spec.base_symbols()));
    return out;
}

// All labeled expansions of A: extended-class members on A's own universe
// whose reduct equals A, in deterministic order. Built a vertex at a time
// so that forbidden patterns prune early (membership is hereditary).
inline std::vector<FinStructure> expansions_of(const ExpansionSpec& spec, const FinStructure& a) {
    if (!same_signature(a.sig, spec.base.sig))
        throw InputError("expansions_of: structure is not over the base signature");
    if (!is_member(spec.base, a)) throw InputError("expansions_of: not a base class member");

    FinStructure cur{spec.extended.sig, a.size, {}};
    cur.relations.resize(spec.extended.sig->symbols.size());
    for (std::size_t s = 0; s < spec.base_symbols(); ++s) cur.relations[s] = a.relations[s];

    std::vector<FinStructure> out;
    if (a.size == 0) {
        if (is_member(spec.extended, cur)) out.push_back(cur);
        return out;
    }

    // new-symbol tuples grouped by the highest vertex they mention
    std::vector<std::vector<std::pair<int, Tuple>>> slots_by_vertex(a.size + 1);
    for (std::size_t s = spec.base_symbols(); s < spec.extended.sig->symbols.size(); ++s) {
        int arity = spec.extended.sig->symbols[s].arity;
        Tuple t(arity, 1);
        while (true) {
            int mx = *std::max_element(t.begin(), t.end());
            slots_by_vertex[mx].emplace_back(static_cast<int>(s), t);
            int i = arity - 1;
            while (i >= 0 && t[i] == a.size) --i;
            if (i < 0) break;
            ++t[i];
            for (int j = i + 1; j < arity; ++j) t[j] = 1;
        }
    }

    // decide the slots of vertex v, then check every forbidden pattern that
    // v completes, then recurse to v+1
    auto decide_vertex = [&](auto&& self, int v) -> void {
        if (v > a.size) {
            FinStructure cand = cur;
            normalize_relations(cand);
            out.push_back(std::move(cand));
            return;
        }
        const auto& slots = slots_by_vertex[v];
        auto rec = [&](auto&& inner, std::size_t i) -> void {
            if (i == slots.size()) {
                FinStructure snapshot{spec.extended.sig, v, {}};
                snapshot.relations.resize(cur.relations.size());
                for (std::size_t s = 0; s < cur.relations.size(); ++s)
                    for (const auto& t : cur.relations[s]) {
                        bool inside = true;
                        for (int x : t)
                            if (x > v) { inside = false; break; }
                        if (inside) snapshot.relations[s].push_back(t);
                    }
                normalize_relations(snapshot);
                if (is_member_incremental(spec.extended, snapshot, v)) self(self, v + 1);
                return;
            }
            inner(inner, i + 1);
            cur.relations[slots[i].first].push_back(slots[i].second);
            inner(inner, i + 1);
            cur.relations[slots[i].first].pop_back();
        };
        rec(rec, 0);
    };
    decide_vertex(decide_vertex, 1);

    std::sort(out.begin(), out.end(), [](const FinStructure& x, const FinStructure& y) {
        return x.relations < y.relations;
    });
    return out;
}

// The unique expansion A(f, B*) making f an embedding into B*: new-symbol
// relations pulled back along f.
inline FinStructure pullback_expansion(const ExpansionSpec& spec, const FinStructure& a,
                                       const EmbMap& f, const FinStructure& b_star) {
    if (!same_signature(b_star.sig, spec.extended.sig))
        throw InputError("pullback_expansion: B* is not over the extended signature");
    FinStructure b = reduct(spec, b_star);
    if (!is_embedding(f, a, b)) throw InputError("pullback_expansion: f is not an L-embedding");

    FinStructure out{spec.extended.sig, a.size, {}};
    out.relations.resize(spec.extended.sig->symbols.size());
    for (std::size_t s = 0; s < spec.base_symbols(); ++s) out.relations[s] = a.relations[s];
    for (std::size_t s = spec.base_symbols(); s < spec.extended.sig->symbols.size(); ++s) {
        int arity = spec.extended.sig->symbols[s].arity;
        if (a.size == 0) continue;
        Tuple t(arity, 1);
        while (true) {
            Tuple img(arity);
            for (int j = 0; j < arity; ++j) img[j] = f[t[j] - 1];
            if (b_star.has_tuple(static_cast<int>(s), img)) out.relations[s].push_back(t);
            int i = arity - 1;
            while (i >= 0 && t[i] == a.size) --i;
            if (i < 0) break;
            ++t[i];
            for (int j = i + 1; j < arity; ++j) t[j] = 1;
        }
    }
    normalize_relations(out);
    // f is now an L*-embedding by construction; keep the check cheap but on
    if (!is_embedding(f, out, b_star))
        throw std::logic_error("pullback_expansion: pullback is not an L*-embedding");
    return out;
}

// ---- reasonable ------------------------------------------------------------

struct ReasonableFailure {
    FinStructure a, b;
    EmbMap f;
    FinStructure a_star;
};

struct ReasonableReport {
    bool reasonable_at_bound = false;
    int bound = 0;
    long instances = 0;
    std::optional<ReasonableFailure> failure;
    // prefix-scale cross-check: the reduct of an extended-class prefix
    // against a base-class prefix
    bool reducts_are_members = true;
    bool age_coverage_equal = true;
    bool tops_mutually_embed = true;
    bool prefix_check_ran = false;
};

// For every f: A -> B (sizes <= bound) and every expansion A*, some
// expansion B* must make f an L*-embedding.
inline ReasonableReport check_reasonable(const ExpansionSpec& spec, int bound,
                                         bool prefix_check = true, int prefix_steps = 12,
                                         unsigned seed = 0) {
    if (bound < 1) throw InputError("check_reasonable: bound must be >= 1");
    ReasonableReport rep;
    rep.bound = bound;
    for (int bsize = 1; bsize <= bound && !rep.failure; ++bsize) {
        for (const auto& b : generate_structures(spec.base, bsize)) {
            auto b_stars = expansions_of(spec, b);
            for (int asize = 0; asize <= bsize && !rep.failure; ++asize) {
                for (const auto& a : generate_structures(spec.base, asize)) {
                    auto a_stars = expansions_of(spec, a);
                    for (const auto& f : enumerate_embeddings(a, b)) {
                        for (const auto& a_star : a_stars) {
                            ++rep.instances;
                            bool found = false;
                            for (const auto& b_star : b_stars) {
                                if (pullback_expansion(spec, a, f, b_star) == a_star) {
                                    found = true;
                                    break;
                                }
                            }
                            if (!found) {
                                rep.failure = ReasonableFailure{a, b, f, a_star};
                                break;
                            }
                        }
                        if (rep.failure) break;
                    }
                    if (rep.failure) break;
                }
            }
            if (rep.failure) break;
        }
    }
    rep.reasonable_at_bound = !rep.failure;

    if (prefix_check) {
        FlimOptions fopt;
        fopt.amalgam_bound = 80;
        auto star_prefix = flim_prefix(spec.extended, prefix_steps, seed, fopt);
        auto base_prefix = flim_prefix(spec.base, prefix_steps, seed, fopt);
        if (star_prefix.prefix && base_prefix.prefix) {
            rep.prefix_check_ran = true;
            std::vector<FinStructure> reduct_chain;
            for (const auto& m : star_prefix.prefix->chain) {
                FinStructure red = reduct(spec, m);
                if (!is_member(spec.base, red)) rep.reducts_are_members = false;
                reduct_chain.push_back(std::move(red));
            }
            const FinStructure& red_top = reduct_chain.back();
            const FinStructure& base_top = base_prefix.prefix->top();
            // age coverage at small sizes
            for (int n = 1; n <= std::min(bound, 3) && rep.age_coverage_equal; ++n) {
                for (const auto& t : generate_structures(spec.base, n)) {
                    bool in_red = !enumerate_embeddings(t, red_top).empty();
                    bool in_base = !enumerate_embeddings(t, base_top).empty();
                    if (in_red != in_base) rep.age_coverage_equal = false;
                }
            }
            // mutual cofinality evidence: a mid-chain member of each side
            // embeds into the other top (full tops can be large; embedding
            // search on a capped member keeps this bounded)
            auto capped = [](const std::vector<FinStructure>& chain) -> const FinStructure& {
                std::size_t pick = 0;
                for (std::size_t i = 0; i < chain.size(); ++i)
                    if (chain[i].size <= 12) pick = i;
                return chain[pick];
            };
            const FinStructure& red_mid = capped(reduct_chain);
            const FinStructure& base_mid = capped(base_prefix.prefix->chain);
            if (!find_embedding_pinned(red_mid, base_top, {}) ||
                !find_embedding_pinned(base_mid, red_top, {}))
                rep.tops_mutually_embed = false;
        }
    }
    return rep;
}

// ---- precompact ------------------------------------------------------------

struct PrecompactEntry {
    FinStructure a;
    long labeled_count = 0;
    long iso_count = 0;
};

struct PrecompactReport {
    int bound = 0;
    std::vector<PrecompactEntry> entries; // per base representative, sizes 1..bound
};

inline PrecompactReport check_precompact(const ExpansionSpec& spec, int bound) {
    if (bound < 1) throw InputError("check_precompact: bound must be >= 1");
    PrecompactReport rep;
    rep.bound = bound;
    for (int n = 1; n <= bound; ++n) {
        for (const auto& a : generate_structures(spec.base, n)) {
            PrecompactEntry e;
            e.a = a;
            auto stars = expansions_of(spec, a);
            e.labeled_count = static_cast<long>(stars.size());
            std::set<std::string> codes;
            for (const auto& s : stars) codes.insert(canonical_form(s).code);
            e.iso_count = static_cast<long>(codes.size());
            rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

// ---- expansion property -----------------------------------------------------

struct ExpPVerdict {
    FinStructure a_star;
    std::string status; // "witness" | "refuted" | "exhausted"
    std::optional<FinStructure> witness;           // status == "witness"
    std::optional<FinStructure> blocking_b;        // per-size blocking example
    std::optional<FinStructure> blocking_b_star;   // expansion of it avoiding A*
    std::string refutation;                        // status == "refuted"
};

struct ExpPReport {
    int witness_bound = 0;
    int target_bound = 0;
    std::vector<ExpPVerdict> verdicts;
};

namespace detail {

inline bool has_new_symbol_tuple(const ExpansionSpec& spec, const FinStructure& star) {
    for (std::size_t s = spec.base_symbols(); s < star.relations.size(); ++s)
        if (!star.relations[s].empty()) return true;
    return false;
}

// The all-empty expansion of every base member is in K* iff no forbidden
// pattern of K* with empty new-symbol part has its reduct inside the base
// class. When that holds and A* mentions a new symbol, no B can witness
// ExpP for A*: its trivial expansion embeds no such A*.
inline std::optional<std::string> trivial_expansion_refutation(const ExpansionSpec& spec,
                                                               const FinStructure& a_star) {
    if (!has_new_symbol_tuple(spec, a_star)) return std::nullopt;
    for (const auto& fstar : spec.extended.forbidden) {
        if (has_new_symbol_tuple(spec, fstar)) continue;
        if (is_member(spec.base, reduct(spec, fstar))) return std::nullopt;
    }
    return "the all-empty expansion of any base member is in the extended class and embeds no "
           "structure interpreting a new symbol";
}

} // namespace detail

struct ExpPOptions {
    int jobs = 1;
};

// For each expansion A* of a base representative up to target_bound: search
// B in the base class up to witness_bound such that every expansion of B
// embeds A*.
inline ExpPReport check_expP(const ExpansionSpec& spec, int witness_bound, int target_bound = 0,
                             const ExpPOptions& opt = {}) {
    if (witness_bound < 1) throw InputError("check_expP: bound must be >= 1");
    if (target_bound <= 0) target_bound = std::min(witness_bound, 3);
    ExpPReport rep;
    rep.witness_bound = witness_bound;
    rep.target_bound = target_bound;

    std::vector<FinStructure> targets;
    std::set<std::string> seen;
    for (int n = 1; n <= target_bound; ++n)
        for (const auto& a : generate_structures(spec.base, n))
            for (const auto& a_star : expansions_of(spec, a))
                if (seen.insert(canonical_form(a_star).code).second) targets.push_back(a_star);

    for (const auto& a_star : targets) {
        ExpPVerdict v;
        v.a_star = a_star;
        bool decided = false;
        for (int n = a_star.size; n <= witness_bound && !decided; ++n) {
            auto reps = generate_structures(spec.base, n);
            // parallel over candidate B, deterministic first-witness merge
            struct Outcome {
                bool witness = false;
                std::optional<FinStructure> blocker;
            };
            auto outcomes = parallel_map<Outcome>(reps.size(), opt.jobs, [&](std::size_t i) {
                Outcome o;
                o.witness = true;
                for (const auto& b_star : expansions_of(spec, reps[i])) {
                    if (enumerate_embeddings(a_star, b_star).empty()) {
                        o.witness = false;
                        o.blocker = b_star;
                        break;
                    }
                }
                return o;
            });
            for (std::size_t i = 0; i < reps.size(); ++i) {
                if (outcomes[i].witness) {
                    v.status = "witness";
                    v.witness = reps[i];
                    decided = true;
                    break;
                }
                if (!v.blocking_b) {
                    v.blocking_b = reps[i];
                    v.blocking_b_star = outcomes[i].blocker;
                }
            }
        }
        if (!decided) {
            if (auto why = detail::trivial_expansion_refutation(spec, a_star)) {
                v.status = "refuted";
                v.refutation = *why;
            } else {
                v.status = "exhausted";
            }
        }
        rep.verdicts.push_back(std::move(v));
    }
    return rep;
}

// ---- finite logic action ----------------------------------------------------

struct LogicActionReport {
    FinStructure point;                    // A_m(g, top*)
    std::vector<FinStructure> reachable;   // all depth-m pullback expansions
    std::vector<FinStructure> all_expansions; // expansions_of(A_m)
    bool orbit_covers_all = false;         // reachable == all (minimality evidence)
};

// The depth-m point of the logic action along a partial isomorphism g of
// the reduct prefix: the pullback expansion A_m(g, top*). The reachable set
// over all partial isomorphisms at depth m approximates the orbit closure.
inline LogicActionReport finite_logic_action(const ExpansionSpec& spec,
                                             const FlimPrefix& prefix_star, int m,
                                             const EmbMap& g) {
    const FinStructure& top_star = prefix_star.top();
    FinStructure top = reduct(spec, top_star);
    if (m < 0 || m > top.size) throw InputError("finite_logic_action: depth out of range");
    std::vector<int> initial(m);
    for (int v = 1; v <= m; ++v) initial[v - 1] = v;
    FinStructure a_m = induced(top, initial);
    if (!is_embedding(g, a_m, top))
        throw InputError("finite_logic_action: g is not a partial isomorphism at depth m");

    LogicActionReport rep;
    rep.point = pullback_expansion(spec, a_m, g, top_star);
    std::set<std::vector<std::vector<Tuple>>> seen;
    for (const auto& h : enumerate_embeddings(a_m, top)) {
        FinStructure pt = pullback_expansion(spec, a_m, h, top_star);
        if (seen.insert(pt.relations).second) rep.reachable.push_back(pt);
    }
    rep.all_expansions = expansions_of(spec, a_m);
    rep.orbit_covers_all = rep.reachable.size() == rep.all_expansions.size();
    return rep;
}

// ---- expansion spec text format ---------------------------------------------

struct ParsedExpansionSpec {
    ExpansionSpec spec;
    std::vector<std::string> warnings;
};

inline ParsedExpansionSpec parse_expansion_spec(const Json& j,
                                                const std::string& where = "expansion") {
    if (!j.is_object()) throw ParseError(where, "expected an object");
    detail::reject_unknown_fields(j, {"name", "base", "extended", "alignment"}, where);
    const Json& jn = detail::require_field(j, "name", where);
    if (!jn.is_string()) throw ParseError(where + ".name", "expected a string");
    auto base = parse_class_spec(detail::require_field(j, "base", where), where + ".base");
    auto extended =
        parse_class_spec(detail::require_field(j, "extended", where), where + ".extended");
    if (j.contains("alignment")) {
        const Json& ja = j["alignment"];
        detail::reject_unknown_fields(ja, {"base_symbols", "new_symbols"}, where + ".alignment");
        std::vector<std::string> names;
        for (const auto& s : extended.spec.sig->symbols) names.push_back(s.name);
        std::size_t nb = base.spec.sig->symbols.size();
        if (ja.contains("base_symbols")) {
            auto listed = ja["base_symbols"].get<std::vector<std::string>>();
            if (listed != std::vector<std::string>(names.begin(), names.begin() + nb))
                throw ParseError(where + ".alignment.base_symbols",
                                 "does not match the leading extended symbols");
        }
        if (ja.contains("new_symbols")) {
            auto listed = ja["new_symbols"].get<std::vector<std::string>>();
            if (listed != std::vector<std::string>(names.begin() + nb, names.end()))
                throw ParseError(where + ".alignment.new_symbols",
                                 "does not match the trailing extended symbols");
        }
    }
    ParsedExpansionSpec out{
        make_expansion_spec(jn.get<std::string>(), std::move(base.spec), std::move(extended.spec)),
        {}};
    for (auto& w : base.warnings) out.warnings.push_back(w);
    for (auto& w : extended.warnings) out.warnings.push_back(w);
    return out;
}

inline Json expansion_spec_to_json(const ExpansionSpec& spec) {
    Json alignment;
    std::vector<std::string> base_names, new_names;
    for (std::size_t i = 0; i < spec.extended.sig->symbols.size(); ++i) {
        const auto& n = spec.extended.sig->symbols[i].name;
        if (i < spec.base_symbols()) base_names.push_back(n);
        else new_names.push_back(n);
    }
    alignment["base_symbols"] = base_names;
    alignment["new_symbols"] = new_names;
    return Json{{"name", spec.name},
                {"base", class_spec_to_json(spec.base)},
                {"extended", class_spec_to_json(spec.extended)},
                {"alignment", alignment}};
}

} // namespace fraisse
