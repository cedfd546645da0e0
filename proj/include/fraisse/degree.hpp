#pragma once

#include "fraisse/arrow.hpp"
#include "fraisse/expansion.hpp"
#include "fraisse/thick.hpp"

namespace fraisse {

struct DegreeOptions {
    int max_k = 3;        // candidate degrees: (k+1, k) instances for k = 1..max_k
    int b_bound = 3;      // every B up to this size needs a witness
    int witness_bound = 5; // C is scanned up to this size
    int s = 3;            // horizon for the syndetic lower evidence
    int jobs = 1;
};

struct DegreeUpperRow {
    FinStructure b;
    std::optional<FinStructure> witness;
};

struct DegreeUpperLevel {
    int k = 0;
    bool established = false; // every B <= b_bound has a witness C at bound
    std::vector<DegreeUpperRow> rows;
};

struct MonotonicityCheck {
    FinStructure sub;
    bool verified = false;
};

struct DegreeReport {
    FinStructure a;
    long aut_count = 1;
    DegreeOptions options;

    std::vector<DegreeUpperLevel> upper;
    std::optional<int> upper_established_k; // least k whose level established

    // lower evidence: the order-type coloring of Emb(A, horizon top)
    bool lower_ran = false;
    int lower_classes = 0;
    std::vector<bool> class_syndetic;
    std::optional<int> lower_confirmed; // = lower_classes when all classes syndetic

    std::optional<long> structural_upper; // upper_established_k / |Aut(A)| when exact
    std::vector<MonotonicityCheck> monotonicity;

    std::string status; // "established" | "inconclusive-at-bound" | "inconsistent"
};

// Upper evidence via (k+1,k) instances (the general (r,k) form reduces to
// these); lower evidence via a syndetic coloring of Emb(A, horizon).
inline DegreeReport degree_report(const ClassSpec& spec, const FinStructure& a,
                                  const DegreeOptions& opt = {},
                                  const std::optional<FinStructure>& horizon_top = std::nullopt) {
    if (!is_member(spec, a)) throw InputError("degree_report: A is not a class member");
    DegreeReport rep;
    rep.a = a;
    rep.options = opt;
    rep.aut_count = static_cast<long>(automorphisms(a).size());

    // candidate B list: class members embedding A, sizes |A|..b_bound
    std::vector<FinStructure> bs;
    for (int n = a.size; n <= opt.b_bound; ++n)
        for (const auto& b : generate_structures(spec, n))
            if (!enumerate_embeddings(a, b).empty()) bs.push_back(b);

    ArrowOptions aopt;
    aopt.jobs = opt.jobs;
    for (int k = 1; k <= opt.max_k && !rep.upper_established_k; ++k) {
        DegreeUpperLevel level;
        level.k = k;
        level.established = true;
        for (const auto& b : bs) {
            DegreeUpperRow row;
            row.b = b;
            auto w = find_arrow_witness(spec, b, a, k + 1, k, opt.witness_bound, aopt);
            row.witness = w.witness;
            if (!row.witness) level.established = false;
            level.rows.push_back(std::move(row));
        }
        if (level.established) rep.upper_established_k = k;
        rep.upper.push_back(std::move(level));
    }
    if (rep.upper_established_k && *rep.upper_established_k % rep.aut_count == 0)
        rep.structural_upper = *rep.upper_established_k / rep.aut_count;

    if (horizon_top) {
        rep.lower_ran = true;
        EmbBase base = make_emb_base(a, *horizon_top);
        auto [coloring, patterns] = order_type_coloring(base);
        rep.lower_classes = coloring.num_colors;
        rep.class_syndetic = syndetic_classes(spec, base, coloring, opt.s);
        bool all = rep.lower_classes > 0;
        for (bool s : rep.class_syndetic) all = all && s;
        if (all) {
            rep.lower_confirmed = rep.lower_classes;
        } else if (rep.lower_classes >= 1 && rep.lower_classes <= 6) {
            // coarsenings of the order-type coloring: the finest grouping
            // whose classes are all syndetic is the confirmed lower bound
            // (the one-block grouping always qualifies)
            int k0 = rep.lower_classes;
            std::vector<int> blocks(k0, 0);
            int best = 0;
            auto rec = [&](auto&& self, int i, int used) -> void {
                if (i == k0) {
                    if (used <= best) return;
                    Coloring merged = coloring;
                    for (int& c : merged.assignment) c = blocks[c - 1] + 1;
                    merged.num_colors = used;
                    auto flags = syndetic_classes(spec, base, merged, opt.s);
                    bool ok = true;
                    for (bool f : flags) ok = ok && f;
                    if (ok) best = used;
                    return;
                }
                for (int b = 0; b <= used && b < k0; ++b) {
                    blocks[i] = b;
                    self(self, i + 1, std::max(used, b + 1));
                }
            };
            rec(rec, 0, 0);
            if (best > 0) rep.lower_confirmed = best;
        }
    }

    // Ramsey-degree monotonicity: every proper induced substructure should
    // admit the same-level instances at the same bounds.
    if (rep.upper_established_k) {
        std::set<std::string> seen;
        for (int sz = 1; sz < a.size; ++sz) {
            detail::for_each_subset(a.size, sz, [&](const std::vector<int>& subset) {
                FinStructure sub = induced(a, subset);
                if (!seen.insert(canonical_form(sub).code).second) return;
                MonotonicityCheck check;
                check.sub = sub;
                check.verified = true;
                for (int n = sub.size; n <= opt.b_bound && check.verified; ++n)
                    for (const auto& b : generate_structures(spec, n)) {
                        if (enumerate_embeddings(sub, b).empty()) continue;
                        auto w = find_arrow_witness(spec, b, sub, *rep.upper_established_k + 1,
                                                    *rep.upper_established_k, opt.witness_bound,
                                                    aopt);
                        if (!w.witness) check.verified = false;
                        if (!check.verified) break;
                    }
                rep.monotonicity.push_back(std::move(check));
            });
        }
    }

    if (rep.upper_established_k && rep.lower_confirmed) {
        if (*rep.upper_established_k == *rep.lower_confirmed) rep.status = "established";
        else if (*rep.upper_established_k < *rep.lower_confirmed) rep.status = "inconsistent";
        else rep.status = "inconclusive-at-bound"; // lower evidence not tight
    } else {
        rep.status = "inconclusive-at-bound";
    }
    return rep;
}

// ---- Prop 5.8 consistency: degree vs expansion count ------------------------

struct ConsistencyReport {
    FinStructure a;
    long expansion_count = 0; // labeled expansions
    long aut_count = 1;
    std::optional<long> structural_count; // expansion_count / |Aut(A)| when exact

    // the pullback-type coloring of Emb(A, reduct of the expansion prefix)
    int occurring_types = 0;
    std::vector<bool> type_syndetic;
    bool all_occurring_syndetic = false;
    bool partition_identity_ok = false; // Emb(A,K) = disjoint union of Emb(A_i, K*)

    DegreeReport degree;
    std::string status; // "consistent" | "inconsistent" | "inconclusive-at-bound"
};

inline ConsistencyReport degree_equals_expansion_count(const ExpansionSpec& spec,
                                                       const FinStructure& a,
                                                       const DegreeOptions& opt,
                                                       const FlimPrefix& prefix_star) {
    ConsistencyReport rep;
    rep.a = a;
    auto stars = expansions_of(spec, a);
    rep.expansion_count = static_cast<long>(stars.size());
    rep.aut_count = static_cast<long>(automorphisms(a).size());
    if (rep.aut_count > 0 && rep.expansion_count % rep.aut_count == 0)
        rep.structural_count = rep.expansion_count / rep.aut_count;

    const FinStructure& top_star = prefix_star.top();
    FinStructure top = reduct(spec, top_star);
    EmbBase base = make_emb_base(a, top);

    // color each embedding by its pullback expansion
    std::map<std::vector<std::vector<Tuple>>, int> type_ids;
    std::vector<int> assignment(base.embs.size(), 0);
    std::vector<FinStructure> occurring;
    for (std::size_t i = 0; i < base.embs.size(); ++i) {
        FinStructure pulled = pullback_expansion(spec, a, base.embs[i], top_star);
        auto [it, fresh] = type_ids.emplace(pulled.relations, static_cast<int>(occurring.size()) + 1);
        if (fresh) occurring.push_back(pulled);
        assignment[i] = it->second;
    }
    rep.occurring_types = static_cast<int>(occurring.size());
    Coloring coloring{rep.occurring_types, assignment, base.fingerprint};

    rep.type_syndetic = syndetic_classes(spec.base, base, coloring, opt.s);
    rep.all_occurring_syndetic = rep.occurring_types > 0;
    for (bool s : rep.type_syndetic) rep.all_occurring_syndetic = rep.all_occurring_syndetic && s;

    // Prop 5.8's disjoint-union identity: the color class of each occurring
    // expansion equals its L*-embedding set into the expanded top; the
    // non-occurring expansions have empty embedding sets.
    rep.partition_identity_ok = true;
    for (const auto& a_star : stars) {
        std::vector<EmbMap> via_class;
        auto it = type_ids.find(a_star.relations);
        if (it != type_ids.end())
            for (int idx : coloring.color_class(it->second)) via_class.push_back(base.embs[idx]);
        std::vector<EmbMap> via_star = enumerate_embeddings(a_star, top_star);
        std::sort(via_class.begin(), via_class.end());
        std::sort(via_star.begin(), via_star.end());
        if (via_class != via_star) rep.partition_identity_ok = false;
    }

    DegreeOptions dopt = opt;
    dopt.max_k = std::max<long>(opt.max_k, rep.expansion_count);
    rep.degree = degree_report(spec.base, a, dopt, top);

    bool contradiction =
        (rep.degree.upper_established_k && *rep.degree.upper_established_k < rep.expansion_count) ||
        (rep.degree.lower_confirmed && *rep.degree.lower_confirmed > rep.expansion_count);
    if (contradiction || !rep.partition_identity_ok) {
        rep.status = "inconsistent";
    } else if (rep.occurring_types == rep.expansion_count && rep.all_occurring_syndetic) {
        rep.status = "consistent";
    } else {
        rep.status = "inconclusive-at-bound";
    }
    return rep;
}

} // namespace fraisse
