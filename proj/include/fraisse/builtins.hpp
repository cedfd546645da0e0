#pragma once

#include <optional>
#include <string>

#include "fraisse/class_spec.hpp"
#include "fraisse/generate.hpp"

namespace fraisse {

// ---- signatures --------------------------------------------------------

inline SignatureRef graph_signature() {
    static SignatureRef sig = make_signature({{"E", 2}});
    return sig;
}

inline SignatureRef order_signature() {
    static SignatureRef sig = make_signature({{"<", 2}});
    return sig;
}

inline SignatureRef set_signature() {
    static SignatureRef sig = make_signature({});
    return sig;
}

inline SignatureRef ordered_graph_signature() {
    static SignatureRef sig = make_signature({{"E", 2}, {"<", 2}});
    return sig;
}

inline SignatureRef unary_flag_signature() {
    static SignatureRef sig = make_signature({{"P", 1}});
    return sig;
}

// ---- structures --------------------------------------------------------

inline FinStructure pure_set(int n) { return make_structure(set_signature(), n, {}); }

inline FinStructure linear_order(int n) {
    std::vector<Tuple> lt;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) lt.push_back({i, j});
    return make_structure(order_signature(), n, {lt});
}

namespace detail {
inline FinStructure graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<Tuple> e;
    for (auto [u, v] : edges) {
        e.push_back({u, v});
        e.push_back({v, u});
    }
    return make_structure(graph_signature(), n, {e});
}
} // namespace detail

inline FinStructure complete_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) edges.push_back({i, j});
    return detail::graph_from_edges(n, edges);
}

inline FinStructure empty_graph(int n) { return detail::graph_from_edges(n, {}); }

inline FinStructure path_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) edges.push_back({i, i + 1});
    return detail::graph_from_edges(n, edges);
}

inline FinStructure cycle_graph(int n) {
    if (n < 3) throw InputError("cycle_graph: need n >= 3");
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) edges.push_back({i, i + 1});
    edges.push_back({n, 1});
    return detail::graph_from_edges(n, edges);
}

// Transitive tournament on n (over the tournament signature "E").
inline FinStructure transitive_tournament(int n) {
    std::vector<Tuple> e;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) e.push_back({i, j});
    return make_structure(graph_signature(), n, {e});
}

// ---- forbidden-pattern helpers ------------------------------------------

// All interpretations of the symbols in [first_sym, sig end) on the universe
// of `base`, keeping base's existing relations. Used to lift a forbidden
// pattern of a reduct language into the full language.
inline std::vector<FinStructure> all_decorations(const FinStructure& base, SignatureRef full_sig,
                                                 std::size_t first_new_sym) {
    std::vector<std::pair<int, Tuple>> slots;
    for (std::size_t s = first_new_sym; s < full_sig->symbols.size(); ++s) {
        int arity = full_sig->symbols[s].arity;
        Tuple t(arity, 1);
        if (base.size == 0) continue;
        while (true) {
            slots.emplace_back(static_cast<int>(s), t);
            int i = arity - 1;
            while (i >= 0 && t[i] == base.size) --i;
            if (i < 0) break;
            ++t[i];
            for (int j = i + 1; j < arity; ++j) t[j] = 1;
        }
    }
    std::vector<FinStructure> out;
    FinStructure cur{full_sig, base.size, {}};
    cur.relations.resize(full_sig->symbols.size());
    for (std::size_t s = 0; s < base.relations.size(); ++s) cur.relations[s] = base.relations[s];
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == slots.size()) {
            FinStructure cand = cur;
            normalize_relations(cand);
            out.push_back(std::move(cand));
            return;
        }
        self(self, i + 1);
        cur.relations[slots[i].first].push_back(slots[i].second);
        self(self, i + 1);
        cur.relations[slots[i].first].pop_back();
    };
    rec(rec, 0);
    return out;
}

// Drops every pattern that already contains a smaller kept pattern induced,
// then deduplicates. Membership semantics are unchanged; the shipped lists
// just stay small.
inline std::vector<FinStructure> minimize_forbidden(SignatureRef sig,
                                                    std::vector<FinStructure> patterns) {
    std::sort(patterns.begin(), patterns.end(),
              [](const FinStructure& a, const FinStructure& b) { return a.size < b.size; });
    std::vector<FinStructure> kept;
    for (const auto& p : patterns) {
        ClassSpec partial = make_class_spec("partial", sig, kept);
        if (!is_member(partial, p)) continue; // contains a kept pattern (or duplicates one)
        kept.push_back(p);
    }
    return kept;
}

// ---- class library -------------------------------------------------------

// Graphs: one binary symbol E; irreflexivity and symmetry are enforced by
// two forbidden patterns (a loop point and a one-directional pair).
inline ClassSpec graphs_class() {
    FinStructure loop = make_structure(graph_signature(), 1, {{{1, 1}}});
    FinStructure asym = make_structure(graph_signature(), 2, {{{1, 2}}});
    return make_class_spec("graphs", graph_signature(), {loop, asym});
}

inline ClassSpec with_extra_forbidden(const ClassSpec& base, std::string name,
                                      std::vector<FinStructure> extra) {
    std::vector<FinStructure> all = base.forbidden;
    for (auto& f : extra) all.push_back(std::move(f));
    return make_class_spec(std::move(name), base.sig, all);
}

inline ClassSpec triangle_free_class() {
    return with_extra_forbidden(graphs_class(), "trianglefree", {complete_graph(3)});
}

inline ClassSpec c3c5_free_class() {
    return with_extra_forbidden(graphs_class(), "c3c5free", {complete_graph(3), cycle_graph(5)});
}

inline ClassSpec k3i3_free_class() {
    return with_extra_forbidden(graphs_class(), "k3i3free", {complete_graph(3), empty_graph(3)});
}

namespace detail {
inline std::vector<FinStructure> strict_order_patterns(SignatureRef sig, bool forbid_3cycle) {
    FinStructure refl = make_structure(sig, 1, {{{1, 1}}});
    FinStructure none = make_structure(sig, 2, {});
    FinStructure both = make_structure(sig, 2, {{{1, 2}, {2, 1}}});
    std::vector<FinStructure> out{refl, none, both};
    if (forbid_3cycle) out.push_back(make_structure(sig, 3, {{{1, 2}, {2, 3}, {3, 1}}}));
    return out;
}
} // namespace detail

inline ClassSpec linear_orders_class() {
    return make_class_spec("linearorders", order_signature(),
                           detail::strict_order_patterns(order_signature(), true));
}

inline ClassSpec tournaments_class() {
    return make_class_spec("tournaments", graph_signature(),
                           detail::strict_order_patterns(graph_signature(), false));
}

inline ClassSpec pure_sets_class() { return make_class_spec("puresets", set_signature(), {}); }

inline ClassSpec sets_with_p_class() {
    return make_class_spec("setswithp", unary_flag_signature(), {});
}

// Ordered graphs: graphs expanded by a linear order. The forbidden list is
// every decoration of a graph pattern by an order part and vice versa,
// minimized.
inline ClassSpec ordered_graphs_class() {
    SignatureRef sig = ordered_graph_signature();
    std::vector<FinStructure> patterns;
    // graph patterns, decorated by all order parts (symbol 1 is "<")
    for (const auto& f : graphs_class().forbidden) {
        FinStructure lifted{sig, f.size, {f.relations[0], {}}};
        for (auto& d : all_decorations(lifted, sig, 1)) patterns.push_back(std::move(d));
    }
    // order patterns, decorated by all edge parts; all_decorations fills
    // trailing symbols, so decorate over a (<, E) view and swap back
    SignatureRef rev = make_signature({{"<", 2}, {"E", 2}});
    for (const auto& f : linear_orders_class().forbidden) {
        FinStructure over_rev{rev, f.size, {f.relations[0], {}}};
        for (auto& d : all_decorations(over_rev, rev, 1)) {
            FinStructure fixed{sig, d.size, {d.relations[1], d.relations[0]}};
            normalize_relations(fixed);
            patterns.push_back(std::move(fixed));
        }
    }
    return make_class_spec("orderedgraphs", sig, minimize_forbidden(sig, patterns));
}

// ---- named lookup --------------------------------------------------------

inline std::vector<std::string> builtin_class_names() {
    return {"graphs",       "trianglefree", "c3c5free",     "k3i3free", "linearorders",
            "puresets",     "tournaments",  "orderedgraphs", "setswithp"};
}

inline std::optional<ClassSpec> builtin_class(const std::string& name) {
    if (name == "graphs") return graphs_class();
    if (name == "trianglefree") return triangle_free_class();
    if (name == "c3c5free") return c3c5_free_class();
    if (name == "k3i3free") return k3i3_free_class();
    if (name == "linearorders") return linear_orders_class();
    if (name == "puresets") return pure_sets_class();
    if (name == "tournaments") return tournaments_class();
    if (name == "orderedgraphs") return ordered_graphs_class();
    if (name == "setswithp") return sets_with_p_class();
    return std::nullopt;
}

// Named structures: lo6, k3, c5, p4, i2 (empty graph), set3, tt3.
inline std::optional<FinStructure> builtin_structure(const std::string& name) {
    auto split = [&](const std::string& prefix) -> std::optional<int> {
        if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
            return std::nullopt;
        for (std::size_t i = prefix.size(); i < name.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
        return std::stoi(name.substr(prefix.size()));
    };
    if (auto n = split("lo")) return linear_order(*n);
    if (auto n = split("set")) return pure_set(*n);
    if (auto n = split("tt")) return transitive_tournament(*n);
    if (auto n = split("k")) return complete_graph(*n);
    if (auto n = split("c")) return cycle_graph(*n);
    if (auto n = split("p")) return path_graph(*n);
    if (auto n = split("i")) return empty_graph(*n);
    return std::nullopt;
}

} // namespace fraisse
