#include <doctest.h>

#include <random>

#include "fraisse/builtins.hpp"
#include "fraisse/degree.hpp"
#include "fraisse/expansion.hpp"

using namespace fraisse;

namespace {

ExpansionSpec ordered_graphs_expansion() {
    return make_expansion_spec("orderedgraphs", graphs_class(), ordered_graphs_class());
}

ExpansionSpec sets_with_p_expansion() {
    return make_expansion_spec("setswithp", pure_sets_class(), sets_with_p_class());
}

ExpansionSpec sets_to_lo_expansion() {
    return make_expansion_spec("setstolo", pure_sets_class(), linear_orders_class());
}

} // namespace

TEST_CASE("expansion spec validation") {
    CHECK_THROWS_AS(make_expansion_spec("bad", linear_orders_class(), graphs_class()), InputError);
    auto og = ordered_graphs_expansion();
    CHECK(og.base_symbols() == 1);
}

TEST_CASE("reduct") {
    auto og = ordered_graphs_expansion();
    // ordered edge: E both ways, 1 < 2
    auto oedge = make_structure(ordered_graph_signature(), 2, {{{1, 2}, {2, 1}}, {{1, 2}}});
    CHECK(reduct(og, oedge) == complete_graph(2));

    auto slo = sets_to_lo_expansion();
    CHECK(reduct(slo, linear_order(3)) == pure_set(3));
}

TEST_CASE("expansions_of: counts") {
    auto og = ordered_graphs_expansion();
    CHECK(expansions_of(og, complete_graph(2)).size() == 2);
    CHECK(expansions_of(og, path_graph(3)).size() == 6);
    CHECK(expansions_of(og, complete_graph(3)).size() == 6);

    auto swp = sets_with_p_expansion();
    CHECK(expansions_of(swp, pure_set(2)).size() == 4);

    auto slo = sets_to_lo_expansion();
    CHECK(expansions_of(slo, pure_set(3)).size() == 6);

    SUBCASE("reduct of every expansion is the original") {
        for (const auto& star : expansions_of(og, path_graph(3)))
            CHECK(reduct(og, star) == path_graph(3));
    }
    SUBCASE("identity expansion: linear orders over themselves") {
        auto idexp = make_expansion_spec("id", linear_orders_class(), linear_orders_class());
        for (int n = 1; n <= 4; ++n)
            CHECK(expansions_of(idexp, linear_order(n)).size() == 1);
    }
    SUBCASE("not a base member is an error") {
        CHECK_THROWS_AS(expansions_of(og, make_structure(graph_signature(), 2, {{{1, 2}}})),
                        InputError);
    }
}

TEST_CASE("pullback_expansion") {
    auto og = ordered_graphs_expansion();
    // B*: ordered path with order 2 < 3 < 1
    auto b_star = make_structure(ordered_graph_signature(), 3,
                                 {{{1, 2}, {2, 1}, {2, 3}, {3, 2}}, {{2, 3}, {2, 1}, {3, 1}}});
    REQUIRE(is_member(og.extended, b_star));

    SUBCASE("identity pullback is B* itself") {
        auto back = pullback_expansion(og, path_graph(3), {1, 2, 3}, b_star);
        CHECK(back == b_star);
    }

    SUBCASE("restriction of the order") {
        // f embeds the edge {1,2} of K2 onto vertices 1,2 of B*
        auto pulled = pullback_expansion(og, complete_graph(2), {1, 2}, b_star);
        // order on the image: 2 < 1, so pulled carries 2 < 1
        CHECK(pulled.relations[1] == std::vector<Tuple>{{2, 1}});
    }

    SUBCASE("functoriality: A(f, B(g, C*)) = A(g∘f, C*)") {
        std::mt19937 rng(5);
        auto c_stars = expansions_of(og, cycle_graph(4));
        auto ab = enumerate_embeddings(complete_graph(2), path_graph(3));
        auto bc = enumerate_embeddings(path_graph(3), cycle_graph(4));
        REQUIRE(!c_stars.empty());
        for (int trial = 0; trial < 20; ++trial) {
            const auto& c_star = c_stars[rng() % c_stars.size()];
            const auto& f = ab[rng() % ab.size()];
            const auto& g = bc[rng() % bc.size()];
            auto two_step = pullback_expansion(
                og, complete_graph(2), f,
                pullback_expansion(og, path_graph(3), g, c_star));
            auto one_step = pullback_expansion(og, complete_graph(2), compose(g, f), c_star);
            CHECK(two_step == one_step);
        }
    }
}

TEST_CASE("check_reasonable") {
    auto og = ordered_graphs_expansion();
    auto rep = check_reasonable(og, 3, true, 22);
    CHECK(rep.reasonable_at_bound);
    CHECK(rep.prefix_check_ran);
    CHECK(rep.reducts_are_members);
    CHECK(rep.age_coverage_equal);
    CHECK(rep.tops_mutually_embed);

    CHECK(check_reasonable(sets_to_lo_expansion(), 3, false).reasonable_at_bound);
    CHECK(check_reasonable(sets_with_p_expansion(), 3, false).reasonable_at_bound);
}

TEST_CASE("check_precompact") {
    auto og = ordered_graphs_expansion();
    auto rep = check_precompact(og, 3);
    for (const auto& e : rep.entries) {
        // n! orders on an n-vertex graph, all admissible
        long expect = 1;
        for (int i = 2; i <= e.a.size; ++i) expect *= i;
        CHECK(e.labeled_count == expect);
    }

    auto swp = check_precompact(sets_with_p_expansion(), 3);
    for (const auto& e : swp.entries) CHECK(e.labeled_count == (1 << e.a.size));

    auto idexp = make_expansion_spec("id", linear_orders_class(), linear_orders_class());
    for (const auto& e : check_precompact(idexp, 3).entries) CHECK(e.labeled_count == 1);
}

TEST_CASE("check_expP polarity") {
    SUBCASE("sets -> linear orders: witnesses of matching size") {
        auto rep = check_expP(sets_to_lo_expansion(), 4, 3);
        REQUIRE(!rep.verdicts.empty());
        for (const auto& v : rep.verdicts) {
            CHECK(v.status == "witness");
            REQUIRE(v.witness.has_value());
            CHECK(v.witness->size == v.a_star.size);
        }
    }

    SUBCASE("sets -> sets-with-P: the P-point is refuted") {
        auto rep = check_expP(sets_with_p_expansion(), 4, 1);
        REQUIRE(rep.verdicts.size() == 2); // P-point and plain point
        for (const auto& v : rep.verdicts) {
            bool has_p = !v.a_star.relations[0].empty();
            if (has_p) {
                CHECK(v.status == "refuted");
                CHECK(!v.refutation.empty());
            } else {
                // blocked by the all-P expansions; the structural refutation
                // rule is one-sided, so this is exhaustion, not a witness
                CHECK(v.status == "exhausted");
                REQUIRE(v.blocking_b_star.has_value());
                CHECK_FALSE(v.blocking_b_star->relations[0].empty());
            }
        }
    }

    SUBCASE("graphs -> ordered graphs: the ordered edge has witness K2") {
        auto rep = check_expP(ordered_graphs_expansion(), 3, 2);
        bool seen_ordered_edge = false;
        for (const auto& v : rep.verdicts) {
            if (v.a_star.size == 2 && !v.a_star.relations[0].empty()) {
                seen_ordered_edge = true;
                CHECK(v.status == "witness");
                REQUIRE(v.witness.has_value());
                CHECK(is_isomorphic(*v.witness, complete_graph(2)));
            }
        }
        CHECK(seen_ordered_edge);
    }
}

TEST_CASE("finite logic action") {
    auto og = ordered_graphs_expansion();
    auto star_prefix = flim_prefix(og.extended, 10, 0);
    REQUIRE(star_prefix.prefix.has_value());

    SUBCASE("inclusion gives the prefix's own expansion; depth-2 orbit covers both orders") {
        auto rep = finite_logic_action(og, *star_prefix.prefix, 2, {1, 2});
        FinStructure top = reduct(og, star_prefix.prefix->top());
        auto twos = induced(top, {1, 2});
        (void)twos;
        // the identity point is the pullback along the inclusion
        std::vector<int> initial{1, 2};
        auto a2 = induced(top, initial);
        CHECK(rep.point == pullback_expansion(og, a2, {1, 2}, star_prefix.prefix->top()));
        // both orderings of a 2-set are reachable in a generic enough prefix
        CHECK(rep.reachable.size() == rep.all_expansions.size());
        CHECK(rep.orbit_covers_all);
    }

    SUBCASE("all-P prefix: only the P-point is reachable at depth 1") {
        auto swp = sets_with_p_expansion();
        // hand-built prefix over sets-with-P where every point has P
        FlimPrefix allp;
        allp.spec = swp.extended;
        for (int n = 1; n <= 4; ++n) {
            std::vector<Tuple> ps;
            for (int v = 1; v <= n; ++v) ps.push_back({v});
            allp.chain.push_back(make_structure(unary_flag_signature(), n, {ps}));
        }
        validate_prefix(allp);
        auto rep = finite_logic_action(swp, allp, 1, {1});
        CHECK(rep.all_expansions.size() == 2);
        CHECK(rep.reachable.size() == 1);
        CHECK_FALSE(rep.orbit_covers_all); // non-minimality evidence
        CHECK(rep.reachable[0].relations[0] == std::vector<Tuple>{{1}});
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(finite_logic_action(og, *star_prefix.prefix, 2, {1, 1}), InputError);
    }
}

TEST_CASE("disjoint-union identity and consistency for K2") {
    auto og = ordered_graphs_expansion();
    auto star_prefix = flim_prefix(og.extended, 10, 0);
    REQUIRE(star_prefix.prefix.has_value());
    DegreeOptions opt;
    opt.max_k = 2;
    opt.b_bound = 3;
    opt.witness_bound = 4;
    opt.s = 3;
    auto rep = degree_equals_expansion_count(og, complete_graph(2), opt, *star_prefix.prefix);
    CHECK(rep.expansion_count == 2);
    CHECK(rep.aut_count == 2);
    CHECK(rep.structural_count == 1);
    CHECK(rep.occurring_types == 2);
    CHECK(rep.all_occurring_syndetic);
    CHECK(rep.partition_identity_ok);
    CHECK(rep.status == "consistent");
    REQUIRE(rep.degree.lower_confirmed.has_value());
    CHECK(*rep.degree.lower_confirmed == 2);
}

TEST_CASE("consistency for K1 and the sets->LO pair") {
    auto og = ordered_graphs_expansion();
    auto star_prefix = flim_prefix(og.extended, 8, 0);
    REQUIRE(star_prefix.prefix.has_value());
    DegreeOptions opt;
    opt.max_k = 1;
    opt.b_bound = 2;
    opt.witness_bound = 3;
    opt.s = 2;
    auto rep = degree_equals_expansion_count(og, complete_graph(1), opt, *star_prefix.prefix);
    CHECK(rep.expansion_count == 1);
    CHECK(rep.occurring_types == 1);
    CHECK(rep.status == "consistent");
    REQUIRE(rep.degree.upper_established_k.has_value());
    CHECK(*rep.degree.upper_established_k == 1);

    auto slo = sets_to_lo_expansion();
    auto slo_prefix = flim_prefix(slo.extended, 10, 0);
    REQUIRE(slo_prefix.prefix.has_value());
    DegreeOptions opt2;
    opt2.max_k = 2;
    opt2.b_bound = 2;
    opt2.witness_bound = 4;
    opt2.s = 3;
    auto rep2 = degree_equals_expansion_count(slo, pure_set(2), opt2, *slo_prefix.prefix);
    CHECK(rep2.expansion_count == 2);
    CHECK(rep2.occurring_types == 2);
    CHECK(rep2.all_occurring_syndetic);
    CHECK(rep2.status == "consistent");
}

TEST_CASE("cor 5.6 shadow: ExpP witnesses give syndetic expansion classes") {
    auto slo = sets_to_lo_expansion();
    auto expp = check_expP(slo, 3, 2);
    auto star_prefix = flim_prefix(slo.extended, 10, 0);
    REQUIRE(star_prefix.prefix.has_value());
    const auto& top_star = star_prefix.prefix->top();
    FinStructure top = reduct(slo, top_star);
    for (const auto& v : expp.verdicts) {
        if (v.status != "witness") continue;
        FinStructure a = reduct(slo, v.a_star);
        EmbBase base = make_emb_base(a, top);
        std::vector<int> cls;
        for (std::size_t i = 0; i < base.embs.size(); ++i)
            if (pullback_expansion(slo, a, base.embs[i], top_star) == v.a_star)
                cls.push_back(static_cast<int>(i));
        int reduced_s = std::max(a.size, 3 - (v.witness->size - a.size));
        CHECK(syndetic_at_horizon(slo.base, base, cls, reduced_s).syndetic);
    }
}

TEST_CASE("lemma 5.9 shadow: thickness inside the A*-class is trace thickness") {
    auto slo = sets_to_lo_expansion();
    auto star_prefix = flim_prefix(slo.extended, 8, 0);
    REQUIRE(star_prefix.prefix.has_value());
    REQUIRE(star_prefix.prefix->chain.size() >= 5);
    const FinStructure top_star = star_prefix.prefix->chain[4]; // 5 points
    FinStructure top = reduct(slo, top_star);

    FinStructure a = pure_set(2);
    FinStructure a_star = linear_order(2);
    EmbBase base = make_emb_base(a, top);             // all injections of a 2-set
    EmbBase base_star = make_emb_base(a_star, top_star); // increasing pairs only

    // X ranges over subsets of Emb(A*, K*): thick in the extended class iff
    // X is the trace of a thick subset of Emb(A, K). The maximal candidate
    // trace is X together with everything outside the A*-class, so one
    // thickness check decides the right side.
    std::map<EmbMap, int> star_index;
    for (std::size_t i = 0; i < base_star.embs.size(); ++i)
        star_index[base_star.embs[i]] = static_cast<int>(i);

    const int s = 3;
    std::size_t m = base_star.embs.size();
    REQUIRE(m <= 12);
    std::mt19937 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<int> x_star, x_in_base;
        for (std::size_t i = 0; i < m; ++i) {
            if (rng() % 2) continue;
            x_star.push_back(static_cast<int>(i));
        }
        std::vector<char> in_x(m, 0);
        for (int i : x_star) in_x[i] = 1;
        std::vector<int> t_max;
        for (std::size_t i = 0; i < base.embs.size(); ++i) {
            auto it = star_index.find(base.embs[i]);
            if (it == star_index.end()) t_max.push_back(static_cast<int>(i));
            else if (in_x[it->second]) t_max.push_back(static_cast<int>(i));
        }
        bool lhs = thick_at_horizon(slo.extended, base_star, x_star, s).thick;
        bool rhs = thick_at_horizon(slo.base, base, t_max, s).thick;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("expansion spec text format round trip") {
    auto og = ordered_graphs_expansion();
    auto j = expansion_spec_to_json(og);
    auto parsed = parse_expansion_spec(j);
    CHECK(parsed.spec.name == og.name);
    CHECK(parsed.spec.base.forbidden == og.base.forbidden);
    CHECK(parsed.spec.extended.forbidden == og.extended.forbidden);

    SUBCASE("misaligned alignment block rejected") {
        auto bad = j;
        bad["alignment"]["new_symbols"] = std::vector<std::string>{"Z"};
        CHECK_THROWS_AS(parse_expansion_spec(bad), ParseError);
    }
}
