#include <doctest.h>

#include <optional>

#include "hopfian/classify.hpp"
#include "hopfian/errors.hpp"
#include "hopfian/oracle.hpp"
#include "hopfian/primes.hpp"

using namespace hopfian;

namespace {

Rank1CyclicParams const_params(i64 m, i64 k, i64 j) {
    Rank1CyclicParams p;
    p.m = NatFamily::constant(m);
    p.k = NatFamily::constant(k);
    p.j = NatFamily::constant(j);
    return p;
}

GroupDescriptor single_cyclic(const Rank1CyclicParams& params, const std::string& label) {
    GroupDescriptor g;
    SummandEntry e;
    BDescriptor b;
    b.cyclic = params;
    b.matrix = params.matrix();
    e.payload = b;
    e.label = label;
    g.summands.push_back(e);
    return g;
}

}  // namespace

TEST_CASE("the concrete rank-1 model realizes the declared invariants") {
    Rank1Model M = build_rank1_model(2, 1, 1, 2);
    CHECK(M.e() == 2);
    CHECK(M.sigma() == 5);
    CHECK(M.group.structure() == GroupStructure{1, {4}});
    CHECK(M.group.element_order(M.t()) == ExtNat::of(4));
    CHECK(M.group.p_height_sequence(M.z(), 2, 3) ==
          std::vector<ExtNat>{ExtNat::of(1), ExtNat::of(4), ExtNat::of(5)});

    Rank1Model N = build_rank1_model(3, 0, 1, 1);
    CHECK(N.group.structure() == GroupStructure{1, {3}});
    CHECK(N.group.p_height_sequence(N.z(), 3, 3) ==
          std::vector<ExtNat>{ExtNat::of(0), ExtNat::of(2), ExtNat::of(3)});

    SUBCASE("height jumps land exactly at the jump position") {
        Rank1Model W = build_rank1_model(2, 0, 3, 2);
        auto hs = W.group.p_height_sequence(W.z(), 2, 5);
        CHECK(hs == std::vector<ExtNat>{ExtNat::of(0), ExtNat::of(1), ExtNat::of(2),
                                        ExtNat::of(5), ExtNat::of(6)});
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(build_rank1_model(4, 0, 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(build_rank1_model(2, -1, 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(build_rank1_model(2, 0, 0, 1), std::invalid_argument);
        CHECK_THROWS_AS(build_rank1_model(2, 30, 18, 1), CapExceeded);
    }
}

TEST_CASE("case endomorphisms act by the matching power of p") {
    SUBCASE("small jump gap selects the first case") {
        Rank1Model M = build_rank1_model(2, 0, 2, 1);
        CHECK(case_action_exponent(M, EndoCase::Case1) == 1);
        CHECK_THROWS_AS(case_action_exponent(M, EndoCase::Case2), CaseMismatch);
        Endomorphism f = case_endomorphism(M, EndoCase::Case1);
        CHECK(M.group.is_zero(M.group.apply(f, M.z())));
        CHECK(M.group.apply(f, M.t()) == M.group.scale(2, M.t()));
        CHECK_THROWS_AS(case_endomorphism(M, EndoCase::Case2), CaseMismatch);
    }
    SUBCASE("small jump position selects the second case") {
        Rank1Model M = build_rank1_model(2, 1, 2, 3);
        CHECK(case_action_exponent(M, EndoCase::Case2) == 2);
        CHECK_THROWS_AS(case_action_exponent(M, EndoCase::Case1), CaseMismatch);
        Endomorphism f = case_endomorphism(M, EndoCase::Case2);
        CHECK(M.group.is_zero(M.group.apply(f, M.z())));
        CHECK(M.group.apply(f, M.t()) == M.group.scale(4, M.t()));
    }
    SUBCASE("equal parameters admit both cases") {
        Rank1Model M = build_rank1_model(3, 0, 2, 2);
        CHECK(case_action_exponent(M, EndoCase::Case1) == 2);
        CHECK(case_action_exponent(M, EndoCase::Case2) == 2);
        CHECK_NOTHROW(case_endomorphism(M, EndoCase::Case1));
        CHECK_NOTHROW(case_endomorphism(M, EndoCase::Case2));
    }
}

TEST_CASE("kernel chains of the case endomorphisms") {
    SUBCASE("restricted to torsion the index is exactly ceil(e/l)") {
        for (i64 p : {2LL, 3LL})
            for (i64 m = 0; m <= 1; ++m)
                for (i64 k = 1; k <= 2; ++k)
                    for (i64 j = 1; j <= 2; ++j) {
                        Rank1Model M = build_rank1_model(p, m, k, j);
                        if (j <= k)
                            CHECK(torsion_chain_index(M, EndoCase::Case1) ==
                                  ceil_div(M.e(), j));
                        if (k <= j)
                            CHECK(torsion_chain_index(M, EndoCase::Case2) ==
                                  ceil_div(M.e(), k));
                    }
    }
    SUBCASE("on the full model the free part feeds the chain one extra step") {
        Rank1Model M = build_rank1_model(2, 0, 2, 1);
        Endomorphism f = case_endomorphism(M, EndoCase::Case1);
        CHECK(M.group.kernel_chain(f).stabilization_index == 3);  // 1 + ceil(e/j)
        CHECK(torsion_chain_index(M, EndoCase::Case1) == 2);

        Rank1Model N = build_rank1_model(2, 1, 2, 3);
        Endomorphism g = case_endomorphism(N, EndoCase::Case2);
        CHECK(N.group.kernel_chain(g).stabilization_index == 2);  // ceil(e/k), x dies at once
        CHECK(torsion_chain_index(N, EndoCase::Case2) == 2);

        Rank1Model B = build_rank1_model(2, 0, 2, 2);
        Endomorphism c1 = case_endomorphism(B, EndoCase::Case1);
        Endomorphism c2 = case_endomorphism(B, EndoCase::Case2);
        CHECK(B.group.kernel_chain(c1).stabilization_index == 2);
        CHECK(B.group.kernel_chain(c2).stabilization_index == 1);
    }
}

TEST_CASE("rational arithmetic") {
    CHECK(make_rational(6, -4) == Rational{-3, 2});
    CHECK(make_rational(0, 7) == Rational{0, 1});
    CHECK(rational_mul({2, 3}, {3, 4}) == Rational{1, 2});
    CHECK(rational_add({1, 2}, {1, 3}) == Rational{5, 6});
    CHECK(rational_add({1, 2}, {-1, 2}) == Rational{0, 1});
    CHECK(rational_valuation({8, 9}, 2) == 3);
    CHECK(rational_valuation({8, 9}, 3) == -2);
    CHECK(rational_valuation({8, 9}, 5) == 0);
    CHECK_THROWS_AS(make_rational(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(rational_valuation({0, 1}, 2), std::invalid_argument);
}

TEST_CASE("membership in subgroups of the rationals") {
    RationalGroup ints{NatFamily::constant(0)};
    CHECK(rational_contains(ints, {7, 1}));
    CHECK_FALSE(rational_contains(ints, {1, 2}));

    RationalGroup g{NatFamily::constant(0)};
    g.characteristic.set_exception(2, ExtNat::of(2));
    CHECK(rational_contains(g, {1, 4}));
    CHECK_FALSE(rational_contains(g, {1, 8}));
    CHECK_FALSE(rational_contains(g, {1, 3}));

    RationalGroup all{NatFamily::infinite()};
    CHECK(rational_contains(all, {1, 1024}));
    CHECK(rational_contains(all, {1, 30}));

    RationalGroup once{NatFamily::constant(1)};
    CHECK(rational_contains(once, {1, 6}));
    CHECK_FALSE(rational_contains(once, {1, 4}));
}

TEST_CASE("multiplication maps between rational groups") {
    RationalGroup ints{NatFamily::constant(0)};
    RationalGroup once{NatFamily::constant(1)};
    RationalGroup deep2{NatFamily::constant(0)};
    deep2.characteristic.set_exception(2, ExtNat::of(3));

    SUBCASE("into a larger group the identity works") {
        auto r = rational_hom(ints, once, {1, 1});
        CHECK(r == Rational{1, 1});
    }
    SUBCASE("shrinking every prime at once is impossible") {
        CHECK_FALSE(rational_hom(once, ints, {1, 1}).has_value());
        CHECK_FALSE(rational_hom(once, ints, {30, 1}).has_value());
        CHECK_FALSE(rational_witness_multiplier(once, ints).has_value());
    }
    SUBCASE("a finite deficit is paid by the multiplier") {
        CHECK_FALSE(rational_hom(deep2, ints, {4, 1}).has_value());
        CHECK(rational_hom(deep2, ints, {8, 1}) == Rational{8, 1});
        CHECK(rational_hom(deep2, ints, {24, 1}) == Rational{24, 1});
        auto w = rational_witness_multiplier(deep2, ints);
        CHECK(w == Rational{8, 1});
    }
    SUBCASE("the minimal multiplier into a containing group is one") {
        CHECK(rational_witness_multiplier(ints, once) == Rational{1, 1});
        CHECK(rational_witness_multiplier(ints, ints) == Rational{1, 1});
    }
    SUBCASE("an infinite source exponent cannot land on a finite target") {
        RationalGroup div2{NatFamily::constant(0)};
        div2.characteristic.set_exception(2, ExtNat::inf());
        CHECK_FALSE(rational_hom(div2, ints, {2, 1}).has_value());
        CHECK(rational_hom(ints, div2, {1, 1}).has_value());
    }
}

TEST_CASE("chain witnesses assemble shift endomorphisms") {
    SUBCASE("identical groups chain with unit multipliers") {
        std::vector<RationalGroup> gs(3, RationalGroup{NatFamily::constant(0)});
        ChainWitnessPlan plan = chain_witness(gs);
        CHECK(plan.k == 3);
        REQUIRE(plan.multipliers.size() == 2);
        REQUIRE(plan.trajectory.size() == 3);
        CHECK_FALSE(plan.trajectory.back().is_zero());
        for (std::size_t i = 0; i < plan.trajectory.size(); ++i)
            CHECK(rational_contains(gs[i], plan.trajectory[i]));
    }
    SUBCASE("descending divisibility pays powers of two") {
        RationalGroup a{NatFamily::constant(0)}, b = a, c = a;
        a.characteristic.set_exception(2, ExtNat::of(2));
        b.characteristic.set_exception(2, ExtNat::of(1));
        ChainWitnessPlan plan = chain_witness({a, b, c});
        CHECK(plan.k == 3);
        CHECK(plan.multipliers == std::vector<Rational>{{2, 1}, {2, 1}});
        for (std::size_t i = 0; i < plan.trajectory.size(); ++i) {
            CHECK_FALSE(plan.trajectory[i].is_zero());
            CHECK(rational_contains({i == 0 ? a.characteristic
                                     : i == 1 ? b.characteristic
                                              : c.characteristic},
                                    plan.trajectory[i]));
        }
    }
    SUBCASE("no multiplier, no witness") {
        RationalGroup once{NatFamily::constant(1)};
        RationalGroup ints{NatFamily::constant(0)};
        CHECK_THROWS_AS(chain_witness({once, ints}), NoWitness);
    }
    SUBCASE("the chain length cap is enforced") {
        std::vector<RationalGroup> gs(8, RationalGroup{NatFamily::constant(0)});
        CHECK_THROWS_AS(chain_witness(gs), CapExceeded);
        CHECK_NOTHROW(chain_witness(gs, 8));
    }
}

TEST_CASE("cross-checking verdicts against concrete groups") {
    OracleOptions opts;
    opts.prime_budget = 2;

    SUBCASE("a family of growing cyclic torsion, divisible past the jump") {
        Rank1CyclicParams p;
        p.m = NatFamily::constant(0);
        p.k = NatFamily::linear(1, 0);
        p.j = NatFamily::infinite();
        GroupDescriptor g = single_cyclic(p, "g");
        Classification c = classify(g);
        OracleReport rep = cross_check(g, c, opts);
        CHECK(rep.consistent);
        CHECK_FALSE(rep.checks.empty());
        bool mentions_cap = false;
        for (const std::string& t : rep.truncations)
            if (t.find("j =") != std::string::npos || t.find("cap") != std::string::npos)
                mentions_cap = true;
        CHECK(mentions_cap);
        for (const OracleCheck& ch : rep.checks) CHECK(ch.passed);
    }
    SUBCASE("growing torsion shapes are probed at successive primes") {
        GroupDescriptor g;
        SummandEntry e;
        TorsionDescriptor td;
        td.tail = ShapePattern{{{1, 0}}};
        e.payload = td;
        e.label = "t";
        g.summands.push_back(e);
        Classification c = classify(g);
        OracleReport rep = cross_check(g, c, opts);
        CHECK(rep.consistent);
    }
    SUBCASE("a tampered torsion verdict is caught") {
        GroupDescriptor g;
        SummandEntry e;
        TorsionDescriptor td;
        td.tail = ShapePattern{{{1, 0}}};
        e.payload = td;
        g.summands.push_back(e);
        Classification c = classify(g);
        c.torsion_sh = Verdict::Yes;
        CHECK_THROWS_AS(cross_check(g, c, opts), Inconsistent);
    }
    SUBCASE("a tampered uniform bound is caught by brute force") {
        GroupDescriptor g;
        SummandEntry e;
        TorsionDescriptor td;
        td.set_exception(2, PShape{{2}});
        e.payload = td;
        g.summands.push_back(e);
        Classification c = classify(g);
        REQUIRE(c.uniformly_sh == Verdict::Yes);
        for (Witness& w : c.witnesses)
            if (w.field == "all") w.value = 1;  // the true exponent is 2
        CHECK_THROWS_AS(cross_check(g, c, opts), Inconsistent);
    }
    SUBCASE("a small order budget turns brute force into a disclosed truncation") {
        GroupDescriptor g;
        SummandEntry e;
        TorsionDescriptor td;
        td.set_exception(2, PShape{{8}});  // order 2^8 above the tiny budget
        e.payload = td;
        g.summands.push_back(e);
        Classification c = classify(g);
        OracleOptions tiny = opts;
        tiny.order_budget = 16;
        OracleReport rep = cross_check(g, c, tiny);
        CHECK(rep.consistent);
        CHECK_FALSE(rep.truncations.empty());
    }
    SUBCASE("shift endomorphisms on repeated summands") {
        GroupDescriptor g;
        SummandEntry e;
        TorsionDescriptor td;
        td.set_exception(2, PShape{{1}});
        e.payload = td;
        e.multiplicity = ExtNat::inf();
        e.label = "w";
        g.summands.push_back(e);
        Classification c = classify(g);
        CHECK(cross_check(g, c, opts).consistent);
    }
    SUBCASE("divisible parts: quasicyclic truncations and rational chains") {
        GroupDescriptor g;
        g.divisible.prufer_ranks = NatFamily::constant(0);
        g.divisible.prufer_ranks.set_exception(2, ExtNat::of(1));
        Classification c = classify(g);
        CHECK(cross_check(g, c, opts).consistent);

        GroupDescriptor q;
        q.divisible.q_rank = ExtNat::inf();
        Classification cq = classify(q);
        CHECK(cross_check(q, cq, opts).consistent);
    }
    SUBCASE("the trivial group") {
        GroupDescriptor g;
        Classification c = classify(g);
        OracleReport rep = cross_check(g, c, opts);
        CHECK(rep.consistent);
    }
    SUBCASE("invalid descriptors are rejected before any checking") {
        GroupDescriptor g;
        SummandEntry e;
        BDescriptor b;
        b.cyclic = const_params(0, 1, 0);
        e.payload = b;
        e.label = "bad";
        g.summands.push_back(e);
        Classification c;
        CHECK_THROWS_AS(cross_check(g, c, opts), ValidationError);
    }
}
