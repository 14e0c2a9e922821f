#include <doctest.h>

#include <algorithm>
#include <optional>

#include "hopfian/classify.hpp"
#include "hopfian/errors.hpp"

using namespace hopfian;

namespace {

bool used_rule(const Classification& c, const std::string& id) {
    for (const RuleStep& s : c.rule_trace)
        if (s.rule == id) return true;
    return false;
}

i64 count_rule(const Classification& c, const std::string& id) {
    i64 n = 0;
    for (const RuleStep& s : c.rule_trace)
        if (s.rule == id) ++n;
    return n;
}

const Witness* witness_for(const Classification& c, const std::string& field) {
    for (const Witness& w : c.witnesses)
        if (w.field == field) return &w;
    return nullptr;
}

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

HeightMatrix divisible_at(std::initializer_list<i64> primes) {
    HeightMatrix h;
    for (i64 p : primes) h.set_exception(p, HeightRow{0, {}, 0});
    return h;
}

std::vector<Verdict> verdicts(const Classification& c) {
    return {c.uniformly_sh, c.sh, c.sco_h, c.uniformly_sco_h, c.torsion_sh};
}

}  // namespace

TEST_CASE("verdict names") {
    CHECK(verdict_str(Verdict::Yes) == "yes");
    CHECK(verdict_str(Verdict::No) == "no");
    CHECK(verdict_str(Verdict::Unknown) == "unknown");
}

TEST_CASE("propagation from no facts concludes nothing") {
    Classification c = propagate(Facts{}, ContextFlags{});
    CHECK(c.sh == Verdict::Unknown);
    CHECK(c.uniformly_sh == Verdict::Unknown);
    CHECK(c.sco_h == Verdict::Unknown);
    CHECK(c.uniformly_sco_h == Verdict::Unknown);
    CHECK(c.torsion_sh == Verdict::Unknown);
    CHECK(c.rule_trace.empty());
}

TEST_CASE("a uniform exponent spreads to the plain and torsion properties") {
    Facts f;
    f.uniformly_sh = Verdict::Yes;
    Classification c = propagate(f, ContextFlags{});
    CHECK(c.sh == Verdict::Yes);
    CHECK(c.torsion_sh == Verdict::Yes);
    CHECK(c.sco_h == Verdict::Unknown);
    CHECK(used_rule(c, "uniform-to-plain-sh"));
    CHECK(used_rule(c, "uniform-sh-restricts-to-torsion"));
}

TEST_CASE("contrapositives run backwards through the reduced implications") {
    Facts f;
    f.sh = Verdict::No;
    ContextFlags reduced;
    reduced.reduced = true;
    Classification c = propagate(f, reduced);
    CHECK(c.uniformly_sh == Verdict::No);
    CHECK(c.sco_h == Verdict::No);
    CHECK(c.uniformly_sco_h == Verdict::No);
    CHECK(c.torsion_sh == Verdict::Unknown);
    CHECK(used_rule(c, "reduced-sco-to-sh-contra"));
    SUBCASE("without the reduced flag the backward steps are unavailable") {
        Classification open = propagate(f, ContextFlags{});
        CHECK(open.sco_h == Verdict::Unknown);
        CHECK(open.uniformly_sh == Verdict::No);  // uniform-to-plain still contraposes
    }
}

TEST_CASE("nondivisible quotient in finite rank settles image chains by itself") {
    ContextFlags flags;
    flags.reduced = true;
    flags.sp = false;
    flags.finite_rank = true;
    Classification c = propagate(Facts{}, flags);
    CHECK(c.sco_h == Verdict::No);
    CHECK(c.uniformly_sco_h == Verdict::No);
    CHECK(used_rule(c, "finite-rank-nondivisible-quotient"));
    SUBCASE("a divisible quotient disarms the rule") {
        flags.sp = true;
        Classification open = propagate(Facts{}, flags);
        CHECK(open.sco_h == Verdict::Unknown);
    }
    SUBCASE("so does infinite rank") {
        flags.finite_rank = false;
        Classification open = propagate(Facts{}, flags);
        CHECK(open.sco_h == Verdict::Unknown);
    }
}

TEST_CASE("torsion stabilization lifts over a divisible quotient in finite rank") {
    Facts f;
    f.torsion_sh = Verdict::Yes;
    ContextFlags flags;
    flags.reduced = true;
    flags.sp = true;
    flags.finite_rank = true;
    Classification c = propagate(f, flags);
    CHECK(c.uniformly_sh == Verdict::Yes);
    CHECK(c.sh == Verdict::Yes);
    CHECK(c.sco_h == Verdict::Yes);
    CHECK(c.uniformly_sco_h == Verdict::Yes);
    CHECK(used_rule(c, "sp-torsion-lifts"));
}

TEST_CASE("conflicting facts raise a contradiction") {
    Facts f;
    f.sh = Verdict::No;
    f.uniformly_sh = Verdict::Yes;
    CHECK_THROWS_AS(propagate(f, ContextFlags{}), Contradiction);
}

TEST_CASE("propagation is idempotent and deterministic") {
    std::vector<ContextFlags> flag_sets;
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
            for (int fr = 0; fr < 2; ++fr)
                flag_sets.push_back({r == 1, s == 1, fr == 1});
    std::vector<Facts> seeds;
    for (Verdict v : {Verdict::Unknown, Verdict::Yes}) {
        Facts f;
        f.uniformly_sh = v;
        seeds.push_back(f);
        Facts g;
        g.torsion_sh = v;
        seeds.push_back(g);
    }
    Facts no_sh;
    no_sh.sh = Verdict::No;
    seeds.push_back(no_sh);
    for (const ContextFlags& flags : flag_sets)
        for (const Facts& f : seeds) {
            Classification once = propagate(f, flags);
            Facts closed;
            closed.uniformly_sh = once.uniformly_sh;
            closed.sh = once.sh;
            closed.sco_h = once.sco_h;
            closed.uniformly_sco_h = once.uniformly_sco_h;
            closed.torsion_sh = once.torsion_sh;
            Classification twice = propagate(closed, flags);
            CHECK(verdicts(twice) == verdicts(once));
            Classification again = propagate(f, flags);
            CHECK(verdicts(again) == verdicts(once));
            CHECK(again.rule_trace == once.rule_trace);
        }
}

TEST_CASE("uniform exponent bound combines torsion and chain data") {
    CHECK(uniform_exponent_bound(0, 1) == 1);
    CHECK(uniform_exponent_bound(3, 2) == 7);
    CHECK(uniform_exponent_bound(0, 0) == 0);
    CHECK(uniform_exponent_bound(2, 3) == 11);
    CHECK_THROWS_AS(uniform_exponent_bound(-1, 0), std::invalid_argument);
}

TEST_CASE("torsion groups: bounded exponents decide everything") {
    SUBCASE("finite torsion") {
        TorsionDescriptor t;
        t.set_exception(2, PShape{{3, 1}});
        Classification c = classify_torsion(t);
        CHECK(verdicts(c) == std::vector<Verdict>(5, Verdict::Yes));
        const Witness* w = witness_for(c, "all");
        REQUIRE(w != nullptr);
        CHECK(w->kind == "exponent_bound");
        CHECK(w->value == 4);
        CHECK(used_rule(c, "torsion-bounded-exponent"));
    }
    SUBCASE("bounded tail at every prime") {
        TorsionDescriptor t;
        t.tail = ShapePattern{{LinExpr::constant(3)}};
        Classification c = classify_torsion(t);
        CHECK(verdicts(c) == std::vector<Verdict>(5, Verdict::Yes));
        CHECK(witness_for(c, "all")->value == 3);
    }
    SUBCASE("growing tail fails at witness primes") {
        TorsionDescriptor t;
        t.tail = ShapePattern{{{1, 0}}};
        Classification c = classify_torsion(t);
        CHECK(verdicts(c) == std::vector<Verdict>(5, Verdict::No));
        const Witness* w = witness_for(c, "all");
        REQUIRE(w != nullptr);
        CHECK(w->kind == "unbounded_family");
        CHECK(w->primes == std::vector<i64>{2, 3, 5});
    }
    SUBCASE("invalid shapes are rejected") {
        TorsionDescriptor t;
        t.set_exception(2, PShape{{1, 2}});
        CHECK_THROWS_AS(classify_torsion(t), ValidationError);
    }
}

TEST_CASE("rank-1 cyclic torsion: the exponent-to-jump ratio decides kernels") {
    SUBCASE("one cyclic summand at every prime") {
        Classification c = classify_rank1_cyclic(const_params(0, 1, 1));
        CHECK(c.sh == Verdict::Yes);
        CHECK(c.uniformly_sh == Verdict::Yes);
        CHECK(c.torsion_sh == Verdict::Yes);
        CHECK(c.sco_h == Verdict::No);
        CHECK(c.uniformly_sco_h == Verdict::No);
        const Witness* w = witness_for(c, "sh");
        REQUIRE(w != nullptr);
        CHECK(w->kind == "exponent_bound");
        CHECK(w->value == 1);
        CHECK(used_rule(c, "rank1-cyclic-ratio"));
        CHECK(used_rule(c, "finite-rank-nondivisible-quotient"));
    }
    SUBCASE("growing torsion balanced by a growing jump position") {
        Rank1CyclicParams p;
        p.m = NatFamily::constant(0);
        p.k = NatFamily::linear(1, 0);
        p.j = NatFamily::infinite();
        Classification c = classify_rank1_cyclic(p);
        CHECK(c.sh == Verdict::Yes);
        CHECK(witness_for(c, "sh")->value == 1);
        CHECK(c.torsion_sh == Verdict::No);
        CHECK(c.sco_h == Verdict::Yes);  // rows all turn infinite, so images lift
        CHECK(c.uniformly_sh == Verdict::No);
        CHECK(c.uniformly_sco_h == Verdict::No);
    }
    SUBCASE("growing torsion against a fixed jump is fatal") {
        Rank1CyclicParams p;
        p.m = NatFamily::linear(1, -1);
        p.k = NatFamily::constant(1);
        p.j = NatFamily::linear(1, 0);
        Classification c = classify_rank1_cyclic(p);
        CHECK(verdicts(c) == std::vector<Verdict>(5, Verdict::No));
        CHECK(witness_for(c, "sh")->kind == "unbounded_family");
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(classify_rank1_cyclic(const_params(0, 1, 0)), ValidationError);
    }
}

TEST_CASE("completely decomposable groups: chains of comparable types") {
    SUBCASE("an antichain stabilizes with exponent one") {
        std::vector<CDEntry> entries;
        for (i64 p : {2LL, 3LL, 5LL})
            entries.push_back({divisible_at({p}), ExtNat::of(1), "t" + std::to_string(p)});
        Classification c = classify_completely_decomposable(entries);
        CHECK(c.uniformly_sh == Verdict::Yes);
        CHECK(c.sh == Verdict::Yes);
        CHECK(c.torsion_sh == Verdict::Yes);
        CHECK(c.sco_h == Verdict::No);
        CHECK(witness_for(c, "uniformly_sh")->value == 1);
        CHECK(used_rule(c, "completely-decomposable-chains"));
    }
    SUBCASE("a three-step chain with double multiplicity counts to six") {
        std::vector<CDEntry> entries = {{HeightMatrix{}, ExtNat::of(2), "zz"},
                                        {divisible_at({2}), ExtNat::of(2), "half"},
                                        {divisible_at({2, 3}), ExtNat::of(2), "sixth"}};
        Classification c = classify_completely_decomposable(entries);
        CHECK(c.uniformly_sh == Verdict::Yes);
        const Witness* w = witness_for(c, "uniformly_sh");
        REQUIRE(w != nullptr);
        CHECK(w->value == 6);
        CHECK(w->chain.size() == 3);
    }
    SUBCASE("infinitely many copies of one type never stabilize") {
        std::vector<CDEntry> entries = {{HeightMatrix{}, ExtNat::inf(), "zw"}};
        Classification c = classify_completely_decomposable(entries);
        CHECK(c.sh == Verdict::No);
        CHECK(c.uniformly_sh == Verdict::No);
        CHECK(c.sco_h == Verdict::No);
        CHECK(c.torsion_sh == Verdict::Yes);
        const Witness* w = witness_for(c, "sh");
        REQUIRE(w != nullptr);
        CHECK(w->kind == "chain");
        CHECK(w->chain == std::vector<std::string>{"zw", "zw"});
    }
    SUBCASE("jumps disqualify a type matrix") {
        HeightMatrix bad;
        bad.set_exception(2, HeightRow{0, {{1, 1}}, std::nullopt});
        CHECK_THROWS_AS(classify_completely_decomposable({{bad, ExtNat::of(1), "bad"}}),
                        NotACharacteristic);
    }
    SUBCASE("no entries at all is the trivial group") {
        Classification c = classify_completely_decomposable({});
        CHECK(verdicts(c) == std::vector<Verdict>(5, Verdict::Yes));
    }
}

TEST_CASE("longest chain of comparable summands") {
    SUBCASE("incomparable entries stand alone") {
        std::vector<ChainEntry> entries;
        for (i64 p : {2LL, 3LL, 5LL})
            entries.push_back({divisible_at({p}), ExtNat::of(1), "t" + std::to_string(p)});
        ChainResult r = longest_summand_chain(entries);
        CHECK(r.bounded);
        CHECK(r.length == 1);
        CHECK(r.chain.size() == 1);
    }
    SUBCASE("weights accumulate along a comparable path") {
        std::vector<ChainEntry> entries = {{HeightMatrix{}, ExtNat::of(2), "a"},
                                           {divisible_at({2}), ExtNat::of(3), "b"}};
        ChainResult r = longest_summand_chain(entries);
        CHECK(r.bounded);
        CHECK(r.length == 5);
    }
    SUBCASE("mutually comparable entries condense into one block") {
        HeightMatrix h;
        h.set_exception(2, HeightRow::gapless(1));
        std::vector<ChainEntry> entries = {{h, ExtNat::of(2), "x"},
                                           {matrix_scale(h, 2), ExtNat::of(3), "y"}};
        ChainResult r = longest_summand_chain(entries);
        CHECK(r.bounded);
        CHECK(r.length == 5);
        CHECK(r.chain.size() == 2);
    }
    SUBCASE("an infinitely repeated summand is unbounded") {
        ChainResult r = longest_summand_chain({{HeightMatrix{}, ExtNat::inf(), "w"}});
        CHECK_FALSE(r.bounded);
        CHECK(r.chain == std::vector<std::string>{"w", "w"});
        CHECK_FALSE(r.unbounded_reason.empty());
    }
    SUBCASE("no entries: an empty bounded chain") {
        ChainResult r = longest_summand_chain({});
        CHECK(r.bounded);
        CHECK(r.length == 0);
    }
}

TEST_CASE("reduced direct sums through the orchestrating classifier") {
    SUBCASE("the integers") {
        GroupDescriptor g;
        SummandEntry e;
        e.payload = BDescriptor{};
        e.label = "z";
        g.summands.push_back(e);
        Classification c = classify_warfield(g);
        CHECK(c.uniformly_sh == Verdict::Yes);
        CHECK(witness_for(c, "uniformly_sh")->value == 1);
        CHECK(c.sco_h == Verdict::No);
        CHECK(c.torsion_sh == Verdict::Yes);
        CHECK(used_rule(c, "bounded-chains-with-sh-torsion"));
    }
    SUBCASE("a finite free rank bounds the exponent by its square") {
        GroupDescriptor g;
        SummandEntry e;
        e.payload = BDescriptor{};
        e.multiplicity = ExtNat::of(3);
        g.summands.push_back(e);
        Classification c = classify_warfield(g);
        CHECK(c.uniformly_sh == Verdict::Yes);
        CHECK(witness_for(c, "uniformly_sh")->value == 9);
    }
    SUBCASE("infinitely many integer summands") {
        GroupDescriptor g;
        SummandEntry e;
        e.payload = BDescriptor{};
        e.multiplicity = ExtNat::inf();
        e.label = "zsum";
        g.summands.push_back(e);
        Classification c = classify_warfield(g);
        CHECK(c.sh == Verdict::No);
        CHECK(c.torsion_sh == Verdict::Yes);
        CHECK(c.sco_h == Verdict::No);
        CHECK(used_rule(c, "unbounded-summand-chains"));
        CHECK(witness_for(c, "sh")->chain ==
              std::vector<std::string>{"zsum", "zsum"});
    }
    SUBCASE("bounded extra torsion only raises the uniform exponent") {
        GroupDescriptor g = single_cyclic(const_params(0, 1, 1), "a");
        SummandEntry tor;
        TorsionDescriptor td;
        td.set_exception(2, PShape{{2}});
        tor.payload = td;
        tor.label = "t";
        g.summands.push_back(tor);
        Classification c = classify_warfield(g);
        CHECK(c.uniformly_sh == Verdict::Yes);
        CHECK(witness_for(c, "uniformly_sh")->value == 4);  // exponent 3 + chain 1
        CHECK(c.torsion_sh == Verdict::Yes);
    }
    SUBCASE("an unbounded torsion summand sinks the whole sum") {
        GroupDescriptor g = single_cyclic(const_params(0, 1, 1), "a");
        SummandEntry tor;
        TorsionDescriptor td;
        td.tail = ShapePattern{{{1, 0}}};
        tor.payload = td;
        tor.label = "t";
        g.summands.push_back(tor);
        Classification c = classify_warfield(g);
        CHECK(verdicts(c) == std::vector<Verdict>(5, Verdict::No));
        CHECK(used_rule(c, "torsion-summand-unbounded"));
        CHECK_FALSE(used_rule(c, "rank1-cyclic-ratio"));
    }
    SUBCASE("omega copies of a finite cyclic group blow up one prime") {
        GroupDescriptor g;
        SummandEntry tor;
        TorsionDescriptor td;
        td.set_exception(2, PShape{{1}});
        tor.payload = td;
        tor.multiplicity = ExtNat::inf();
        g.summands.push_back(tor);
        Classification c = classify_warfield(g);
        CHECK(c.sh == Verdict::No);
        CHECK(c.torsion_sh == Verdict::No);
        CHECK(used_rule(c, "infinite-p-component"));
        CHECK(witness_for(c, "sh")->primes == std::vector<i64>{2});
    }
    SUBCASE("single-summand delegation to the ratio rule, recorded once") {
        Rank1CyclicParams p;
        p.m = NatFamily::constant(0);
        p.k = NatFamily::linear(1, 0);
        p.j = NatFamily::infinite();
        Classification c = classify_warfield(single_cyclic(p, "g"));
        CHECK(c.sh == Verdict::Yes);
        CHECK(c.torsion_sh == Verdict::No);
        CHECK(c.sco_h == Verdict::Yes);
        CHECK(c.uniformly_sh == Verdict::No);
        CHECK(count_rule(c, "rank1-cyclic-ratio") == 1);
        CHECK(witness_for(c, "sh")->value == 1);
    }
    SUBCASE("a nontrivial divisible part is rejected here") {
        GroupDescriptor g;
        g.divisible.q_rank = ExtNat::of(1);
        CHECK_THROWS_AS(classify_warfield(g), NotReduced);
    }
}

TEST_CASE("the full classifier splits off the divisible part") {
    SUBCASE("the rationals") {
        GroupDescriptor g;
        g.divisible.q_rank = ExtNat::of(1);
        Classification c = classify(g);
        CHECK(c.sh == Verdict::Yes);
        CHECK(c.uniformly_sh == Verdict::Yes);
        CHECK(c.torsion_sh == Verdict::Yes);
        CHECK(c.sco_h == Verdict::Unknown);
        CHECK(used_rule(c, "divisible-reduced-split"));
        CHECK(witness_for(c, "uniformly_sh")->value == 1);
    }
    SUBCASE("infinitely many rational summands") {
        GroupDescriptor g;
        g.divisible.q_rank = ExtNat::inf();
        Classification c = classify(g);
        CHECK(c.sh == Verdict::No);
        CHECK(c.uniformly_sh == Verdict::No);
        CHECK(c.sco_h == Verdict::No);
        CHECK(c.uniformly_sco_h == Verdict::No);
        CHECK(c.torsion_sh == Verdict::Yes);
    }
    SUBCASE("a quasicyclic part fails kernels but not images") {
        GroupDescriptor g;
        g.divisible.prufer_ranks = NatFamily::constant(0);
        g.divisible.prufer_ranks.set_exception(2, ExtNat::of(1));
        Classification c = classify(g);
        CHECK(c.sh == Verdict::No);
        CHECK(c.torsion_sh == Verdict::No);
        CHECK(c.sco_h == Verdict::Unknown);
        CHECK(witness_for(c, "sh")->primes == std::vector<i64>{2});
    }
    SUBCASE("quasicyclic ranks growing without bound fail images too") {
        GroupDescriptor g;
        g.divisible.prufer_ranks = NatFamily::linear(1, 0);
        Classification c = classify(g);
        CHECK(c.sh == Verdict::No);
        CHECK(c.sco_h == Verdict::No);
        CHECK(witness_for(c, "sco_h")->primes == std::vector<i64>{2, 3, 5});
    }
    SUBCASE("divisible part next to a reduced part combines conservatively") {
        GroupDescriptor g;
        g.divisible.q_rank = ExtNat::of(1);
        SummandEntry e;
        e.payload = BDescriptor{};
        g.summands.push_back(e);
        Classification c = classify(g);
        CHECK(c.sh == Verdict::Yes);
        CHECK(c.uniformly_sh == Verdict::Yes);
        CHECK(c.torsion_sh == Verdict::Yes);
    }
    SUBCASE("empty descriptor is the trivial group") {
        Classification c = classify(GroupDescriptor{});
        CHECK(verdicts(c) == std::vector<Verdict>(5, Verdict::Yes));
        CHECK(used_rule(c, "trivial-group"));
    }
    SUBCASE("invalid descriptors are rejected up front") {
        GroupDescriptor g;
        SummandEntry e;
        BDescriptor b;
        b.cyclic = const_params(0, 1, 0);
        e.payload = b;
        e.label = "bad";
        g.summands.push_back(e);
        CHECK_THROWS_AS(classify(g), ValidationError);
    }
}

TEST_CASE("context flags derived from the descriptor") {
    GroupDescriptor ptothep;
    {
        Rank1CyclicParams p;
        p.m = NatFamily::constant(0);
        p.k = NatFamily::linear(1, 0);
        p.j = NatFamily::infinite();
        ptothep = single_cyclic(p, "g");
    }
    ContextFlags f = context_flags(ptothep);
    CHECK(f.reduced);
    CHECK(f.sp);
    CHECK(f.finite_rank);

    GroupDescriptor zsum;
    SummandEntry e;
    e.payload = BDescriptor{};
    e.multiplicity = ExtNat::inf();
    zsum.summands.push_back(e);
    ContextFlags zf = context_flags(zsum);
    CHECK(zf.reduced);
    CHECK_FALSE(zf.sp);
    CHECK_FALSE(zf.finite_rank);

    GroupDescriptor div;
    div.divisible.q_rank = ExtNat::inf();
    ContextFlags df = context_flags(div);
    CHECK_FALSE(df.reduced);
    CHECK_FALSE(df.finite_rank);
}

TEST_CASE("verdicts are consistent and independent of summand order") {
    std::vector<GroupDescriptor> docs;
    for (i64 m = 0; m <= 1; ++m)
        for (i64 k = 1; k <= 2; ++k)
            for (i64 j = 1; j <= 2; ++j) docs.push_back(single_cyclic(const_params(m, k, j), "a"));
    {
        GroupDescriptor g = single_cyclic(const_params(0, 1, 1), "a");
        SummandEntry tor;
        TorsionDescriptor td;
        td.set_exception(3, PShape{{2, 1}});
        tor.payload = td;
        tor.label = "t";
        g.summands.push_back(tor);
        SummandEntry z;
        z.payload = BDescriptor{};
        z.label = "z";
        g.summands.push_back(z);
        docs.push_back(g);
    }
    for (const GroupDescriptor& g : docs) {
        Classification c = classify(g);
        auto implies = [](Verdict a, Verdict b) {
            return !(a == Verdict::Yes && b == Verdict::No);
        };
        CHECK(implies(c.uniformly_sh, c.sh));
        CHECK(implies(c.uniformly_sco_h, c.sco_h));
        CHECK(implies(c.uniformly_sh, c.torsion_sh));
        if (g.summands.size() > 1) {
            GroupDescriptor perm = g;
            std::rotate(perm.summands.begin(), perm.summands.begin() + 1,
                        perm.summands.end());
            CHECK(verdicts(classify(perm)) == verdicts(c));
        }
        CHECK(verdicts(classify(g)) == verdicts(c));
    }
}
