#include <doctest.h>

#include <string>

#include "hopfian/errors.hpp"
#include "hopfian/json_io.hpp"
#include "hopfian/oracle.hpp"

using namespace hopfian;

namespace {

const char* kPtothep = R"({
  "format_version": "1",
  "group": {
    "summands": [
      {
        "cyclic": {"m": 0, "k": {"tail": {"linear": {"a": 1, "b": 0}}}, "j": "inf"},
        "label": "ptothep"
      }
    ]
  }
})";

std::string parse_error_at(const std::string& text) {
    try {
        parse_document(text);
    } catch (const ParseError& e) {
        return e.where;
    }
    return "(no error)";
}

}  // namespace

TEST_CASE("parse, serialize, parse is the identity") {
    DescriptorDocument doc = parse_document(kPtothep);
    std::string out = serialize_document(doc);
    DescriptorDocument again = parse_document(out);
    CHECK(doc == again);
    CHECK(serialize_document(again) == out);
    REQUIRE(doc.group.summands.size() == 1);
    CHECK(doc.group.summands[0].label == "ptothep");
    const auto* b = std::get_if<BDescriptor>(&doc.group.summands[0].payload);
    REQUIRE(b != nullptr);
    REQUIRE(b->cyclic.has_value());
    CHECK(b->cyclic->k == NatFamily::linear(1, 0));
    CHECK(b->cyclic->j == NatFamily::infinite());
}

TEST_CASE("the cyclic summand shorthand expands to a full rank-1 entry") {
    DescriptorDocument shorthand = parse_document(
        R"({"format_version":"1","group":{"summands":[{"cyclic":{"m":0,"k":1,"j":1}}]}})");
    DescriptorDocument full = parse_document(
        R"({"format_version":"1","group":{"summands":[{"b":{"cyclic":{"m":0,"k":1,"j":1}}}]}})");
    CHECK(shorthand == full);
    // the serializer picks the short form back
    CHECK(serialize_document(full).find("\"b\"") == std::string::npos);
}

TEST_CASE("number, string and object spellings of a prime-indexed family") {
    DescriptorDocument doc = parse_document(R"({
      "format_version": "1",
      "group": {"summands": [{"cyclic": {
        "m": {"exceptions": [{"prime": 2, "value": 1}], "tail": {"const": 0}},
        "k": 2,
        "j": {"exceptions": [{"prime": 5, "value": "inf"}], "tail": {"linear": {"a": 1, "b": 1}}}
      }}]}
    })");
    const auto& b = std::get<BDescriptor>(doc.group.summands[0].payload);
    REQUIRE(b.cyclic.has_value());
    CHECK(b.cyclic->m.at_prime(2) == ExtNat::of(1));
    CHECK(b.cyclic->m.at_prime(3) == ExtNat::of(0));
    CHECK(b.cyclic->k == NatFamily::constant(2));
    CHECK(b.cyclic->j.at_prime(5) == ExtNat::inf());
    CHECK(b.cyclic->j.at_prime(7) == ExtNat::of(5));
    SUBCASE("round trip keeps the values") {
        DescriptorDocument again = parse_document(serialize_document(doc));
        CHECK(again == doc);
    }
}

TEST_CASE("matrices, torsion and divisible parts parse") {
    DescriptorDocument doc = parse_document(R"({
      "format_version": "1",
      "group": {
        "divisible": {"q_rank": 1, "prufer_ranks": {"exceptions": [{"prime": 3, "value": 2}], "tail": {"const": 0}}},
        "summands": [
          {"b": {"matrix": {
             "exceptions": [{"prime": 2, "row": {"base": 1, "jumps": [{"pos": 2, "gap": 3}]}}],
             "tail": {"base": 0}}},
           "label": "mixed"},
          {"torsion": {"exceptions": [{"prime": 2, "shape": [3, 1]}], "tail": [{"a": 1, "b": 0}]},
           "multiplicity": 2},
          {"b_family": {"supported_row": {"base": 0, "jumps": [{"pos": {"a": 1, "b": 0}, "gap": 1}]}},
           "multiplicity": "omega"}
        ]
      },
      "options": {"prime_budget": 3, "max_chain": 5}
    })");
    CHECK(doc.group.divisible.q_rank == ExtNat::of(1));
    CHECK(doc.group.divisible.prufer_ranks.at_prime(3) == ExtNat::of(2));
    const auto& b = std::get<BDescriptor>(doc.group.summands[0].payload);
    CHECK(b.matrix.row_at(2) == HeightRow{1, {{2, 3}}, std::nullopt});
    CHECK(b.matrix.row_at(3) == HeightRow::gapless(0));
    const auto& t = std::get<TorsionDescriptor>(doc.group.summands[1].payload);
    CHECK(t.shape_at(2) == PShape{{3, 1}});
    CHECK(doc.group.summands[1].multiplicity == ExtNat::of(2));
    const auto& fam = std::get<PrimeIndexedBPattern>(doc.group.summands[2].payload);
    CHECK(fam.supported_row.at(4) == HeightRow{0, {{4, 1}}, std::nullopt});
    CHECK(doc.group.summands[2].multiplicity == ExtNat::inf());
    CHECK(doc.options.prime_budget == 3);
    CHECK(doc.options.max_chain == 5);
    CHECK(doc.options.endo_budget == OracleOptions{}.endo_budget);
    SUBCASE("document round trip") {
        CHECK(parse_document(serialize_document(doc)) == doc);
    }
}

TEST_CASE("defaults: missing options, multiplicity and divisible part") {
    DescriptorDocument doc = parse_document(
        R"({"format_version":"1","group":{"summands":[{"torsion":{"exceptions":[{"prime":2,"shape":[1]}],"tail":[]}}]}})");
    CHECK(doc.options == OracleOptions{});
    CHECK(doc.group.summands[0].multiplicity == ExtNat::of(1));
    CHECK(doc.group.divisible.is_trivial());
    CHECK(doc.group.summands[0].label.empty());
}

TEST_CASE("malformed input: every defect carries its location") {
    SUBCASE("broken syntax") {
        std::string at = parse_error_at("{\"format_version\": ");
        CHECK(at.find("byte") != std::string::npos);
    }
    SUBCASE("wrong version") {
        CHECK(parse_error_at(R"({"format_version":"2","group":{"summands":[]}})") ==
              "/format_version");
    }
    SUBCASE("unknown field, with the path to it") {
        std::string at = parse_error_at(
            R"({"format_version":"1","group":{"summands":[{"cyclic":{"m":0,"k":1,"j":1,"q":0}}]}})");
        CHECK(at.find("/group/summands/0") != std::string::npos);
    }
    SUBCASE("a summand needs exactly one payload") {
        CHECK(parse_error_at(
                  R"({"format_version":"1","group":{"summands":[{"label":"x"}]}})")
                  .find("summands/0") != std::string::npos);
        CHECK(parse_error_at(
                  R"({"format_version":"1","group":{"summands":[{"cyclic":{"m":0,"k":1,"j":1},"torsion":{"tail":[]}}]}})")
                  .find("summands/0") != std::string::npos);
    }
    SUBCASE("composite or repeated primes") {
        CHECK(parse_error_at(
                  R"({"format_version":"1","group":{"summands":[{"torsion":{"exceptions":[{"prime":4,"shape":[1]}],"tail":[]}}]}})")
                  .find("prime") != std::string::npos);
        std::string dup = parse_error_at(
            R"({"format_version":"1","group":{"summands":[{"torsion":{"exceptions":[{"prime":2,"shape":[1]},{"prime":2,"shape":[1]}],"tail":[]}}]}})");
        CHECK(dup != "(no error)");
        std::string unordered = parse_error_at(
            R"({"format_version":"1","group":{"summands":[{"torsion":{"exceptions":[{"prime":3,"shape":[1]},{"prime":2,"shape":[1]}],"tail":[]}}]}})");
        CHECK(unordered != "(no error)");
    }
    SUBCASE("type errors") {
        CHECK(parse_error_at(R"({"format_version":"1","group":[]})") != "(no error)");
        CHECK(parse_error_at(
                  R"({"format_version":"1","group":{"summands":[{"cyclic":{"m":"x","k":1,"j":1}}]}})") !=
              "(no error)");
        CHECK(parse_error_at(
                  R"({"format_version":"1","group":{"summands":[{"torsion":{"tail":[]},"multiplicity":"sometimes"}]}})") !=
              "(no error)");
        CHECK(parse_error_at(
                  R"({"format_version":"1","group":{"summands":[]},"options":{"prime_budget":0}})") !=
              "(no error)");
    }
    SUBCASE("structurally fine but mathematically broken goes to validation") {
        CHECK_THROWS_AS(
            parse_document(
                R"({"format_version":"1","group":{"summands":[{"cyclic":{"m":0,"k":1,"j":0}}]}})"),
            ValidationError);
        CHECK_THROWS_AS(
            parse_document(
                R"({"format_version":"1","group":{"summands":[{"b":{"matrix":{"exceptions":[{"prime":2,"row":{"base":0,"jumps":[{"pos":1,"gap":1},{"pos":2,"gap":1}]}}],"tail":{"base":0}}}}]}})"),
            ValidationError);  // multi-jump row with no declared torsion
    }
}

TEST_CASE("report serialization carries verdicts, context and options") {
    DescriptorDocument doc = parse_document(kPtothep);
    Classification c = classify(doc.group);
    ContextFlags flags = context_flags(doc.group);
    json rep = report_to_json(c, flags, nullptr, doc.options, 7);

    CHECK(rep["verdicts"]["sh"] == "yes");
    CHECK(rep["verdicts"]["uniformly_sh"] == "no");
    CHECK(rep["verdicts"]["sco_h"] == "yes");
    CHECK(rep["verdicts"]["uniformly_sco_h"] == "no");
    CHECK(rep["verdicts"]["torsion_sh"] == "no");
    CHECK(rep["context"]["reduced"] == true);
    CHECK(rep["context"]["sp"] == true);
    CHECK(rep["context"]["finite_rank"] == true);
    CHECK(rep["context"]["torsion_unverified"] == false);
    CHECK(rep["options"]["prime_budget"] == 4);
    CHECK(rep["timing_ms"] == 7);
    CHECK(rep.count("oracle") == 0);
    REQUIRE(rep["rule_trace"].is_array());
    CHECK_FALSE(rep["rule_trace"].empty());
    for (const auto& step : rep["rule_trace"]) {
        CHECK(step.count("rule") == 1);
        CHECK(step.count("statement") == 1);
    }
    REQUIRE(rep["witnesses"].is_array());
    bool found_bound = false;
    for (const auto& w : rep["witnesses"])
        if (w["kind"] == "exponent_bound" && w["field"] == "sh") {
            CHECK(w["value"] == 1);
            found_bound = true;
        }
    CHECK(found_bound);

    SUBCASE("oracle evidence is embedded when present") {
        OracleOptions opts;
        opts.prime_budget = 2;
        OracleReport orep = cross_check(doc.group, c, opts);
        json with = report_to_json(c, flags, &orep, opts, 7);
        CHECK(with["oracle"]["consistent"] == true);
        CHECK_FALSE(with["oracle"]["checks"].empty());
        CHECK(with["options"]["prime_budget"] == 2);
    }
}

TEST_CASE("serializer writes the compact spellings") {
    DescriptorDocument doc;
    SummandEntry e;
    BDescriptor b;
    Rank1CyclicParams p;
    p.m = NatFamily::constant(0);
    p.k = NatFamily::constant(1);
    p.j = NatFamily::infinite();
    b.cyclic = p;
    b.matrix = p.matrix();
    e.payload = b;
    doc.group.summands.push_back(e);
    std::string text = serialize_document(doc);
    CHECK(text.find("\"j\": \"inf\"") != std::string::npos);
    CHECK(text.find("\"m\": 0") != std::string::npos);
    CHECK(text.find("exceptions") == std::string::npos);
    CHECK(parse_document(text) == doc);
}
