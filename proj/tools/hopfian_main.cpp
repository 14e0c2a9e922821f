#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hopfian/classify.hpp"
#include "hopfian/errors.hpp"
#include "hopfian/intmat.hpp"
#include "hopfian/json_io.hpp"
#include "hopfian/oracle.hpp"

using namespace hopfian;

namespace {

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Yes: return 0;
        case Verdict::No: return 2;
        case Verdict::Unknown: break;
    }
    return 3;
}

const char* yn(bool b) { return b ? "yes" : "no"; }

void print_human(std::ostream& os, const Classification& c, const ContextFlags& flags,
                 const OracleReport* oracle, i64 timing_ms) {
    os << "verdicts:\n";
    os << "  sh:              " << verdict_str(c.sh) << "\n";
    os << "  uniformly_sh:    " << verdict_str(c.uniformly_sh) << "\n";
    os << "  sco_h:           " << verdict_str(c.sco_h) << "\n";
    os << "  uniformly_sco_h: " << verdict_str(c.uniformly_sco_h) << "\n";
    os << "  torsion_sh:      " << verdict_str(c.torsion_sh) << "\n";
    os << "context: reduced=" << yn(flags.reduced) << " sp=" << yn(flags.sp)
       << " finite_rank=" << yn(flags.finite_rank)
       << " torsion_unverified=" << yn(c.torsion_unverified) << "\n";
    if (!c.witnesses.empty()) {
        os << "witnesses:\n";
        for (const Witness& w : c.witnesses) {
            os << "  - [" << w.kind << "] " << w.field;
            if (w.value) os << " value=" << *w.value;
            if (!w.primes.empty()) {
                os << " primes=";
                for (std::size_t i = 0; i < w.primes.size(); ++i)
                    os << (i ? "," : "") << w.primes[i];
            }
            if (!w.chain.empty()) {
                os << " chain=";
                for (std::size_t i = 0; i < w.chain.size(); ++i)
                    os << (i ? " -> " : "") << w.chain[i];
            }
            if (!w.note.empty()) os << " (" << w.note << ")";
            os << "\n";
        }
    }
    if (!c.rule_trace.empty()) {
        os << "rule trace:\n";
        for (const RuleStep& s : c.rule_trace)
            os << "  - " << s.rule << ": " << s.statement << "\n";
    }
    if (oracle) {
        os << "oracle: " << (oracle->consistent ? "consistent" : "INCONSISTENT") << " ("
           << oracle->checks.size() << " check(s))\n";
        for (const OracleCheck& ch : oracle->checks)
            os << "  - " << (ch.passed ? "pass" : "FAIL") << " " << ch.name << ": " << ch.detail
               << "\n";
        if (!oracle->truncations.empty()) {
            os << "truncations:\n";
            for (const std::string& t : oracle->truncations) os << "  - " << t << "\n";
        }
    }
    os << "timing: " << timing_ms << " ms\n";
}

struct BudgetFlags {
    std::optional<i64> prime_budget, endo_budget, max_chain;

    void apply(OracleOptions& o) const {
        if (prime_budget) o.prime_budget = *prime_budget;
        if (endo_budget) o.endo_budget = *endo_budget;
        if (max_chain) o.max_chain = *max_chain;
    }
};

int run_doc(const DescriptorDocument& doc, bool with_oracle, bool json_out) {
    auto t0 = std::chrono::steady_clock::now();
    Classification c = classify(doc.group);
    ContextFlags flags = context_flags(doc.group);
    std::optional<OracleReport> orep;
    if (with_oracle) orep = cross_check(doc.group, c, doc.options);
    i64 ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - t0)
                 .count();
    if (json_out)
        std::cout << report_to_json(c, flags, orep ? &*orep : nullptr, doc.options, ms).dump(2)
                  << "\n";
    else
        print_human(std::cout, c, flags, orep ? &*orep : nullptr, ms);
    return verdict_exit(c.sh);
}

int run_snf(const std::string& path, bool json_out) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
    if (!j.is_array() || j.empty()) throw ParseError("", "expected a nonempty array of rows");
    std::vector<Vec> rows;
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array()) throw ParseError("/" + std::to_string(r), "expected a row array");
        Vec row;
        for (std::size_t cidx = 0; cidx < j[r].size(); ++cidx) {
            const json& cell = j[r][cidx];
            if (!cell.is_number_integer())
                throw ParseError("/" + std::to_string(r) + "/" + std::to_string(cidx),
                                 "expected an integer");
            row.push_back(cell.get<i64>());
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("/" + std::to_string(r), "rows must have equal length");
        rows.push_back(std::move(row));
    }
    Mat m = Mat::from_rows(rows);
    SnfResult snf = smith_normal_form(m);
    GroupStructure coker = cokernel_structure(m);
    if (json_out) {
        json out{{"diagonal", snf.diag},
                 {"rank", snf.rank},
                 {"cokernel",
                  json{{"free_rank", coker.free_rank},
                       {"invariant_factors", coker.invariant_factors}}}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "diagonal:";
        for (i64 d : snf.diag) std::cout << " " << d;
        std::cout << "\nrank: " << snf.rank << "\ncokernel: " << coker.str() << "\n";
    }
    return 0;
}

DescriptorDocument demo_document(const std::string& name) {
    DescriptorDocument doc;
    if (name == "ptothep") {
        Rank1CyclicParams c;
        c.m = NatFamily::constant(0);
        c.k = NatFamily::linear(1, 0);
        c.j = NatFamily::infinite();
        BDescriptor b;
        b.cyclic = c;
        b.matrix = c.matrix();
        doc.group.summands.push_back({b, ExtNat::of(1), "ptothep"});
    } else if (name == "cdk_torsion") {
        TorsionDescriptor t;
        t.tail.exponents.push_back(LinExpr{1, 0});
        doc.group.summands.push_back({t, ExtNat::of(1), "cdk"});
    } else if (name == "zsum_omega") {
        BDescriptor b;  // default height matrix: the type of the integers
        doc.group.summands.push_back({b, ExtNat::inf(), "zsum"});
    } else if (name == "rank1_cases") {
        Rank1CyclicParams c;
        c.m = NatFamily::constant(0);
        c.k = NatFamily::constant(1);
        c.j = NatFamily::constant(1);
        BDescriptor b;
        b.cyclic = c;
        b.matrix = c.matrix();
        doc.group.summands.push_back({b, ExtNat::of(1), "rank1"});
    } else {
        throw Error("unknown demo \"" + name +
                    "\"; names: ptothep, cdk_torsion, zsum_omega, rank1_cases");
    }
    return doc;
}

void print_case_table(std::ostream& os) {
    os << "torsion action of the two case endomorphisms (e = m + k):\n";
    os << "  p  m  k  j | case  action  chain-index\n";
    for (i64 p : {2LL, 3LL})
        for (i64 m : {0LL, 1LL})
            for (i64 k : {1LL, 2LL})
                for (i64 j : {1LL, 2LL}) {
                    Rank1Model model = build_rank1_model(p, m, k, j);
                    for (EndoCase which : {EndoCase::Case1, EndoCase::Case2}) {
                        if (which == EndoCase::Case1 && j > k) continue;
                        if (which == EndoCase::Case2 && k > j) continue;
                        i64 l = case_action_exponent(model, which);
                        i64 idx = torsion_chain_index(model, which);
                        os << "  " << p << "  " << m << "  " << k << "  " << j << " | "
                           << (which == EndoCase::Case1 ? "1" : "2") << "     " << p << "^" << l
                           << "     " << idx << "\n";
                    }
                }
    os << "\n";
}

int run_demo(const std::string& name, bool json_out) {
    DescriptorDocument doc = demo_document(name);
    auto dir = std::filesystem::temp_directory_path() / "hopfian_demos";
    std::filesystem::create_directories(dir);
    auto path = dir / (name + ".json");
    std::ofstream(path) << serialize_document(doc);
    if (!json_out) {
        std::cout << "fixture written to " << path.string() << "\n\n";
        if (name == "rank1_cases") print_case_table(std::cout);
    }
    return run_doc(doc, true, json_out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"classifier for strong Hopficity of abelian group descriptors"};
    app.require_subcommand(1);

    bool json_out = false, with_oracle = false;
    BudgetFlags budgets;
    app.add_flag("--json", json_out, "machine-readable report");
    app.add_flag("--oracle", with_oracle, "append cross-check evidence");
    app.add_option("--prime-budget", budgets.prime_budget, "families probed at the first N primes");
    app.add_option("--endo-budget", budgets.endo_budget, "endomorphism enumeration cap");
    app.add_option("--max-chain", budgets.max_chain, "longest chain witness to execute");

    auto* classify_cmd = app.add_subcommand("classify", "classify a descriptor file");
    classify_cmd->fallthrough();
    std::string classify_file;
    classify_cmd->add_option("file", classify_file, "descriptor JSON")->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "classify and cross-check a descriptor file");
    oracle_cmd->fallthrough();
    std::string oracle_file;
    oracle_cmd->add_option("file", oracle_file, "descriptor JSON")->required();

    auto* snf_cmd = app.add_subcommand("snf", "Smith normal form of an integer matrix");
    snf_cmd->fallthrough();
    std::string snf_file;
    snf_cmd->add_option("matrix-file", snf_file, "JSON array of rows")->required();

    auto* demo_cmd = app.add_subcommand("demo", "run a built-in example");
    demo_cmd->fallthrough();
    std::string demo_name;
    demo_cmd->add_option("name", demo_name, "ptothep | cdk_torsion | zsum_omega | rank1_cases")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (classify_cmd->parsed() || oracle_cmd->parsed()) {
            DescriptorDocument doc =
                load_document(classify_cmd->parsed() ? classify_file : oracle_file);
            budgets.apply(doc.options);
            return run_doc(doc, with_oracle || oracle_cmd->parsed(), json_out);
        }
        if (snf_cmd->parsed()) return run_snf(snf_file, json_out);
        return run_demo(demo_name, json_out);
    } catch (const ValidationError& e) {
        std::cerr << "validation failed:\n";
        for (const std::string& v : e.violations) std::cerr << "  - " << v << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
