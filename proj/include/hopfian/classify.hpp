#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopfian/descriptors.hpp"

namespace hopfian {

enum class Verdict { Unknown, Yes, No };

std::string verdict_str(Verdict v);

struct Witness {
    std::string kind;   // exponent_bound | unbounded_family | chain | endo | implication
    std::string field;  // which verdict it certifies
    std::optional<i64> value;
    std::vector<i64> primes;
    std::vector<std::string> chain;  // summand labels in embedding order
    std::string note;
    bool operator==(const Witness&) const = default;
};

struct RuleStep {
    std::string rule;
    std::string statement;
    bool operator==(const RuleStep&) const = default;
};

struct Classification {
    Verdict uniformly_sh = Verdict::Unknown;
    Verdict sh = Verdict::Unknown;
    Verdict sco_h = Verdict::Unknown;
    Verdict uniformly_sco_h = Verdict::Unknown;
    Verdict torsion_sh = Verdict::Unknown;
    std::vector<Witness> witnesses;
    std::vector<RuleStep> rule_trace;
    // True when a verdict leans on a user-declared torsion exponent that the
    // height data cannot pin down.
    bool torsion_unverified = false;
};

struct ContextFlags {
    bool reduced = false;
    // For reduced groups this is exact, not advisory: true asserts the
    // torsion-free quotient is divisible, false asserts it is not.
    bool sp = false;
    bool finite_rank = false;
    bool operator==(const ContextFlags&) const = default;
};

struct Facts {
    Verdict uniformly_sh = Verdict::Unknown;
    Verdict sh = Verdict::Unknown;
    Verdict sco_h = Verdict::Unknown;
    Verdict uniformly_sco_h = Verdict::Unknown;
    Verdict torsion_sh = Verdict::Unknown;
    bool operator==(const Facts&) const = default;
};

// Least fixpoint of the implication rules (with their contrapositives) over
// the given facts.  Deterministic; throws Contradiction when a field is
// forced both Yes and No, which signals inconsistent inputs or an engine
// bug, never a valid group.
Classification propagate(const Facts& facts, const ContextFlags& flags);

// A certified uniform kernel-chain exponent for a group with torsion
// exponent bound m and no chain of comparable rank-1 summands longer than n.
i64 uniform_exponent_bound(i64 m, i64 n);

Classification classify_torsion(const TorsionDescriptor& t);

struct CDEntry {
    HeightMatrix type;
    ExtNat multiplicity = ExtNat::of(1);
    std::string label;
};
// Torsion-free completely decomposable groups given by the types of their
// rank-1 summands.  Throws NotACharacteristic on rows with jumps.
Classification classify_completely_decomposable(const std::vector<CDEntry>& entries);

Classification classify_rank1_cyclic(const Rank1CyclicParams& params);

// Reduced direct sums of rank-1 and torsion summands.  Throws NotReduced on
// a nontrivial divisible part and ValidationError on invalid descriptors.
Classification classify_warfield(const GroupDescriptor& g);

// Full orchestrator: splits off the divisible part, classifies the reduced
// rest, and combines.
Classification classify(const GroupDescriptor& g);

// Longest chain of summands comparable under the height-matrix embedding
// order, counting multiplicity.
struct ChainResult {
    bool bounded = false;
    i64 length = 0;
    std::vector<std::string> chain;  // labels along a longest chain
    std::string unbounded_reason;
};

struct ChainEntry {
    std::variant<HeightMatrix, PrimeIndexedBPattern> payload;
    ExtNat multiplicity = ExtNat::of(1);
    std::string label;
};
ChainResult longest_summand_chain(const std::vector<ChainEntry>& entries);

// Context the orchestrator derived for a descriptor; the CLI reports it.
ContextFlags context_flags(const GroupDescriptor& g);

}  // namespace hopfian
