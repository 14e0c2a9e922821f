#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hopfian/heights.hpp"

namespace hopfian {

// Finite abelian p-group as a non-increasing list of cyclic exponents.
struct PShape {
    std::vector<i64> exponents;

    i64 total_exponent() const;
    std::vector<std::string> invalid_reasons() const;
    bool operator==(const PShape&) const = default;
};

// PShape whose exponents vary linearly with the prime index.
struct ShapePattern {
    std::vector<LinExpr> exponents;

    PShape at(i64 n) const;
    LinExpr total_exponent() const;
    std::vector<std::string> invalid_reasons() const;
    bool operator==(const ShapePattern&) const = default;
    static ShapePattern constant(const PShape& s);
};

// Torsion group given per prime: exceptional shapes plus a tail pattern.
struct TorsionDescriptor {
    std::vector<std::pair<i64, PShape>> exceptions;  // sorted by prime
    ShapePattern tail;                               // empty list = trivial at tail primes

    PShape shape_at(i64 p) const;
    void set_exception(i64 p, PShape s);
    NatFamily exponent_family() const;  // p -> log_p |T_p|
    bool is_trivial() const;
    std::vector<std::string> invalid_reasons() const;
    bool operator==(const TorsionDescriptor&) const = default;
};

// Single-jump presentation of a rank-1 mixed group: the generator z has
// p-height sequence with base m_p, one jump of gap j_p at position k_p
// (infinite j marks divisibility past the jump).  Primes with k_p = 0 carry
// no torsion.
struct Rank1CyclicParams {
    NatFamily m, k, j;
    std::optional<NatFamily> declared_e;  // checked against m + k when present

    NatFamily torsion_exponents() const;  // e: m + k where k >= 1, else 0
    HeightMatrix matrix() const;
    std::vector<std::string> invalid_reasons() const;
    bool operator==(const Rank1CyclicParams&) const = default;
};

// Rank-1 group with bounded p-torsion, optionally carrying an extra torsion
// direct summand.  The torsion of the rank-1 part is derived from the height
// matrix where a single jump pins it down; rows with several jumps need an
// explicit declaration, which classification reports as unverified.
struct BDescriptor {
    HeightMatrix matrix;
    std::optional<Rank1CyclicParams> cyclic;  // when present, matrix is derived from it
    std::optional<NatFamily> declared_torsion;
    TorsionDescriptor extra_torsion;

    std::vector<std::string> invalid_reasons() const;
    bool operator==(const BDescriptor&) const = default;
};

// Torsion exponents of the rank-1 part plus whether they rest on an
// unverifiable declaration.
struct ATorsion {
    NatFamily exponents;
    bool unverified = false;
};
// Derives per-prime torsion from rows with at most one jump; nullopt when
// some row has several jumps and no declaration can be checked.
std::optional<NatFamily> derived_a_torsion(const HeightMatrix& h);
ATorsion a_torsion(const BDescriptor& b);

// One rank-1 summand per prime: the group at the n-th prime has the given
// row there and gapless zero rows everywhere else.
struct PrimeIndexedBPattern {
    RowPattern supported_row;

    BDescriptor member_at(i64 n) const;
    NatFamily torsion_exponents() const;
    std::vector<std::string> invalid_reasons() const;
    bool operator==(const PrimeIndexedBPattern&) const = default;
};

struct DivisiblePart {
    ExtNat q_rank = ExtNat::of(0);  // inf stands in for omega
    NatFamily prufer_ranks;

    bool is_trivial() const;
    std::vector<std::string> invalid_reasons() const;
    bool operator==(const DivisiblePart&) const = default;
};

using SummandPayload = std::variant<BDescriptor, TorsionDescriptor, PrimeIndexedBPattern>;

struct SummandEntry {
    SummandPayload payload;
    ExtNat multiplicity = ExtNat::of(1);  // inf stands in for omega
    std::string label;                    // optional, referenced by witnesses

    bool operator==(const SummandEntry&) const = default;
};

struct GroupDescriptor {
    DivisiblePart divisible;
    std::vector<SummandEntry> summands;

    bool operator==(const GroupDescriptor&) const = default;
};

std::vector<std::string> validate(const GroupDescriptor& g);

// p -> log_p |T_p| across all summands with multiplicity.  Throws
// UnboundedAtAPrime when some T_p is infinite (omega multiplicity against
// nonzero torsion, or a Prufer part).
NatFamily total_torsion_exponent(const GroupDescriptor& g);

struct TorsionShResult {
    bool is_sh = false;
    std::optional<i64> bound;
    std::vector<i64> witness_primes;
};
TorsionShResult torsion_is_sh(const NatFamily& e);

// Reduced descriptors only (throws NotReduced): true iff every non-torsion
// summand has all height rows eventually infinite, the descriptor-level
// reading of G/T divisible.
bool is_sp(const GroupDescriptor& g);

// Every row reaches infinity at some index.
bool all_rows_eventually_infinite(const HeightMatrix& h);
// Every row is infinite from index 0: the rank-1 group is divisible.
bool matrix_is_fully_divisible(const HeightMatrix& h);

// B-to-B comparisons; extra torsion plays no role.
std::optional<std::pair<i64, i64>> walk_equiv(const BDescriptor& d1, const BDescriptor& d2);
std::optional<i64> walk_le(const BDescriptor& d1, const BDescriptor& d2);

}  // namespace hopfian
