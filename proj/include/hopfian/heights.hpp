#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hopfian/fpgroup.hpp"
#include "hopfian/primes.hpp"

namespace hopfian {

// Linear form in the prime index: value a*n + b at the n-th prime.
struct LinExpr {
    i64 a = 0, b = 0;
    i64 at(i64 n) const;
    bool is_const() const { return a == 0; }
    LinExpr operator+(const LinExpr& o) const { return {a + o.a, b + o.b}; }
    LinExpr operator-(const LinExpr& o) const { return {a - o.a, b - o.b}; }
    bool operator==(const LinExpr&) const = default;
    static LinExpr constant(i64 b) { return {0, b}; }
};

struct Jump {
    i64 pos = 1, gap = 1;
    bool operator==(const Jump&) const = default;
};

// One height sequence (|x|, |px|, |p^2 x|, ...): slope-one growth, finitely
// many upward jumps, optionally infinite from some index on.
struct HeightRow {
    i64 base = 0;
    std::vector<Jump> jumps;            // positions strictly increasing, >= 1; gaps >= 1
    std::optional<i64> infinite_from;   // indices >= this have infinite height

    ExtNat value(i64 i) const;
    HeightRow shifted(i64 s) const;     // value'(i) = value(i + s)
    HeightRow canonical() const;
    bool all_finite() const { return !infinite_from.has_value(); }
    i64 total_gap() const;
    i64 last_jump_pos() const;          // 0 when there are no jumps
    i64 shift_cap() const;              // shifting past this reaches the arithmetic tail
    std::vector<std::string> invalid_reasons() const;
    bool operator==(const HeightRow&) const = default;

    static HeightRow gapless(i64 base_);
    // Rebuild a row from a height-sequence prefix; indices past the window
    // are assumed gapless unless the prefix already reached infinity.
    static HeightRow from_values(const std::vector<ExtNat>& values);
};

// r1(i) <= r2(i) for every index i (infinity is maximal).
bool row_le(const HeightRow& r1, const HeightRow& r2);

struct JumpPattern {
    LinExpr pos, gap;
    bool operator==(const JumpPattern&) const = default;
};

// Symbolic row evaluated at the index of the prime it describes.
struct RowPattern {
    LinExpr base;
    std::vector<JumpPattern> jumps;
    std::optional<LinExpr> infinite_from;

    HeightRow at(i64 n) const;
    std::vector<std::string> invalid_reasons(i64 n_lo = 1) const;
    bool operator==(const RowPattern&) const = default;
    static RowPattern constant(const HeightRow& r);
};

// Height matrix of one element: a row for every prime, given by finitely many
// exceptional primes plus a tail pattern applied at all remaining primes.
struct HeightMatrix {
    std::vector<std::pair<i64, HeightRow>> exceptions;  // sorted by prime
    RowPattern tail = RowPattern::constant(HeightRow::gapless(0));

    HeightRow row_at(i64 p) const;
    void set_exception(i64 p, HeightRow r);
    std::vector<i64> exception_primes() const;
    i64 max_exception_index() const;  // 0 when there are no exceptions
    bool operator==(const HeightMatrix&) const = default;
};

// Comparison that holds for all prime indices n >= watermark.
struct EventualVerdict {
    bool eventually = false;
    i64 watermark = 1;
};

// Decides whether r1(n) <= r2(n) pointwise for all indices, for every n from
// some point on, by exact case analysis over the linear forms involved.
EventualVerdict pattern_le_eventually(const RowPattern& r1, const RowPattern& r2, i64 n_lo = 1);

// Matrix of m*x from the matrix of x: the row at p shifts left by v_p(m).
HeightMatrix matrix_scale(const HeightMatrix& h, i64 m);

// Pointwise comparison at every prime and every index.
bool matrix_le(const HeightMatrix& h1, const HeightMatrix& h2);

// Searches multipliers m, m' with scale(h1, m) == scale(h2, m').
std::optional<std::pair<i64, i64>> walk_equiv(const HeightMatrix& h1, const HeightMatrix& h2);

// Searches a multiplier m with h1 <= scale(h2, m).  Finding one certifies the
// relation; the converse direction is not claimed.
std::optional<i64> walk_le(const HeightMatrix& h1, const HeightMatrix& h2);

// Classical order on types of torsion-free rank-one groups.  Both matrices
// must be characteristics: rows gapless or infinite from some index, no
// finite jumps anywhere.  Throws NotACharacteristic otherwise.
bool type_le(const HeightMatrix& t1, const HeightMatrix& t2);

// Prime-indexed family of naturals-with-infinity and a symbolic tail.
struct NatFamily {
    enum class Tail { Const, Linear, Infinite };

    std::vector<std::pair<i64, ExtNat>> exceptions;  // sorted by prime
    Tail tail_kind = Tail::Const;
    ExtNat tail_const = ExtNat::of(0);
    LinExpr tail_lin;

    static NatFamily constant(i64 v);
    static NatFamily linear(i64 a, i64 b);
    static NatFamily infinite();

    ExtNat at_index(i64 n) const;
    ExtNat at_prime(i64 p) const;
    void set_exception(i64 p, ExtNat v);
    void normalize();
    // Normalized, with exceptions that merely repeat the tail dropped.
    NatFamily canonical() const;
    // A prime with a nonzero value, if any.
    std::optional<i64> first_nonzero_prime() const;

    // Least finite bound over all primes, or nullopt when unbounded.
    std::optional<i64> sup() const;
    std::vector<i64> unbounded_witness_primes(int count = 3) const;
    NatFamily plus(const NatFamily& o) const;
    NatFamily scaled(i64 c) const;
    bool is_zero() const;
    i64 max_exception_index() const;
    bool operator==(const NatFamily&) const = default;
};

}  // namespace hopfian
