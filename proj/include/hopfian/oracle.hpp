#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopfian/classify.hpp"
#include "hopfian/descriptors.hpp"
#include "hopfian/fpgroup.hpp"

namespace hopfian {

// Concrete rank-1 mixed group at one prime: free generator x plus a tower
// y^1..y^{sigma-1} that buys p^m x extra divisibility.  The relations are
// p*y^1 = p^(m+k)*x and p*y^i = y^(i-1), giving structure Z + Z/p^e with
// e = m + k, torsion generated by t = x - y^e, and the distinguished element
// z = p^m x whose height sequence has base m and one jump of gap j at
// position k.
struct Rank1Model {
    i64 p, m, k, j;
    FinPresGroup group;

    i64 e() const { return m + k; }
    i64 sigma() const { return e() + j + 1; }
    GroupElement x() const;
    GroupElement y(i64 i) const;  // 1 <= i < sigma
    GroupElement z() const;
    GroupElement t() const;
};

// Builds the model and verifies the structure and the height sequence of z;
// throws Inconsistent if either fails, CapExceeded when sigma is beyond desk
// scale.
Rank1Model build_rank1_model(i64 p, i64 m, i64 k, i64 j);

enum class EndoCase { Case1, Case2 };

// Case1 (needs j <= k): x -> 0, y^i -> p^(sigma-1-i) (y^e - x); acts on the
// torsion generator as multiplication by p^j.  Case2 (needs k <= j):
// x -> p^k (x - y^e), y^i -> 0; acts as multiplication by p^k.  Both send z
// to 0.  Throws CaseMismatch when the parameter inequality fails.
Endomorphism case_endomorphism(const Rank1Model& M, EndoCase which);

// j for Case1, k for Case2.
i64 case_action_exponent(const Rank1Model& M, EndoCase which);

// Kernel-chain stabilization index of the case endomorphism restricted to
// the torsion subgroup: computed on Z/p^e as multiplication by p^l with
// l = min(j, k), and cross-checked against powers of the endomorphism
// applied to t in the model.  Equals ceil(e / l).
i64 torsion_chain_index(const Rank1Model& M, EndoCase which);

// Reduced fraction; den >= 1.
struct Rational {
    i64 num = 0, den = 1;
    bool is_zero() const { return num == 0; }
    bool operator==(const Rational&) const = default;
    std::string str() const;
};

Rational make_rational(i64 num, i64 den);
Rational rational_mul(const Rational& a, const Rational& b);
Rational rational_add(const Rational& a, const Rational& b);
i64 rational_valuation(const Rational& q, i64 p);  // v_p(num) - v_p(den)

// Subgroup of Q containing 1: q belongs iff every denominator exponent stays
// within the characteristic.
struct RationalGroup {
    NatFamily characteristic;
    bool operator==(const RationalGroup&) const = default;
};

bool rational_contains(const RationalGroup& g, const Rational& q);

// Some(r) iff multiplication by r maps src into dst, i.e. v_p(r) >=
// src_p - dst_p at every prime, decided symbolically on the tails.
std::optional<Rational> rational_hom(const RationalGroup& src, const RationalGroup& dst,
                                     const Rational& r);

// The minimal nonnegative-power multiplier witnessing src -> dst, when one
// exists.
std::optional<Rational> rational_witness_multiplier(const RationalGroup& src,
                                                    const RationalGroup& dst);

// Shift endomorphism on G_1 + ... + G_k assembled from per-level
// multipliers, zero on the last level.  The probe lives in G_1; the
// trajectory is its orbit, nonzero through step k-1 and zero at step k, so
// the kernel chain of the shift has index >= k.
struct ChainWitnessPlan {
    i64 k = 0;
    std::vector<RationalGroup> groups;
    std::vector<Rational> multipliers;  // size k-1, level i maps G_i -> G_(i+1)
    Rational probe;
    std::vector<Rational> trajectory;  // probe, phi(probe), ..., phi^(k-1)(probe)
};

// Throws NoWitness when some consecutive pair admits no multiplier,
// CapExceeded past max_chain.
ChainWitnessPlan chain_witness(const std::vector<RationalGroup>& groups, i64 max_chain = 6);

struct OracleOptions {
    i64 prime_budget = 4;   // families probed at the first N primes
    i64 endo_budget = 1 << 17;
    i64 max_chain = 6;
    i64 j_cap = 6;          // stand-in for j = inf in concrete models
    i64 order_budget = 1 << 14;  // largest finite group to brute-force
    bool operator==(const OracleOptions&) const = default;
};

struct OracleCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct OracleReport {
    bool consistent = false;
    std::vector<OracleCheck> checks;
    std::vector<std::string> truncations;  // every cap that shaped the evidence
};

// Desk-scale evidence that the verdict is right: brute force on finite
// instantiations, per-prime models for rank-1 entries, executed chain plans
// and truncated unbounded families for No verdicts.  Throws
// Inconsistent when any check fails; evidence is consistency, not proof.
OracleReport cross_check(const GroupDescriptor& g, const Classification& verdict,
                         const OracleOptions& opts = {});

}  // namespace hopfian
