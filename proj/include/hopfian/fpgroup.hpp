#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopfian/intmat.hpp"

namespace hopfian {

// Natural number extended with a single infinite element.  Used for heights
// and exponents; infinity is absorbing for + and maximal for the order.
struct ExtNat {
    bool is_inf = false;
    i64 v = 0;

    static ExtNat inf() { return {true, 0}; }
    static ExtNat of(i64 x) { return {false, x}; }

    bool operator==(const ExtNat&) const = default;
    bool operator<=(const ExtNat& o) const { return o.is_inf || (!is_inf && v <= o.v); }
    ExtNat operator+(const ExtNat& o) const {
        if (is_inf || o.is_inf) return inf();
        return of(v + o.v);
    }
    std::string str() const { return is_inf ? "inf" : std::to_string(v); }
};

inline ExtNat min(const ExtNat& a, const ExtNat& b) { return a <= b ? a : b; }

// Element of a finitely presented abelian group, stored as the canonical
// generator-coefficient vector modulo the relation lattice.
struct GroupElement {
    Vec coeffs;
    bool operator==(const GroupElement&) const = default;
};

class FinPresGroup;

// Endomorphism given by generator images; constructing one checks that every
// relation maps to zero, so instances are well defined by construction.
class Endomorphism {
public:
    const Mat& matrix() const { return images_; }  // column j = image of generator j

private:
    friend class FinPresGroup;
    explicit Endomorphism(Mat images) : images_(std::move(images)) {}
    Mat images_;
};

struct ChainReport {
    i64 stabilization_index = 0;                  // least n with ker f^n == ker f^(n+1)
    std::vector<GroupStructure> kernel_structures;  // ker f^0 .. ker f^n
    std::vector<GroupStructure> image_structures;   // im f^0 .. im f^n
};

// Z^n modulo the row lattice spanned by integer relation vectors.
class FinPresGroup {
public:
    FinPresGroup(int n_generators, const std::vector<Vec>& relations);

    // Convenience presentation of a direct sum of cyclic groups; order 0 means Z.
    static FinPresGroup direct_sum_cyclic(const std::vector<i64>& orders);

    int n_generators() const { return n_; }
    const Mat& relation_lattice() const { return rel_hnf_; }
    const GroupStructure& structure() const { return structure_; }
    bool finite() const { return structure_.finite(); }
    i64 order() const { return structure_.order(); }

    GroupElement element(Vec coeffs) const;
    GroupElement zero() const;
    GroupElement generator(int i) const;
    GroupElement add(const GroupElement& a, const GroupElement& b) const;
    GroupElement negate(const GroupElement& a) const;
    GroupElement scale(i64 m, const GroupElement& a) const;
    bool is_zero(const GroupElement& a) const;
    ExtNat element_order(const GroupElement& a) const;

    // Generator of the i-th canonical cyclic summand (invariant-factor order).
    std::vector<GroupElement> canonical_generators() const;
    std::vector<i64> canonical_orders() const;  // matching invariant factors (0 = free)

    ExtNat p_height(const GroupElement& a, i64 p) const;
    // Heights of x, p x, p^2 x, ...; length entries.
    std::vector<ExtNat> p_height_sequence(const GroupElement& a, i64 p, int length) const;

    // dim over F_p of (p^k G)[p] / (p^(k+1) G)[p].
    i64 ulm_invariant(i64 p, i64 k) const;

    Endomorphism endomorphism(const std::vector<GroupElement>& generator_images) const;
    Endomorphism endomorphism_from_matrix(Mat images) const;
    // Images of the canonical summand generators, one element per nontrivial
    // canonical coordinate (and per free coordinate).
    Endomorphism endomorphism_on_canonical(const std::vector<GroupElement>& images) const;

    GroupElement apply(const Endomorphism& f, const GroupElement& a) const;
    Endomorphism compose(const Endomorphism& f, const Endomorphism& g) const;  // f after g

    ChainReport kernel_chain(const Endomorphism& f, i64 cap = 64) const;

    // All elements of a finite group, deterministic order.
    std::vector<GroupElement> elements() const;

    Vec canonical_coords(const GroupElement& a) const;  // coordinates in the cyclic decomposition

private:
    int n_;
    Mat relations_;
    Mat rel_hnf_;
    GroupStructure structure_;
    Mat to_canon_, from_canon_;  // y = to_canon x maps the presentation to diagonal form
    std::vector<i64> canon_diag_;  // d_1 | d_2 | ... then zeros; 1-entries are trivial coordinates
};

// Streams all endomorphisms of a finite group in a deterministic
// lexicographic order over canonical generator-image coordinates.
// Construction throws BudgetExceeded when |End(G)| is above the budget.
class EndoStream {
public:
    EndoStream(const FinPresGroup& g, i64 budget);

    i64 total() const { return total_; }
    std::optional<Endomorphism> next();
    void reset();

private:
    const FinPresGroup* g_;
    std::vector<i64> gcds_;      // digit bounds, one per (target coord, source coord) pair
    std::vector<i64> steps_;     // image coordinate step for each digit
    std::vector<int> tgt_, src_;
    std::vector<i64> counters_;
    bool done_ = false;
    i64 total_ = 0;
};

i64 count_endomorphisms(const FinPresGroup& g);  // saturates at LLONG_MAX

// Largest kernel-chain stabilization index over all endomorphisms.
i64 min_uniform_sh_exponent(const FinPresGroup& g, i64 budget = 1 << 20, i64 cap = 64);

}  // namespace hopfian
