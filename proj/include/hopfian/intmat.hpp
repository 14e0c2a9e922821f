#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hopfian/primes.hpp"

namespace hopfian {

using Vec = std::vector<i64>;

// Dense row-major matrix over the 64-bit integers.  All arithmetic is exact;
// operations that would overflow throw OverflowError instead of wrapping.
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0) {}
    static Mat identity(int n);
    static Mat from_rows(const std::vector<Vec>& rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    i64& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    i64 operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    Vec row(int r) const;
    Vec col(int c) const;
    void set_row(int r, const Vec& v);
    Mat transpose() const;
    bool is_zero() const;
    bool operator==(const Mat& other) const = default;

    void swap_rows(int i, int j);
    void swap_cols(int i, int j);
    void negate_row(int i);
    void negate_col(int i);
    void add_row_multiple(int dst, int src, i64 f);  // row[dst] += f * row[src]
    void add_col_multiple(int dst, int src, i64 f);

    std::string str() const;

private:
    int rows_, cols_;
    std::vector<i64> a_;
};

Mat mat_mul(const Mat& a, const Mat& b);
Vec mat_vec(const Mat& a, const Vec& x);

// Smith normal form: u * m * v == s with u, v unimodular and the diagonal of s
// nonnegative with s(i,i) | s(i+1,i+1).  u_inv and v_inv are the inverses.
struct SnfResult {
    Mat s, u, v, u_inv, v_inv;
    int rank = 0;
    std::vector<i64> diag;  // min(rows, cols) entries of s
};

SnfResult smith_normal_form(const Mat& m);

// Group-structure summary of a cokernel or lattice quotient.
struct GroupStructure {
    i64 free_rank = 0;
    std::vector<i64> invariant_factors;  // each >= 2, ascending divisibility

    bool finite() const { return free_rank == 0; }
    i64 order() const;  // throws when infinite
    bool operator==(const GroupStructure&) const = default;
    std::string str() const;
};

// Structure of Z^cols / (row span of rel_rows).
GroupStructure cokernel_structure(const Mat& rel_rows);

// Row-style Hermite normal form of the row lattice: returns a basis matrix
// whose rows are in echelon form with positive pivots and entries above each
// pivot reduced into [0, pivot).  Zero rows are dropped.
Mat hnf_rows(const Mat& m);

// Pivot column of each row of a matrix in row HNF.
std::vector<int> hnf_pivot_cols(const Mat& h);

// Canonical representative of x modulo the row lattice of h (h in row HNF).
Vec reduce_mod_rows(const Mat& h, Vec x);

bool lattice_contains(const Mat& h, const Vec& x);

// Basis of the integer kernel {x : m x = 0}, one generator per column.
Mat kernel_basis_cols(const Mat& m);

// Row basis of {x in Z^n : a x lies in the row lattice of lat_rows}.
// a must be n x n and lat_rows must have n columns.
Mat preimage_lattice(const Mat& a, const Mat& lat_rows);

// Row basis of the sum of two row lattices.
Mat lattice_sum(const Mat& a, const Mat& b);

// Structure of lattice(k_rows)/lattice(l_rows); requires l <= k as lattices.
GroupStructure lattice_quotient_structure(const Mat& k_rows, const Mat& l_rows);

// Solve basis_cols * y = target exactly over the integers (basis has full
// column rank).  Returns nullopt when target is outside the column span.
std::optional<Vec> solve_in_column_span(const Mat& basis_cols, const Vec& target);

}  // namespace hopfian
