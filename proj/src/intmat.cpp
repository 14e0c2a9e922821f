#include "hopfian/intmat.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "hopfian/errors.hpp"

namespace hopfian {

namespace {
i64 checked(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN) throw OverflowError(what);
    return static_cast<i64>(v);
}
}  // namespace

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
    if (rows.empty()) return Mat();
    Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows(); ++r) {
        if (rows[r].size() != rows[0].size())
            throw std::invalid_argument("Mat::from_rows: ragged rows");
        for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Vec Mat::row(int r) const {
    Vec v(cols_);
    for (int c = 0; c < cols_; ++c) v[c] = (*this)(r, c);
    return v;
}

Vec Mat::col(int c) const {
    Vec v(rows_);
    for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

void Mat::set_row(int r, const Vec& v) {
    for (int c = 0; c < cols_; ++c) (*this)(r, c) = v[c];
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

bool Mat::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](i64 x) { return x == 0; });
}

void Mat::swap_rows(int i, int j) {
    for (int c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
}

void Mat::swap_cols(int i, int j) {
    for (int r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
}

void Mat::negate_row(int i) {
    for (int c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
}

void Mat::negate_col(int i) {
    for (int r = 0; r < rows_; ++r) (*this)(r, i) = -(*this)(r, i);
}

void Mat::add_row_multiple(int dst, int src, i64 f) {
    for (int c = 0; c < cols_; ++c) {
        __int128 v = static_cast<__int128>((*this)(dst, c)) + static_cast<__int128>(f) * (*this)(src, c);
        (*this)(dst, c) = checked(v, "row operation");
    }
}

void Mat::add_col_multiple(int dst, int src, i64 f) {
    for (int r = 0; r < rows_; ++r) {
        __int128 v = static_cast<__int128>((*this)(r, dst)) + static_cast<__int128>(f) * (*this)(r, src);
        (*this)(r, dst) = checked(v, "column operation");
    }
}

std::string Mat::str() const {
    std::ostringstream os;
    os << "[";
    for (int r = 0; r < rows_; ++r) {
        os << (r ? "; " : "");
        for (int c = 0; c < cols_; ++c) os << (c ? " " : "") << (*this)(r, c);
    }
    os << "]";
    return os.str();
}

Mat mat_mul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("mat_mul: shape mismatch");
    Mat r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            __int128 acc = 0;
            for (int t = 0; t < a.cols(); ++t)
                acc += static_cast<__int128>(a(i, t)) * b(t, j);
            r(i, j) = checked(acc, "matrix product");
        }
    return r;
}

Vec mat_vec(const Mat& a, const Vec& x) {
    if (a.cols() != static_cast<int>(x.size())) throw std::invalid_argument("mat_vec: shape mismatch");
    Vec r(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        __int128 acc = 0;
        for (int t = 0; t < a.cols(); ++t)
            acc += static_cast<__int128>(a(i, t)) * x[t];
        r[i] = checked(acc, "matrix-vector product");
    }
    return r;
}

namespace {

// Elementary operations applied to s are mirrored into the transform
// matrices so that u * m * v == s stays invariant.
struct SnfWork {
    Mat s, u, v, u_inv, v_inv;

    void swap_rows(int i, int j) {
        s.swap_rows(i, j);
        u.swap_rows(i, j);
        u_inv.swap_cols(i, j);
    }
    void swap_cols(int i, int j) {
        s.swap_cols(i, j);
        v.swap_cols(i, j);
        v_inv.swap_rows(i, j);
    }
    void negate_row(int i) {
        s.negate_row(i);
        u.negate_row(i);
        u_inv.negate_col(i);
    }
    void add_row(int dst, int src, i64 f) {  // row[dst] += f * row[src]
        s.add_row_multiple(dst, src, f);
        u.add_row_multiple(dst, src, f);
        u_inv.add_col_multiple(src, dst, -f);
    }
    void add_col(int dst, int src, i64 f) {  // col[dst] += f * col[src]
        s.add_col_multiple(dst, src, f);
        v.add_col_multiple(dst, src, f);
        v_inv.add_row_multiple(src, dst, -f);
    }
};

// Smallest nonzero entry by absolute value in the submatrix at (i,i).
bool smallest_nonzero(const Mat& m, int i, int* pr, int* pc) {
    bool found = false;
    i64 best = 0;
    for (int r = i; r < m.rows(); ++r)
        for (int c = i; c < m.cols(); ++c) {
            i64 a = m(r, c);
            if (a == 0) continue;
            if (!found || std::llabs(a) < best) {
                found = true;
                best = std::llabs(a);
                *pr = r;
                *pc = c;
            }
        }
    return found;
}

}  // namespace

SnfResult smith_normal_form(const Mat& m) {
    SnfWork w{m, Mat::identity(m.rows()), Mat::identity(m.cols()),
              Mat::identity(m.rows()), Mat::identity(m.cols())};
    int n = std::min(m.rows(), m.cols());
    for (int i = 0; i < n; ++i) {
        int pr, pc;
        if (!smallest_nonzero(w.s, i, &pr, &pc)) break;
        for (;;) {
            smallest_nonzero(w.s, i, &pr, &pc);
            if (pr != i) w.swap_rows(i, pr);
            if (pc != i) w.swap_cols(i, pc);
            if (w.s(i, i) < 0) w.negate_row(i);
            i64 pivot = w.s(i, i);
            bool clean = true;
            for (int r = i + 1; r < w.s.rows(); ++r) {
                if (w.s(r, i) == 0) continue;
                w.add_row(r, i, -(w.s(r, i) / pivot));
                if (w.s(r, i) != 0) clean = false;
            }
            for (int c = i + 1; c < w.s.cols(); ++c) {
                if (w.s(i, c) == 0) continue;
                w.add_col(c, i, -(w.s(i, c) / pivot));
                if (w.s(i, c) != 0) clean = false;
            }
            if (!clean) continue;
            // Pivot is lone; enforce divisibility into the trailing block.
            bool divides = true;
            for (int r = i + 1; r < w.s.rows() && divides; ++r)
                for (int c = i + 1; c < w.s.cols() && divides; ++c)
                    if (w.s(r, c) % pivot != 0) {
                        w.add_row(i, r, 1);
                        divides = false;
                    }
            if (divides) break;
        }
    }
    SnfResult out{std::move(w.s), std::move(w.u), std::move(w.v),
                  std::move(w.u_inv), std::move(w.v_inv)};
    out.diag.resize(n);
    for (int i = 0; i < n; ++i) {
        out.diag[i] = out.s(i, i);
        if (out.diag[i] != 0) ++out.rank;
    }
    return out;
}

i64 GroupStructure::order() const {
    if (!finite()) throw std::invalid_argument("order of an infinite group");
    i64 o = 1;
    for (i64 d : invariant_factors) o = checked(static_cast<__int128>(o) * d, "group order");
    return o;
}

std::string GroupStructure::str() const {
    std::ostringstream os;
    bool first = true;
    for (i64 d : invariant_factors) {
        os << (first ? "" : " + ") << "Z/" << d;
        first = false;
    }
    for (i64 i = 0; i < free_rank; ++i) {
        os << (first ? "" : " + ") << "Z";
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

GroupStructure cokernel_structure(const Mat& rel_rows) {
    GroupStructure g;
    if (rel_rows.rows() == 0) {
        g.free_rank = rel_rows.cols();
        return g;
    }
    SnfResult snf = smith_normal_form(rel_rows);
    g.free_rank = rel_rows.cols() - snf.rank;
    for (i64 d : snf.diag)
        if (d >= 2) g.invariant_factors.push_back(d);
    return g;
}

Mat hnf_rows(const Mat& m) {
    Mat h = m;
    int pivot_row = 0;
    for (int col = 0; col < h.cols() && pivot_row < h.rows(); ++col) {
        // Shrink the column below pivot_row to a single nonzero entry.
        for (;;) {
            int best = -1;
            for (int r = pivot_row; r < h.rows(); ++r)
                if (h(r, col) != 0 && (best < 0 || std::llabs(h(r, col)) < std::llabs(h(best, col))))
                    best = r;
            if (best < 0) break;
            if (best != pivot_row) h.swap_rows(pivot_row, best);
            if (h(pivot_row, col) < 0) h.negate_row(pivot_row);
            bool clean = true;
            for (int r = pivot_row + 1; r < h.rows(); ++r) {
                if (h(r, col) == 0) continue;
                h.add_row_multiple(r, pivot_row, -floor_div(h(r, col), h(pivot_row, col)));
                if (h(r, col) != 0) clean = false;
            }
            if (clean) break;
        }
        if (h(pivot_row, col) == 0) continue;
        for (int r = 0; r < pivot_row; ++r) {
            i64 q = floor_div(h(r, col), h(pivot_row, col));
            if (q != 0) h.add_row_multiple(r, pivot_row, -q);
        }
        ++pivot_row;
    }
    Mat out(pivot_row, h.cols());
    for (int r = 0; r < pivot_row; ++r) out.set_row(r, h.row(r));
    return out;
}

std::vector<int> hnf_pivot_cols(const Mat& h) {
    std::vector<int> pivots;
    for (int r = 0; r < h.rows(); ++r) {
        int c = 0;
        while (c < h.cols() && h(r, c) == 0) ++c;
        if (c == h.cols()) throw std::invalid_argument("hnf_pivot_cols: zero row");
        pivots.push_back(c);
    }
    return pivots;
}

Vec reduce_mod_rows(const Mat& h, Vec x) {
    if (h.rows() == 0) return x;
    if (static_cast<int>(x.size()) != h.cols())
        throw std::invalid_argument("reduce_mod_rows: size mismatch");
    std::vector<int> pivots = hnf_pivot_cols(h);
    for (int r = 0; r < h.rows(); ++r) {
        int c = pivots[r];
        i64 q = floor_div(x[c], h(r, c));
        if (q == 0) continue;
        for (int j = 0; j < h.cols(); ++j)
            x[j] = checked(static_cast<__int128>(x[j]) - static_cast<__int128>(q) * h(r, j),
                           "lattice reduction");
    }
    return x;
}

bool lattice_contains(const Mat& h, const Vec& x) {
    Vec r = reduce_mod_rows(h, x);
    return std::all_of(r.begin(), r.end(), [](i64 v) { return v == 0; });
}

Mat kernel_basis_cols(const Mat& m) {
    SnfResult snf = smith_normal_form(m);
    int k = m.cols() - snf.rank;
    Mat out(m.cols(), k);
    for (int j = 0; j < k; ++j)
        for (int r = 0; r < m.cols(); ++r) out(r, j) = snf.v(r, snf.rank + j);
    return out;
}

Mat preimage_lattice(const Mat& a, const Mat& lat_rows) {
    int n = a.cols();
    if (a.rows() != n) throw std::invalid_argument("preimage_lattice: endomorphism matrix must be square");
    if (lat_rows.cols() != n && lat_rows.rows() != 0)
        throw std::invalid_argument("preimage_lattice: lattice dimension mismatch");
    int l = lat_rows.rows();
    Mat m(n, n + l);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = a(r, c);
    for (int j = 0; j < l; ++j)
        for (int r = 0; r < n; ++r) m(r, n + j) = -lat_rows(j, r);
    Mat ker = kernel_basis_cols(m);
    Mat gens(ker.cols(), n);
    for (int j = 0; j < ker.cols(); ++j)
        for (int c = 0; c < n; ++c) gens(j, c) = ker(c, j);
    return hnf_rows(gens);
}

Mat lattice_sum(const Mat& a, const Mat& b) {
    if (a.rows() == 0) return hnf_rows(b);
    if (b.rows() == 0) return hnf_rows(a);
    if (a.cols() != b.cols()) throw std::invalid_argument("lattice_sum: dimension mismatch");
    Mat m(a.rows() + b.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r) m.set_row(r, a.row(r));
    for (int r = 0; r < b.rows(); ++r) m.set_row(a.rows() + r, b.row(r));
    return hnf_rows(m);
}

std::optional<Vec> solve_in_column_span(const Mat& basis_cols, const Vec& target) {
    SnfResult snf = smith_normal_form(basis_cols);
    Vec c = mat_vec(snf.u, target);
    Vec w(basis_cols.cols(), 0);
    for (int i = 0; i < static_cast<int>(c.size()); ++i) {
        if (i < static_cast<int>(snf.diag.size()) && snf.diag[i] != 0) {
            if (c[i] % snf.diag[i] != 0) return std::nullopt;
            w[i] = c[i] / snf.diag[i];
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    return mat_vec(snf.v, w);
}

GroupStructure lattice_quotient_structure(const Mat& k_rows, const Mat& l_rows) {
    Mat kb = hnf_rows(k_rows);
    if (l_rows.rows() == 0 || l_rows.is_zero()) {
        GroupStructure g;
        g.free_rank = kb.rows();
        return g;
    }
    Mat basis_cols = kb.transpose();
    Mat coords(l_rows.rows(), kb.rows());
    for (int j = 0; j < l_rows.rows(); ++j) {
        auto sol = solve_in_column_span(basis_cols, l_rows.row(j));
        if (!sol) throw std::invalid_argument("lattice_quotient_structure: L is not inside K");
        coords.set_row(j, *sol);
    }
    return cokernel_structure(coords);
}

}  // namespace hopfian
