#include "hopfian/fpgroup.hpp"

#include <algorithm>
#include <climits>
#include <numeric>
#include <stdexcept>

#include "hopfian/errors.hpp"

namespace hopfian {

FinPresGroup::FinPresGroup(int n_generators, const std::vector<Vec>& relations) : n_(n_generators) {
    if (n_ < 0) throw std::invalid_argument("negative generator count");
    relations_ = Mat(static_cast<int>(relations.size()), n_);
    for (int r = 0; r < relations_.rows(); ++r) {
        if (static_cast<int>(relations[r].size()) != n_)
            throw std::invalid_argument("relation length does not match generator count");
        relations_.set_row(r, relations[r]);
    }
    rel_hnf_ = hnf_rows(relations_);

    SnfResult snf = smith_normal_form(relations_.transpose());
    to_canon_ = snf.u;
    from_canon_ = snf.u_inv;
    canon_diag_.assign(n_, 0);
    for (int i = 0; i < static_cast<int>(snf.diag.size()); ++i) canon_diag_[i] = snf.diag[i];
    structure_.free_rank = n_ - snf.rank;
    for (i64 d : canon_diag_)
        if (d >= 2) structure_.invariant_factors.push_back(d);
}

FinPresGroup FinPresGroup::direct_sum_cyclic(const std::vector<i64>& orders) {
    int n = static_cast<int>(orders.size());
    std::vector<Vec> rels;
    for (int i = 0; i < n; ++i) {
        if (orders[i] < 0) throw std::invalid_argument("cyclic order must be >= 0");
        if (orders[i] == 0) continue;
        Vec r(n, 0);
        r[i] = orders[i];
        rels.push_back(r);
    }
    if (!rels.empty()) return FinPresGroup(n, rels);
    return FinPresGroup(n, std::vector<Vec>{});
}

GroupElement FinPresGroup::element(Vec coeffs) const {
    if (static_cast<int>(coeffs.size()) != n_)
        throw std::invalid_argument("element coefficient length mismatch");
    return GroupElement{reduce_mod_rows(rel_hnf_, std::move(coeffs))};
}

GroupElement FinPresGroup::zero() const { return GroupElement{Vec(n_, 0)}; }

GroupElement FinPresGroup::generator(int i) const {
    Vec v(n_, 0);
    v[i] = 1;
    return element(std::move(v));
}

GroupElement FinPresGroup::add(const GroupElement& a, const GroupElement& b) const {
    Vec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = a.coeffs[i] + b.coeffs[i];
    return element(std::move(v));
}

GroupElement FinPresGroup::negate(const GroupElement& a) const {
    Vec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = -a.coeffs[i];
    return element(std::move(v));
}

GroupElement FinPresGroup::scale(i64 m, const GroupElement& a) const {
    Vec v(n_);
    for (int i = 0; i < n_; ++i) {
        __int128 x = static_cast<__int128>(m) * a.coeffs[i];
        if (x > INT64_MAX || x < INT64_MIN) throw OverflowError("element scaling");
        v[i] = static_cast<i64>(x);
    }
    return element(std::move(v));
}

bool FinPresGroup::is_zero(const GroupElement& a) const {
    return std::all_of(a.coeffs.begin(), a.coeffs.end(), [](i64 x) { return x == 0; });
}

Vec FinPresGroup::canonical_coords(const GroupElement& a) const {
    Vec y = mat_vec(to_canon_, a.coeffs);
    for (int i = 0; i < n_; ++i) {
        i64 d = canon_diag_[i];
        if (d == 1) y[i] = 0;
        else if (d >= 2) y[i] = ((y[i] % d) + d) % d;
    }
    return y;
}

ExtNat FinPresGroup::element_order(const GroupElement& a) const {
    Vec y = canonical_coords(a);
    i64 ord = 1;
    for (int i = 0; i < n_; ++i) {
        i64 d = canon_diag_[i];
        if (d == 0) {
            if (y[i] != 0) return ExtNat::inf();
            continue;
        }
        if (d == 1 || y[i] == 0) continue;
        i64 o = d / std::gcd(d, y[i]);
        ord = std::lcm(ord, o);
    }
    return ExtNat::of(ord);
}

std::vector<GroupElement> FinPresGroup::canonical_generators() const {
    std::vector<GroupElement> gens;
    for (int i = 0; i < n_; ++i) {
        if (canon_diag_[i] == 1) continue;
        gens.push_back(element(from_canon_.col(i)));
    }
    return gens;
}

std::vector<i64> FinPresGroup::canonical_orders() const {
    std::vector<i64> orders;
    for (int i = 0; i < n_; ++i)
        if (canon_diag_[i] != 1) orders.push_back(canon_diag_[i]);
    return orders;
}

ExtNat FinPresGroup::p_height(const GroupElement& a, i64 p) const {
    return p_height_sequence(a, p, 1)[0];
}

std::vector<ExtNat> FinPresGroup::p_height_sequence(const GroupElement& a, i64 p, int length) const {
    if (p < 2) throw std::invalid_argument("p must be a prime >= 2");
    Vec y = mat_vec(to_canon_, a.coeffs);
    // Per canonical coordinate: the p-valuation of the coordinate and, for
    // torsion coordinates, the p-exponent at which the component dies.
    struct Contrib {
        i64 val;
        i64 limit;  // finite for torsion coordinates, -1 for free ones
    };
    std::vector<Contrib> contribs;
    for (int i = 0; i < n_; ++i) {
        i64 d = canon_diag_[i];
        if (d == 1 || y[i] == 0) continue;
        i64 t = valuation(y[i], p);
        if (d == 0) {
            contribs.push_back({t, -1});
        } else {
            i64 limit = valuation(d, p);
            if (limit == 0 || t >= limit) continue;  // p-part of this component is divisible or zero
            contribs.push_back({t, limit});
        }
    }
    std::vector<ExtNat> out;
    out.reserve(length);
    for (int step = 0; step < length; ++step) {
        ExtNat h = ExtNat::inf();
        for (const Contrib& c : contribs) {
            if (c.limit >= 0 && c.val + step >= c.limit) continue;
            h = min(h, ExtNat::of(c.val + step));
        }
        out.push_back(h);
    }
    return out;
}

i64 FinPresGroup::ulm_invariant(i64 p, i64 k) const {
    if (p < 2) throw std::invalid_argument("p must be a prime >= 2");
    if (k < 0) throw std::invalid_argument("k must be >= 0");
    i64 count = 0;
    for (i64 d : structure_.invariant_factors)
        if (valuation(d, p) == k + 1) ++count;
    return count;
}

Endomorphism FinPresGroup::endomorphism_from_matrix(Mat images) const {
    if (images.rows() != n_ || images.cols() != n_)
        throw std::invalid_argument("endomorphism matrix must be n x n");
    for (int c = 0; c < n_; ++c) {
        Vec col = reduce_mod_rows(rel_hnf_, images.col(c));
        for (int r = 0; r < n_; ++r) images(r, c) = col[r];
    }
    for (int r = 0; r < rel_hnf_.rows(); ++r) {
        Vec image_of_relation = mat_vec(images, rel_hnf_.row(r));
        if (!lattice_contains(rel_hnf_, image_of_relation))
            throw std::invalid_argument("generator images do not respect the relations");
    }
    return Endomorphism(std::move(images));
}

Endomorphism FinPresGroup::endomorphism(const std::vector<GroupElement>& generator_images) const {
    if (static_cast<int>(generator_images.size()) != n_)
        throw std::invalid_argument("need one image per generator");
    Mat a(n_, n_);
    for (int c = 0; c < n_; ++c)
        for (int r = 0; r < n_; ++r) a(r, c) = generator_images[c].coeffs[r];
    return endomorphism_from_matrix(std::move(a));
}

Endomorphism FinPresGroup::endomorphism_on_canonical(const std::vector<GroupElement>& images) const {
    Mat full(n_, n_);
    int pos = 0;
    for (int i = 0; i < n_; ++i) {
        if (canon_diag_[i] == 1) continue;
        if (pos >= static_cast<int>(images.size()))
            throw std::invalid_argument("need one image per canonical generator");
        for (int r = 0; r < n_; ++r) full(r, i) = images[pos].coeffs[r];
        ++pos;
    }
    if (pos != static_cast<int>(images.size()))
        throw std::invalid_argument("need one image per canonical generator");
    return endomorphism_from_matrix(mat_mul(full, to_canon_));
}

GroupElement FinPresGroup::apply(const Endomorphism& f, const GroupElement& a) const {
    return element(mat_vec(f.matrix(), a.coeffs));
}

Endomorphism FinPresGroup::compose(const Endomorphism& f, const Endomorphism& g) const {
    return endomorphism_from_matrix(mat_mul(f.matrix(), g.matrix()));
}

ChainReport FinPresGroup::kernel_chain(const Endomorphism& f, i64 cap) const {
    ChainReport report;
    Mat kernel = rel_hnf_;  // ker f^0 as a lattice above the relations
    Mat image = hnf_rows(lattice_sum(Mat::identity(n_), rel_hnf_));  // im f^0 = G
    report.kernel_structures.push_back(GroupStructure{});
    report.image_structures.push_back(structure_);
    for (i64 i = 1; i <= cap; ++i) {
        Mat next_kernel = preimage_lattice(f.matrix(), kernel);
        if (next_kernel == kernel) {
            report.stabilization_index = i - 1;
            return report;
        }
        Mat mapped(image.rows(), n_);
        for (int r = 0; r < image.rows(); ++r)
            mapped.set_row(r, reduce_mod_rows(rel_hnf_, mat_vec(f.matrix(), image.row(r))));
        Mat next_image = lattice_sum(mapped, rel_hnf_);
        kernel = std::move(next_kernel);
        image = std::move(next_image);
        report.kernel_structures.push_back(lattice_quotient_structure(kernel, rel_hnf_));
        report.image_structures.push_back(lattice_quotient_structure(image, rel_hnf_));
    }
    throw CapExceeded(cap);
}

std::vector<GroupElement> FinPresGroup::elements() const {
    if (!finite()) throw std::invalid_argument("cannot enumerate an infinite group");
    std::vector<int> coords;
    for (int i = 0; i < n_; ++i)
        if (canon_diag_[i] >= 2) coords.push_back(i);
    std::vector<GroupElement> out;
    Vec digits(coords.size(), 0);
    for (;;) {
        Vec y(n_, 0);
        for (std::size_t t = 0; t < coords.size(); ++t) y[coords[t]] = digits[t];
        out.push_back(element(mat_vec(from_canon_, y)));
        std::size_t t = coords.size();
        while (t > 0) {
            --t;
            if (++digits[t] < canon_diag_[coords[t]]) break;
            digits[t] = 0;
            if (t == 0) return out;
        }
        if (coords.empty()) return out;
    }
}

namespace {
i64 saturating_mul(i64 a, i64 b) {
    __int128 v = static_cast<__int128>(a) * b;
    return v > INT64_MAX ? INT64_MAX : static_cast<i64>(v);
}
}  // namespace

EndoStream::EndoStream(const FinPresGroup& g, i64 budget) : g_(&g) {
    if (!g.finite()) throw std::invalid_argument("endomorphism enumeration needs a finite group");
    std::vector<i64> orders = g.canonical_orders();
    int m = static_cast<int>(orders.size());
    total_ = 1;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            i64 gij = std::gcd(orders[i], orders[j]);
            gcds_.push_back(gij);
            steps_.push_back(orders[j] / gij);
            tgt_.push_back(j);
            src_.push_back(i);
            total_ = saturating_mul(total_, gij);
        }
    if (total_ > budget) throw BudgetExceeded(total_);
    counters_.assign(gcds_.size(), 0);
}

void EndoStream::reset() {
    std::fill(counters_.begin(), counters_.end(), 0);
    done_ = false;
}

std::optional<Endomorphism> EndoStream::next() {
    if (done_) return std::nullopt;
    std::vector<GroupElement> gens = g_->canonical_generators();
    int m = static_cast<int>(gens.size());
    std::vector<GroupElement> images(m, g_->zero());
    for (int i = 0; i < m; ++i) {
        GroupElement img = g_->zero();
        for (std::size_t d = 0; d < counters_.size(); ++d) {
            if (src_[d] != i || counters_[d] == 0) continue;
            img = g_->add(img, g_->scale(steps_[d] * counters_[d], gens[tgt_[d]]));
        }
        images[i] = img;
    }
    // Advance the odometer, last digit fastest.
    std::size_t t = counters_.size();
    if (t == 0) {
        done_ = true;
    } else {
        for (;;) {
            --t;
            if (++counters_[t] < gcds_[t]) break;
            counters_[t] = 0;
            if (t == 0) {
                done_ = true;
                break;
            }
        }
    }
    return g_->endomorphism_on_canonical(images);
}

i64 count_endomorphisms(const FinPresGroup& g) {
    if (!g.finite()) throw std::invalid_argument("endomorphism count needs a finite group");
    std::vector<i64> orders = g.canonical_orders();
    i64 total = 1;
    for (i64 a : orders)
        for (i64 b : orders) total = saturating_mul(total, std::gcd(a, b));
    return total;
}

i64 min_uniform_sh_exponent(const FinPresGroup& g, i64 budget, i64 cap) {
    EndoStream stream(g, budget);
    i64 best = 0;
    while (auto f = stream.next())
        best = std::max(best, g.kernel_chain(*f, cap).stabilization_index);
    return best;
}

}  // namespace hopfian
