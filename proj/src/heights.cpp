#include "hopfian/heights.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "hopfian/errors.hpp"

namespace hopfian {

i64 LinExpr::at(i64 n) const {
    __int128 r = static_cast<__int128>(a) * n + b;
    if (r > INT64_MAX || r < INT64_MIN) throw OverflowError("linear form value too large");
    return static_cast<i64>(r);
}

ExtNat HeightRow::value(i64 i) const {
    if (i < 0) throw std::invalid_argument("height index must be >= 0");
    if (infinite_from && i >= *infinite_from) return ExtNat::inf();
    i64 v = base + i;
    for (const Jump& j : jumps)
        if (j.pos <= i) v += j.gap;
    return ExtNat::of(v);
}

HeightRow HeightRow::shifted(i64 s) const {
    if (s < 0) throw std::invalid_argument("shift must be >= 0");
    ExtNat start = value(s);
    if (start.is_inf) {
        HeightRow all_inf;
        all_inf.base = 0;
        all_inf.infinite_from = 0;
        return all_inf;
    }
    HeightRow out;
    out.base = start.v;
    for (const Jump& j : jumps)
        if (j.pos > s) out.jumps.push_back({j.pos - s, j.gap});
    if (infinite_from) out.infinite_from = *infinite_from - s;
    return out.canonical();
}

HeightRow HeightRow::canonical() const {
    HeightRow out;
    if (infinite_from && *infinite_from <= 0) {
        out.base = 0;
        out.infinite_from = 0;
        return out;
    }
    out.base = base;
    out.infinite_from = infinite_from;
    std::vector<Jump> js;
    for (const Jump& j : jumps) {
        if (j.gap == 0) continue;
        if (infinite_from && j.pos >= *infinite_from) continue;
        js.push_back(j);
    }
    std::sort(js.begin(), js.end(), [](const Jump& x, const Jump& y) { return x.pos < y.pos; });
    for (const Jump& j : js) {
        if (!out.jumps.empty() && out.jumps.back().pos == j.pos)
            out.jumps.back().gap += j.gap;
        else
            out.jumps.push_back(j);
    }
    return out;
}

i64 HeightRow::total_gap() const {
    i64 t = 0;
    for (const Jump& j : jumps) t += j.gap;
    return t;
}

i64 HeightRow::last_jump_pos() const {
    i64 m = 0;
    for (const Jump& j : jumps) m = std::max(m, j.pos);
    return m;
}

i64 HeightRow::shift_cap() const {
    i64 edge = last_jump_pos();
    if (infinite_from) edge = std::max(edge, *infinite_from);
    return edge + total_gap() + base + 1;
}

std::vector<std::string> HeightRow::invalid_reasons() const {
    std::vector<std::string> out;
    if (base < 0) out.push_back("row base is negative");
    i64 prev = 0;
    for (const Jump& j : jumps) {
        if (j.pos <= prev) out.push_back("jump positions must be strictly increasing and >= 1");
        if (j.gap < 1) out.push_back("jump gaps must be >= 1");
        prev = j.pos;
    }
    if (infinite_from) {
        if (*infinite_from < 0) out.push_back("infinite_from is negative");
        if (*infinite_from > 0 && *infinite_from <= prev)
            out.push_back("jumps must lie before the infinite part");
        if (*infinite_from == 0 && (base != 0 || !jumps.empty()))
            out.push_back("an everywhere-infinite row must have base 0 and no jumps");
    }
    return out;
}

HeightRow HeightRow::gapless(i64 base_) {
    HeightRow r;
    r.base = base_;
    return r;
}

HeightRow HeightRow::from_values(const std::vector<ExtNat>& values) {
    if (values.empty()) throw std::invalid_argument("empty height sequence");
    HeightRow r;
    std::optional<i64> inf_at;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].is_inf) {
            if (!inf_at) inf_at = static_cast<i64>(i);
        } else if (inf_at) {
            throw std::invalid_argument("height sequence finite after infinity");
        }
    }
    if (inf_at && *inf_at == 0) {
        r.infinite_from = 0;
        return r;
    }
    r.base = values[0].v;
    i64 finite_end = inf_at ? *inf_at : static_cast<i64>(values.size());
    for (i64 i = 1; i < finite_end; ++i) {
        i64 gap = values[i].v - values[i - 1].v - 1;
        if (gap < 0) throw std::invalid_argument("height sequence must rise by at least 1");
        if (gap > 0) r.jumps.push_back({i, gap});
    }
    r.infinite_from = inf_at;
    return r;
}

bool row_le(const HeightRow& r1, const HeightRow& r2) {
    i64 limit = std::max(r1.last_jump_pos(), r2.last_jump_pos());
    if (r1.infinite_from) limit = std::max(limit, *r1.infinite_from);
    if (r2.infinite_from) limit = std::max(limit, *r2.infinite_from);
    for (i64 i = 0; i <= limit + 1; ++i)
        if (!(r1.value(i) <= r2.value(i))) return false;
    return true;
}

HeightRow RowPattern::at(i64 n) const {
    HeightRow r;
    r.base = base.at(n);
    for (const JumpPattern& j : jumps) r.jumps.push_back({j.pos.at(n), j.gap.at(n)});
    if (infinite_from) r.infinite_from = infinite_from->at(n);
    return r.canonical();
}

std::vector<std::string> RowPattern::invalid_reasons(i64 n_lo) const {
    // Monotone-in-n linear forms keep every instance valid past n_lo.
    std::vector<std::string> out;
    auto nondecreasing_at_least = [&](const LinExpr& e, i64 lo, const char* what) {
        if (e.a < 0) out.push_back(std::string(what) + " shrinks as the prime index grows");
        else if (e.at(n_lo) < lo) out.push_back(std::string(what) + " is too small at the first index");
    };
    nondecreasing_at_least(base, 0, "row base");
    LinExpr prev = LinExpr::constant(0);
    for (const JumpPattern& j : jumps) {
        nondecreasing_at_least(j.pos - prev, 1, "jump position step");
        nondecreasing_at_least(j.gap, 1, "jump gap");
        prev = j.pos;
    }
    if (infinite_from) {
        if (jumps.empty()) {
            if (prev == LinExpr::constant(0)) nondecreasing_at_least(*infinite_from, 0, "infinite_from");
        } else {
            nondecreasing_at_least(*infinite_from - prev, 1, "infinite_from");
        }
        if (infinite_from->is_const() && infinite_from->b == 0 &&
            (!(base == LinExpr::constant(0)) || !jumps.empty()))
            out.push_back("an everywhere-infinite row must have base 0 and no jumps");
        if (!infinite_from->is_const() && infinite_from->at(n_lo) == 0 &&
            base.at(n_lo) != 0)
            out.push_back("a row infinite from index 0 at the first prime must have base 0 there");
    }
    return out;
}

RowPattern RowPattern::constant(const HeightRow& r) {
    RowPattern p;
    p.base = LinExpr::constant(r.base);
    for (const Jump& j : r.jumps) p.jumps.push_back({LinExpr::constant(j.pos), LinExpr::constant(j.gap)});
    if (r.infinite_from) p.infinite_from = LinExpr::constant(*r.infinite_from);
    return p;
}

HeightRow HeightMatrix::row_at(i64 p) const {
    for (const auto& [q, r] : exceptions)
        if (q == p) return r;
    return tail.at(prime_index(p));
}

void HeightMatrix::set_exception(i64 p, HeightRow r) {
    for (auto& [q, row] : exceptions) {
        if (q == p) {
            row = std::move(r);
            return;
        }
    }
    exceptions.emplace_back(p, std::move(r));
    std::sort(exceptions.begin(), exceptions.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
}

std::vector<i64> HeightMatrix::exception_primes() const {
    std::vector<i64> out;
    for (const auto& [p, r] : exceptions) out.push_back(p);
    return out;
}

i64 HeightMatrix::max_exception_index() const {
    i64 m = 0;
    for (const auto& [p, r] : exceptions) m = std::max(m, prime_index(p));
    return m;
}

namespace {

// True when e(n) <= 0 across the whole segment; hi < 0 means unbounded above.
bool le_zero_on(const LinExpr& e, i64 lo, i64 hi) {
    if (e.at(lo) > 0) return false;
    if (hi >= 0) return e.at(hi) <= 0;
    return e.a <= 0;
}

// Checks r1(n)(i) <= r2(n)(i) for all i, for each n in [lo, hi] ([lo, inf)
// when hi < 0).  Within a segment every pair of the linear forms involved
// keeps a fixed order, so index sets picked at the representative n = lo are
// the right ones for the whole segment.
bool segment_le(const RowPattern& r1, const RowPattern& r2, i64 lo, i64 hi) {
    auto inside_inf = [lo](const std::optional<LinExpr>& t, const LinExpr& idx) {
        return t && idx.at(lo) >= t->at(lo);
    };
    if (r1.infinite_from) {
        if (!r2.infinite_from) return false;
        if (!le_zero_on(*r2.infinite_from - *r1.infinite_from, lo, hi)) return false;
    }
    // Difference r1 - r2 is checked at index 0 and immediately after each of
    // r1's jumps; in between it can only move in r2's favour.
    std::vector<LinExpr> critical;
    critical.push_back(LinExpr::constant(0));
    for (const JumpPattern& j : r1.jumps) critical.push_back(j.pos);
    for (const LinExpr& idx : critical) {
        if (inside_inf(r1.infinite_from, idx)) continue;  // r1 infinite: pattern invalid here, nothing finite to compare
        if (inside_inf(r2.infinite_from, idx)) continue;  // r2 infinite: dominates
        LinExpr diff = r1.base - r2.base;
        for (const JumpPattern& j : r1.jumps)
            if (j.pos.at(lo) <= idx.at(lo)) diff = diff + j.gap;
        for (const JumpPattern& j : r2.jumps)
            if (j.pos.at(lo) <= idx.at(lo)) diff = diff - j.gap;
        if (!le_zero_on(diff, lo, hi)) return false;
    }
    return true;
}

}  // namespace

EventualVerdict pattern_le_eventually(const RowPattern& r1, const RowPattern& r2, i64 n_lo) {
    // Collect the n where some pair of linear forms crosses; between two
    // consecutive breakpoints the comparison is decided by its endpoints.
    std::vector<LinExpr> forms1, forms2;
    forms1.push_back(LinExpr::constant(0));
    for (const JumpPattern& j : r1.jumps) forms1.push_back(j.pos);
    if (r1.infinite_from) forms1.push_back(*r1.infinite_from);
    forms2.push_back(LinExpr::constant(0));
    for (const JumpPattern& j : r2.jumps) forms2.push_back(j.pos);
    if (r2.infinite_from) forms2.push_back(*r2.infinite_from);

    std::set<i64> cuts;
    cuts.insert(n_lo);
    auto add_crossing = [&](const LinExpr& f, const LinExpr& g) {
        if (f.a == g.a) return;
        i64 da = f.a - g.a, db = g.b - f.b;
        if (da < 0) {
            da = -da;
            db = -db;
        }
        i64 n = floor_div(db, da);
        for (i64 c : {n, n + 1})
            if (c >= n_lo) cuts.insert(c);
    };
    for (const LinExpr& f : forms1)
        for (const LinExpr& g : forms2) add_crossing(f, g);
    // Order among r1's own jump positions and its terminal also matters when
    // deciding which gaps precede a critical index.
    for (std::size_t i = 0; i < forms1.size(); ++i)
        for (std::size_t j = i + 1; j < forms1.size(); ++j) add_crossing(forms1[i], forms1[j]);
    for (std::size_t i = 0; i < forms2.size(); ++i)
        for (std::size_t j = i + 1; j < forms2.size(); ++j) add_crossing(forms2[i], forms2[j]);
    // The values being compared are base-plus-gap sums, and which gaps enter
    // depends on the segment; cutting at every crossing of candidate value
    // forms keeps the sign of each difference constant on the last segment.
    auto value_forms = [](const RowPattern& r) {
        std::vector<LinExpr> out{r.base};
        LinExpr all = r.base;
        for (const JumpPattern& j : r.jumps) {
            std::size_t n = out.size();
            all = all + j.gap;
            if (n <= 1024) {
                for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] + j.gap);
            } else {
                out.push_back(all);
            }
        }
        return out;
    };
    for (const LinExpr& f : value_forms(r1))
        for (const LinExpr& g : value_forms(r2)) add_crossing(f, g);

    std::vector<i64> starts(cuts.begin(), cuts.end());
    std::vector<std::pair<i64, i64>> segments;  // [lo, hi], hi = -1 for unbounded
    for (std::size_t i = 0; i < starts.size(); ++i) {
        i64 lo = starts[i];
        i64 hi = (i + 1 < starts.size()) ? starts[i + 1] - 1 : -1;
        if (hi >= 0 && hi < lo) continue;
        segments.emplace_back(lo, hi);
    }

    EventualVerdict out;
    if (!segment_le(r1, r2, segments.back().first, segments.back().second)) return out;
    out.eventually = true;
    out.watermark = segments.back().first;
    for (auto it = segments.rbegin() + 1; it != segments.rend(); ++it) {
        if (!segment_le(r1, r2, it->first, it->second)) break;
        out.watermark = it->first;
    }
    return out;
}

HeightMatrix matrix_scale(const HeightMatrix& h, i64 m) {
    if (m == 0) throw std::invalid_argument("scaling multiplier must be nonzero");
    if (m < 0) m = -m;
    HeightMatrix out = h;
    for (const auto& [p, e] : factorize(m)) out.set_exception(p, h.row_at(p).shifted(e));
    return out;
}

namespace {

// Primes at which two matrices need a concrete row-by-row look: every
// exceptional prime of either side, plus the tail indices below the
// watermark where the symbolic comparison is not yet in force.
std::vector<i64> probe_primes(const HeightMatrix& h1, const HeightMatrix& h2, i64 watermark) {
    std::set<i64> ps;
    for (i64 p : h1.exception_primes()) ps.insert(p);
    for (i64 p : h2.exception_primes()) ps.insert(p);
    for (i64 n = 1; n < watermark; ++n) ps.insert(nth_prime(n));
    return {ps.begin(), ps.end()};
}

}  // namespace

bool matrix_le(const HeightMatrix& h1, const HeightMatrix& h2) {
    EventualVerdict ev = pattern_le_eventually(h1.tail, h2.tail);
    if (!ev.eventually) return false;
    for (i64 p : probe_primes(h1, h2, ev.watermark))
        if (!row_le(h1.row_at(p), h2.row_at(p))) return false;
    return true;
}

std::optional<std::pair<i64, i64>> walk_equiv(const HeightMatrix& h1, const HeightMatrix& h2) {
    EventualVerdict fwd = pattern_le_eventually(h1.tail, h2.tail);
    EventualVerdict bwd = pattern_le_eventually(h2.tail, h1.tail);
    if (!fwd.eventually || !bwd.eventually) return std::nullopt;
    i64 m1 = 1, m2 = 1;
    for (i64 p : probe_primes(h1, h2, std::max(fwd.watermark, bwd.watermark))) {
        HeightRow r1 = h1.row_at(p).canonical();
        HeightRow r2 = h2.row_at(p).canonical();
        i64 cap = r1.shift_cap() + r2.shift_cap() + 2;
        bool found = false;
        for (i64 total = 0; total <= 2 * cap && !found; ++total) {
            for (i64 s1 = std::max<i64>(0, total - cap); s1 <= std::min(total, cap); ++s1) {
                i64 s2 = total - s1;
                if (r1.shifted(s1) == r2.shifted(s2)) {
                    m1 = mul_checked(m1, ipow_checked(p, s1));
                    m2 = mul_checked(m2, ipow_checked(p, s2));
                    found = true;
                    break;
                }
            }
        }
        if (!found) return std::nullopt;
    }
    return std::make_pair(m1, m2);
}

std::optional<i64> walk_le(const HeightMatrix& h1, const HeightMatrix& h2) {
    EventualVerdict ev = pattern_le_eventually(h1.tail, h2.tail);
    if (!ev.eventually) return std::nullopt;
    i64 m = 1;
    for (i64 p : probe_primes(h1, h2, ev.watermark)) {
        HeightRow r1 = h1.row_at(p).canonical();
        HeightRow r2 = h2.row_at(p).canonical();
        if (!r1.all_finite() && r2.all_finite()) return std::nullopt;
        i64 cap = r1.shift_cap() + r2.shift_cap() + 2;
        bool found = false;
        for (i64 s = 0; s <= cap; ++s) {
            if (row_le(r1, r2.shifted(s))) {
                m = mul_checked(m, ipow_checked(p, s));
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    return m;
}

bool type_le(const HeightMatrix& t1, const HeightMatrix& t2) {
    auto check = [](const HeightMatrix& h) {
        if (!h.tail.jumps.empty()) throw NotACharacteristic("tail pattern has finite jumps");
        for (const auto& [p, r] : h.exceptions)
            if (!r.jumps.empty())
                throw NotACharacteristic("row at prime " + std::to_string(p) + " has finite jumps");
    };
    check(t1);
    check(t2);
    return walk_le(t1, t2).has_value();
}

NatFamily NatFamily::constant(i64 v) {
    NatFamily f;
    f.tail_kind = Tail::Const;
    f.tail_const = ExtNat::of(v);
    return f;
}

NatFamily NatFamily::linear(i64 a, i64 b) {
    NatFamily f;
    f.tail_kind = Tail::Linear;
    f.tail_lin = {a, b};
    f.normalize();
    return f;
}

NatFamily NatFamily::infinite() {
    NatFamily f;
    f.tail_kind = Tail::Infinite;
    return f;
}

ExtNat NatFamily::at_index(i64 n) const { return at_prime(nth_prime(n)); }

ExtNat NatFamily::at_prime(i64 p) const {
    for (const auto& [q, v] : exceptions)
        if (q == p) return v;
    switch (tail_kind) {
        case Tail::Const: return tail_const;
        case Tail::Linear: return ExtNat::of(tail_lin.at(prime_index(p)));
        case Tail::Infinite: return ExtNat::inf();
    }
    return ExtNat::of(0);
}

void NatFamily::set_exception(i64 p, ExtNat v) {
    for (auto& [q, w] : exceptions) {
        if (q == p) {
            w = v;
            return;
        }
    }
    exceptions.emplace_back(p, v);
    std::sort(exceptions.begin(), exceptions.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
}

void NatFamily::normalize() {
    if (tail_kind == Tail::Linear && tail_lin.a == 0) {
        tail_kind = Tail::Const;
        tail_const = ExtNat::of(tail_lin.b);
        tail_lin = {};
    }
    if (tail_kind == Tail::Const && tail_const.is_inf) {
        tail_kind = Tail::Infinite;
        tail_const = ExtNat::of(0);
    }
}

NatFamily NatFamily::canonical() const {
    NatFamily out = *this;
    out.normalize();
    NatFamily tail_only = out;
    tail_only.exceptions.clear();
    std::vector<std::pair<i64, ExtNat>> kept;
    for (const auto& [p, v] : out.exceptions)
        if (!(tail_only.at_prime(p) == v)) kept.emplace_back(p, v);
    out.exceptions = std::move(kept);
    return out;
}

std::optional<i64> NatFamily::first_nonzero_prime() const {
    for (const auto& [p, v] : exceptions)
        if (v.is_inf || v.v != 0) return p;
    i64 scan_to = max_exception_index() + 2;
    for (i64 n = 1; n <= scan_to; ++n) {
        i64 p = nth_prime(n);
        bool exceptional = false;
        for (const auto& [q, v] : exceptions)
            if (q == p) exceptional = true;
        if (exceptional) continue;
        ExtNat v = at_prime(p);
        if (v.is_inf || v.v != 0) return p;
    }
    // Past the scan window the tail is in force and nondecreasing.
    return std::nullopt;
}

std::optional<i64> NatFamily::sup() const {
    i64 m = 0;
    for (const auto& [p, v] : exceptions) {
        if (v.is_inf) return std::nullopt;
        m = std::max(m, v.v);
    }
    switch (tail_kind) {
        case Tail::Const:
            if (tail_const.is_inf) return std::nullopt;
            return std::max(m, tail_const.v);
        case Tail::Linear:
            if (tail_lin.a > 0) return std::nullopt;
            return std::max(m, tail_lin.at(1));
        case Tail::Infinite: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<i64> NatFamily::unbounded_witness_primes(int count) const {
    std::vector<i64> out;
    for (const auto& [p, v] : exceptions)
        if (v.is_inf && static_cast<int>(out.size()) < count) out.push_back(p);
    bool tail_unbounded =
        tail_kind == Tail::Infinite || (tail_kind == Tail::Linear && tail_lin.a > 0);
    if (tail_unbounded) {
        for (i64 n = 1; static_cast<int>(out.size()) < count; ++n) {
            i64 p = nth_prime(n);
            bool exceptional = false;
            for (const auto& [q, v] : exceptions)
                if (q == p) exceptional = true;
            if (!exceptional) out.push_back(p);
        }
        std::sort(out.begin(), out.end());
    }
    return out;
}

NatFamily NatFamily::plus(const NatFamily& o) const {
    NatFamily out;
    std::set<i64> ps;
    for (const auto& [p, v] : exceptions) ps.insert(p);
    for (const auto& [p, v] : o.exceptions) ps.insert(p);
    for (i64 p : ps) out.set_exception(p, at_prime(p) + o.at_prime(p));
    if (tail_kind == Tail::Infinite || o.tail_kind == Tail::Infinite) {
        out.tail_kind = Tail::Infinite;
    } else {
        LinExpr lhs = tail_kind == Tail::Linear ? tail_lin : LinExpr::constant(tail_const.v);
        LinExpr rhs = o.tail_kind == Tail::Linear ? o.tail_lin : LinExpr::constant(o.tail_const.v);
        out.tail_kind = Tail::Linear;
        out.tail_lin = lhs + rhs;
    }
    out.normalize();
    return out;
}

NatFamily NatFamily::scaled(i64 c) const {
    if (c < 0) throw std::invalid_argument("scale factor must be >= 0");
    if (c == 0) return constant(0);
    NatFamily out;
    for (const auto& [p, v] : exceptions)
        out.set_exception(p, v.is_inf ? ExtNat::inf() : ExtNat::of(mul_checked(v.v, c)));
    out.tail_kind = tail_kind;
    switch (tail_kind) {
        case Tail::Const:
            out.tail_const =
                tail_const.is_inf ? ExtNat::inf() : ExtNat::of(mul_checked(tail_const.v, c));
            break;
        case Tail::Linear: out.tail_lin = {mul_checked(tail_lin.a, c), mul_checked(tail_lin.b, c)}; break;
        case Tail::Infinite: break;
    }
    out.normalize();
    return out;
}

bool NatFamily::is_zero() const {
    if (tail_kind != Tail::Const || !(tail_const == ExtNat::of(0))) return false;
    for (const auto& [p, v] : exceptions)
        if (!(v == ExtNat::of(0))) return false;
    return true;
}

i64 NatFamily::max_exception_index() const {
    i64 m = 0;
    for (const auto& [p, v] : exceptions) m = std::max(m, prime_index(p));
    return m;
}

}  // namespace hopfian
