#include "hopfian/descriptors.hpp"

#include <algorithm>
#include <set>

#include "hopfian/errors.hpp"

namespace hopfian {

i64 PShape::total_exponent() const {
    i64 t = 0;
    for (i64 e : exponents) t += e;
    return t;
}

std::vector<std::string> PShape::invalid_reasons() const {
    std::vector<std::string> out;
    i64 prev = -1;
    for (i64 e : exponents) {
        if (e < 1) out.push_back("cyclic exponents must be >= 1");
        if (prev >= 0 && e > prev) out.push_back("cyclic exponents must be non-increasing");
        prev = e;
    }
    return out;
}

PShape ShapePattern::at(i64 n) const {
    PShape s;
    for (const LinExpr& e : exponents) s.exponents.push_back(e.at(n));
    return s;
}

LinExpr ShapePattern::total_exponent() const {
    LinExpr t = LinExpr::constant(0);
    for (const LinExpr& e : exponents) t = t + e;
    return t;
}

std::vector<std::string> ShapePattern::invalid_reasons() const {
    std::vector<std::string> out;
    auto nonneg_everywhere = [&](const LinExpr& e, i64 lo, const char* what) {
        if (e.a < 0 || e.at(1) < lo) out.push_back(what);
    };
    for (std::size_t i = 0; i + 1 < exponents.size(); ++i)
        nonneg_everywhere(exponents[i] - exponents[i + 1], 0,
                          "cyclic exponents must be non-increasing at every prime");
    if (!exponents.empty())
        nonneg_everywhere(exponents.back(), 1, "cyclic exponents must be >= 1 at every prime");
    return out;
}

ShapePattern ShapePattern::constant(const PShape& s) {
    ShapePattern p;
    for (i64 e : s.exponents) p.exponents.push_back(LinExpr::constant(e));
    return p;
}

PShape TorsionDescriptor::shape_at(i64 p) const {
    for (const auto& [q, s] : exceptions)
        if (q == p) return s;
    return tail.at(prime_index(p));
}

void TorsionDescriptor::set_exception(i64 p, PShape s) {
    for (auto& [q, sh] : exceptions) {
        if (q == p) {
            sh = std::move(s);
            return;
        }
    }
    exceptions.emplace_back(p, std::move(s));
    std::sort(exceptions.begin(), exceptions.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
}

NatFamily TorsionDescriptor::exponent_family() const {
    LinExpr t = tail.total_exponent();
    NatFamily f = NatFamily::linear(t.a, t.b);
    for (const auto& [p, s] : exceptions) f.set_exception(p, ExtNat::of(s.total_exponent()));
    return f.canonical();
}

bool TorsionDescriptor::is_trivial() const {
    if (!tail.exponents.empty()) return false;
    for (const auto& [p, s] : exceptions)
        if (!s.exponents.empty()) return false;
    return true;
}

std::vector<std::string> TorsionDescriptor::invalid_reasons() const {
    std::vector<std::string> out;
    for (const auto& [p, s] : exceptions)
        for (const std::string& r : s.invalid_reasons())
            out.push_back("shape at prime " + std::to_string(p) + ": " + r);
    for (const std::string& r : tail.invalid_reasons()) out.push_back("tail shape: " + r);
    return out;
}

namespace {

bool family_positive_on_tail(const NatFamily& f) {
    switch (f.tail_kind) {
        case NatFamily::Tail::Const: return f.tail_const.is_inf || f.tail_const.v >= 1;
        case NatFamily::Tail::Linear: return f.tail_lin.a >= 0 && f.tail_lin.at(1) >= 1;
        case NatFamily::Tail::Infinite: return true;
    }
    return false;
}

bool family_zero_on_tail(const NatFamily& f) {
    return f.tail_kind == NatFamily::Tail::Const && f.tail_const == ExtNat::of(0);
}

std::set<i64> exception_prime_union(std::initializer_list<const NatFamily*> fams) {
    std::set<i64> ps;
    for (const NatFamily* f : fams)
        for (const auto& [p, v] : f->exceptions) ps.insert(p);
    return ps;
}

}  // namespace

NatFamily Rank1CyclicParams::torsion_exponents() const {
    NatFamily e;
    if (family_zero_on_tail(k)) {
        e = NatFamily::constant(0);
    } else {
        e = NatFamily{};
        e.tail_kind = NatFamily::Tail::Linear;
        LinExpr mt = m.tail_kind == NatFamily::Tail::Linear ? m.tail_lin
                                                            : LinExpr::constant(m.tail_const.v);
        LinExpr kt = k.tail_kind == NatFamily::Tail::Linear ? k.tail_lin
                                                            : LinExpr::constant(k.tail_const.v);
        e.tail_lin = mt + kt;
    }
    for (i64 p : exception_prime_union({&m, &k})) {
        ExtNat mp = m.at_prime(p), kp = k.at_prime(p);
        if (mp.is_inf || kp.is_inf) continue;  // flagged by invalid_reasons
        e.set_exception(p, ExtNat::of(kp.v >= 1 ? mp.v + kp.v : 0));
    }
    e.normalize();
    return e.canonical();
}

HeightMatrix Rank1CyclicParams::matrix() const {
    auto bad = invalid_reasons();
    if (!bad.empty()) throw ValidationError(bad);
    HeightMatrix h;
    RowPattern tail;
    tail.base = m.tail_kind == NatFamily::Tail::Linear ? m.tail_lin
                                                       : LinExpr::constant(m.tail_const.v);
    if (!family_zero_on_tail(k)) {
        LinExpr kt = k.tail_kind == NatFamily::Tail::Linear ? k.tail_lin
                                                            : LinExpr::constant(k.tail_const.v);
        if (j.tail_kind == NatFamily::Tail::Infinite)
            tail.infinite_from = kt;
        else
            tail.jumps.push_back(
                {kt, j.tail_kind == NatFamily::Tail::Linear ? j.tail_lin
                                                            : LinExpr::constant(j.tail_const.v)});
    }
    h.tail = tail;
    for (i64 p : exception_prime_union({&m, &k, &j})) {
        ExtNat mp = m.at_prime(p), kp = k.at_prime(p), jp = j.at_prime(p);
        HeightRow row;
        row.base = mp.v;
        if (kp.v >= 1) {
            if (jp.is_inf)
                row.infinite_from = kp.v;
            else
                row.jumps.push_back({kp.v, jp.v});
        }
        h.set_exception(p, row.canonical());
    }
    return h;
}

std::vector<std::string> Rank1CyclicParams::invalid_reasons() const {
    std::vector<std::string> out;
    auto finite_family = [&](const NatFamily& f, const char* name) {
        if (f.tail_kind == NatFamily::Tail::Infinite)
            out.push_back(std::string(name) + " must be finite at every prime");
        for (const auto& [p, v] : f.exceptions)
            if (v.is_inf) out.push_back(std::string(name) + " must be finite at prime " + std::to_string(p));
    };
    auto nonneg_tail = [&](const NatFamily& f, const char* name) {
        if (f.tail_kind == NatFamily::Tail::Linear && (f.tail_lin.a < 0 || f.tail_lin.at(1) < 0))
            out.push_back(std::string(name) + " tail must stay a natural number");
    };
    finite_family(m, "m");
    finite_family(k, "k");
    nonneg_tail(m, "m");
    nonneg_tail(j, "j");
    if (!family_zero_on_tail(k) && !family_positive_on_tail(k))
        out.push_back("k tail must be uniformly zero or uniformly positive");
    if (!family_zero_on_tail(k) && !family_positive_on_tail(j))
        out.push_back("j must be >= 1 wherever a jump exists");
    for (const auto& [p, kp] : k.exceptions) {
        if (kp.is_inf || kp.v < 1) continue;
        ExtNat jp = j.at_prime(p);
        if (!jp.is_inf && jp.v < 1)
            out.push_back("j must be >= 1 at prime " + std::to_string(p) + " (a jump exists there)");
    }
    if (declared_e) {
        NatFamily want = torsion_exponents();
        if (!(declared_e->canonical() == want))
            out.push_back("declared torsion exponent must satisfy e = m + k");
    }
    return out;
}

namespace {

// Torsion exponent of the tight rank-1 group with the given height row, when
// the row has at most one jump: base + position for a finite jump, base +
// threshold for a jump to infinity, zero for gapless rows.
std::optional<i64> derive_row_torsion(const HeightRow& raw) {
    HeightRow r = raw.canonical();
    if (r.jumps.size() >= 2) return std::nullopt;
    if (r.jumps.size() == 1) {
        if (r.infinite_from) return std::nullopt;
        return r.base + r.jumps[0].pos;
    }
    if (r.infinite_from) return *r.infinite_from == 0 ? 0 : r.base + *r.infinite_from;
    return 0;
}

std::optional<LinExpr> derive_pattern_torsion(const RowPattern& p) {
    if (p.jumps.size() >= 2) return std::nullopt;
    if (p.jumps.size() == 1) {
        if (p.infinite_from) return std::nullopt;
        return p.base + p.jumps[0].pos;
    }
    if (p.infinite_from) return p.base + *p.infinite_from;
    return LinExpr::constant(0);
}

}  // namespace

std::optional<NatFamily> derived_a_torsion(const HeightMatrix& h) {
    std::optional<LinExpr> tail = derive_pattern_torsion(h.tail);
    if (!tail) return std::nullopt;
    NatFamily f = NatFamily::linear(tail->a, tail->b);
    for (const auto& [p, r] : h.exceptions) {
        std::optional<i64> e = derive_row_torsion(r);
        if (!e) return std::nullopt;
        f.set_exception(p, ExtNat::of(*e));
    }
    return f.canonical();
}

ATorsion a_torsion(const BDescriptor& b) {
    if (b.cyclic) return {b.cyclic->torsion_exponents(), false};
    if (auto derived = derived_a_torsion(b.matrix)) return {*derived, false};
    if (b.declared_torsion) return {b.declared_torsion->canonical(), true};
    throw ValidationError({"torsion of a multi-jump height matrix must be declared"});
}

std::vector<std::string> BDescriptor::invalid_reasons() const {
    std::vector<std::string> out;
    for (const auto& [p, r] : matrix.exceptions)
        for (const std::string& s : r.invalid_reasons())
            out.push_back("row at prime " + std::to_string(p) + ": " + s);
    for (const std::string& s : matrix.tail.invalid_reasons(1)) out.push_back("tail row: " + s);
    if (cyclic) {
        auto bad = cyclic->invalid_reasons();
        out.insert(out.end(), bad.begin(), bad.end());
        if (bad.empty() && !(matrix == cyclic->matrix()))
            out.push_back("height matrix must match the single-jump parameters");
    }
    if (!cyclic && out.empty()) {
        std::optional<NatFamily> derived = derived_a_torsion(matrix);
        if (!derived && !declared_torsion)
            out.push_back("torsion of a multi-jump height matrix must be declared");
        if (derived && declared_torsion && !(declared_torsion->canonical() == *derived))
            out.push_back("declared torsion disagrees with the single-jump rule");
    }
    if (out.empty() && matrix_is_fully_divisible(matrix))
        out.push_back("the rank-1 part is divisible; describe it in the divisible part instead");
    for (const std::string& s : extra_torsion.invalid_reasons()) out.push_back("extra torsion: " + s);
    return out;
}

BDescriptor PrimeIndexedBPattern::member_at(i64 n) const {
    BDescriptor b;
    b.matrix.tail = RowPattern::constant(HeightRow::gapless(0));
    b.matrix.set_exception(nth_prime(n), supported_row.at(n));
    return b;
}

NatFamily PrimeIndexedBPattern::torsion_exponents() const {
    std::optional<LinExpr> e = derive_pattern_torsion(supported_row);
    if (!e) throw ValidationError({"torsion of the supported row pattern is not derivable"});
    return NatFamily::linear(e->a, e->b).canonical();
}

std::vector<std::string> PrimeIndexedBPattern::invalid_reasons() const {
    std::vector<std::string> out;
    for (const std::string& s : supported_row.invalid_reasons(1)) out.push_back("supported row: " + s);
    if (!derive_pattern_torsion(supported_row))
        out.push_back("supported row must have at most one jump so its torsion is determined");
    return out;
}

bool DivisiblePart::is_trivial() const {
    return q_rank == ExtNat::of(0) && prufer_ranks.is_zero();
}

std::vector<std::string> DivisiblePart::invalid_reasons() const {
    std::vector<std::string> out;
    if (prufer_ranks.tail_kind == NatFamily::Tail::Linear &&
        (prufer_ranks.tail_lin.a < 0 || prufer_ranks.tail_lin.at(1) < 0))
        out.push_back("prufer ranks must stay natural numbers");
    return out;
}

std::vector<std::string> validate(const GroupDescriptor& g) {
    std::vector<std::string> out;
    auto prefixed = [&](const std::string& where, const std::vector<std::string>& rs) {
        for (const std::string& r : rs) out.push_back(where + ": " + r);
    };
    prefixed("divisible", g.divisible.invalid_reasons());
    for (std::size_t i = 0; i < g.summands.size(); ++i) {
        const SummandEntry& e = g.summands[i];
        std::string where = "summands[" + std::to_string(i) + "]";
        if (!e.label.empty()) where += " (" + e.label + ")";
        if (!e.multiplicity.is_inf && e.multiplicity.v < 1)
            out.push_back(where + ": multiplicity must be >= 1");
        std::visit([&](const auto& payload) { prefixed(where, payload.invalid_reasons()); },
                   e.payload);
    }
    return out;
}

namespace {

NatFamily entry_torsion(const SummandPayload& payload) {
    if (const auto* b = std::get_if<BDescriptor>(&payload))
        return a_torsion(*b).exponents.plus(b->extra_torsion.exponent_family());
    if (const auto* t = std::get_if<TorsionDescriptor>(&payload)) return t->exponent_family();
    return std::get<PrimeIndexedBPattern>(payload).torsion_exponents();
}

}  // namespace

NatFamily total_torsion_exponent(const GroupDescriptor& g) {
    if (auto p = g.divisible.prufer_ranks.first_nonzero_prime()) throw UnboundedAtAPrime(*p);
    NatFamily total = NatFamily::constant(0);
    for (const SummandEntry& e : g.summands) {
        NatFamily t = entry_torsion(e.payload);
        if (e.multiplicity.is_inf) {
            if (auto p = t.first_nonzero_prime()) throw UnboundedAtAPrime(*p);
            continue;
        }
        total = total.plus(t.scaled(e.multiplicity.v));
    }
    if (auto p = total.unbounded_witness_primes(1); !p.empty() && total.at_prime(p[0]).is_inf)
        throw UnboundedAtAPrime(p[0]);
    return total.canonical();
}

TorsionShResult torsion_is_sh(const NatFamily& e) {
    TorsionShResult r;
    if (auto b = e.sup()) {
        r.is_sh = true;
        r.bound = *b;
    } else {
        r.witness_primes = e.unbounded_witness_primes(3);
    }
    return r;
}

bool all_rows_eventually_infinite(const HeightMatrix& h) {
    if (!h.tail.infinite_from) return false;
    for (const auto& [p, r] : h.exceptions)
        if (!r.infinite_from) return false;
    return true;
}

bool matrix_is_fully_divisible(const HeightMatrix& h) {
    if (!h.tail.infinite_from || !(*h.tail.infinite_from == LinExpr::constant(0))) return false;
    for (const auto& [p, r] : h.exceptions)
        if (!r.infinite_from || *r.infinite_from != 0) return false;
    return true;
}

bool is_sp(const GroupDescriptor& g) {
    if (!g.divisible.is_trivial()) throw NotReduced("the divisible part is nonempty");
    for (const SummandEntry& e : g.summands) {
        if (const auto* b = std::get_if<BDescriptor>(&e.payload)) {
            if (!all_rows_eventually_infinite(b->matrix)) return false;
        } else if (std::holds_alternative<PrimeIndexedBPattern>(e.payload)) {
            // Members have gapless finite rows away from their own prime.
            return false;
        }
    }
    return true;
}

std::optional<std::pair<i64, i64>> walk_equiv(const BDescriptor& d1, const BDescriptor& d2) {
    return walk_equiv(d1.matrix, d2.matrix);
}

std::optional<i64> walk_le(const BDescriptor& d1, const BDescriptor& d2) {
    return walk_le(d1.matrix, d2.matrix);
}

}  // namespace hopfian
