#include "hopfian/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>

#include "hopfian/errors.hpp"

namespace hopfian {

GroupElement Rank1Model::x() const { return group.generator(0); }

GroupElement Rank1Model::y(i64 i) const {
    if (i < 1 || i >= sigma()) throw std::invalid_argument("y index out of range");
    return group.generator(static_cast<int>(i));
}

GroupElement Rank1Model::z() const { return group.scale(ipow_checked(p, m), x()); }

GroupElement Rank1Model::t() const { return group.add(x(), group.negate(y(e()))); }

Rank1Model build_rank1_model(i64 p, i64 m, i64 k, i64 j) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (m < 0 || k < 1 || j < 1) throw std::invalid_argument("need m >= 0, k >= 1, j >= 1");
    i64 e = m + k, sigma = e + j + 1;
    if (sigma > 48) throw CapExceeded{48};
    std::vector<Vec> rels;
    Vec first(static_cast<std::size_t>(sigma), 0);
    first[0] = ipow_checked(p, e);
    first[1] = -p;
    rels.push_back(std::move(first));
    for (i64 i = 2; i < sigma; ++i) {
        Vec r(static_cast<std::size_t>(sigma), 0);
        r[static_cast<std::size_t>(i)] = p;
        r[static_cast<std::size_t>(i - 1)] = -1;
        rels.push_back(std::move(r));
    }
    Rank1Model M{p, m, k, j, FinPresGroup(static_cast<int>(sigma), rels)};
    const GroupStructure& st = M.group.structure();
    if (st.free_rank != 1 || st.invariant_factors != std::vector<i64>{ipow_checked(p, e)})
        throw Inconsistent("rank-1 model structure is not Z + Z/p^" + std::to_string(e) +
                           ": got " + st.str());
    std::vector<ExtNat> seq =
        M.group.p_height_sequence(M.z(), p, static_cast<int>(k) + 3);
    for (i64 i = 0; i < k + 3; ++i) {
        i64 expect = m + i + (i >= k ? j : 0);
        if (seq[static_cast<std::size_t>(i)] != ExtNat::of(expect))
            throw Inconsistent("height sequence of z deviates at index " + std::to_string(i) +
                               ": expected " + std::to_string(expect) + ", got " +
                               seq[static_cast<std::size_t>(i)].str());
    }
    return M;
}

i64 case_action_exponent(const Rank1Model& M, EndoCase which) {
    if (which == EndoCase::Case1) {
        if (M.j > M.k) throw CaseMismatch("the first case needs j <= k");
        return M.j;
    }
    if (M.k > M.j) throw CaseMismatch("the second case needs k <= j");
    return M.k;
}

Endomorphism case_endomorphism(const Rank1Model& M, EndoCase which) {
    i64 l = case_action_exponent(M, which);
    const FinPresGroup& G = M.group;
    i64 e = M.e(), sigma = M.sigma();
    std::vector<GroupElement> img(static_cast<std::size_t>(sigma), G.zero());
    if (which == EndoCase::Case1) {
        GroupElement minus_t = G.negate(M.t());  // y^e - x
        for (i64 i = 1; i < sigma; ++i) {
            i64 expo = sigma - 1 - i;
            if (expo < e)
                img[static_cast<std::size_t>(i)] = G.scale(ipow_checked(M.p, expo), minus_t);
        }
    } else {
        img[0] = G.scale(ipow_checked(M.p, M.k), M.t());
    }
    Endomorphism f = G.endomorphism(img);
    if (!G.is_zero(G.apply(f, M.z())))
        throw Inconsistent("case endomorphism does not kill z");
    GroupElement on_t = G.apply(f, M.t());
    GroupElement expect = l >= e ? G.zero() : G.scale(ipow_checked(M.p, l), M.t());
    if (!G.is_zero(G.add(on_t, G.negate(expect))))
        throw Inconsistent("case endomorphism is not multiplication by p^" + std::to_string(l) +
                           " on the torsion generator");
    return f;
}

i64 torsion_chain_index(const Rank1Model& M, EndoCase which) {
    i64 l = case_action_exponent(M, which), e = M.e();
    FinPresGroup T = FinPresGroup::direct_sum_cyclic({ipow_checked(M.p, e)});
    Mat act(1, 1);
    act(0, 0) = l >= e ? 0 : ipow_checked(M.p, l);
    i64 index = T.kernel_chain(T.endomorphism_from_matrix(act)).stabilization_index;

    Endomorphism f = case_endomorphism(M, which);
    GroupElement w = M.t();
    i64 dies = 0;
    for (i64 n = 1; n <= e + 1; ++n) {
        w = M.group.apply(f, w);
        if (M.group.is_zero(w)) {
            dies = n;
            break;
        }
    }
    if (dies != index || index != ceil_div(e, l))
        throw Inconsistent("torsion chain index mismatch: restricted chain " +
                           std::to_string(index) + ", vanishing power " + std::to_string(dies) +
                           ", ceil(e/l) " + std::to_string(ceil_div(e, l)));
    return index;
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational make_rational(i64 num, i64 den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) return {0, 1};
    i64 g = std::gcd(num < 0 ? -num : num, den);
    return {num / g, den / g};
}

Rational rational_mul(const Rational& a, const Rational& b) {
    if (a.is_zero() || b.is_zero()) return {0, 1};
    i64 g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
    i64 g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
    return make_rational(mul_checked(a.num / g1, b.num / g2),
                         mul_checked(a.den / g2, b.den / g1));
}

Rational rational_add(const Rational& a, const Rational& b) {
    i64 g = std::gcd(a.den, b.den);
    i64 x = mul_checked(a.num, b.den / g);
    i64 y = mul_checked(b.num, a.den / g);
    if ((y > 0 && x > INT64_MAX - y) || (y < 0 && x < INT64_MIN - y))
        throw OverflowError("rational sum too large");
    return make_rational(x + y, mul_checked(a.den / g, b.den));
}

i64 rational_valuation(const Rational& q, i64 p) {
    if (q.is_zero()) throw std::invalid_argument("valuation of zero");
    return valuation(q.num < 0 ? -q.num : q.num, p) - valuation(q.den, p);
}

bool rational_contains(const RationalGroup& g, const Rational& q) {
    if (q.is_zero()) return true;
    for (const auto& [p, a] : factorize(q.den))
        if (!(ExtNat::of(a) <= g.characteristic.at_prime(p))) return false;
    return true;
}

namespace {

// Least c with tail_f(n) <= tail_g(n) for all n >= c; nullopt when no such c
// exists.  Families must be canonical.
std::optional<i64> tail_le_from(const NatFamily& f, const NatFamily& g) {
    using Tail = NatFamily::Tail;
    if (g.tail_kind == Tail::Infinite) return 1;
    if (f.tail_kind == Tail::Infinite) return std::nullopt;
    LinExpr F = f.tail_kind == Tail::Linear ? f.tail_lin : LinExpr::constant(f.tail_const.v);
    LinExpr G = g.tail_kind == Tail::Linear ? g.tail_lin : LinExpr::constant(g.tail_const.v);
    LinExpr D = F - G;
    if (D.a > 0) return std::nullopt;
    if (D.a == 0) return D.b <= 0 ? std::optional<i64>(1) : std::nullopt;
    return std::max<i64>(1, ceil_div(D.b, -D.a));
}

}  // namespace

std::optional<Rational> rational_hom(const RationalGroup& src, const RationalGroup& dst,
                                     const Rational& r) {
    if (r.is_zero()) throw std::invalid_argument("multiplier must be nonzero");
    NatFamily a = src.characteristic.canonical(), b = dst.characteristic.canonical();
    std::set<i64> support;
    for (const auto& pa : factorize(r.num < 0 ? -r.num : r.num)) support.insert(pa.first);
    for (const auto& pa : factorize(r.den)) support.insert(pa.first);
    for (const auto& pv : a.exceptions) support.insert(pv.first);
    for (const auto& pv : b.exceptions) support.insert(pv.first);
    for (i64 p : support) {
        ExtNat sp = a.at_prime(p), dp = b.at_prime(p);
        if (dp.is_inf) continue;
        if (sp.is_inf) return std::nullopt;
        if (rational_valuation(r, p) < sp.v - dp.v) return std::nullopt;
    }
    auto c = tail_le_from(a, b);
    if (!c) return std::nullopt;
    for (i64 n = 1; n < *c; ++n) {
        i64 p = nth_prime(n);
        if (support.count(p)) continue;
        ExtNat sp = a.at_index(n), dp = b.at_index(n);
        if (dp.is_inf) continue;
        if (sp.is_inf || sp.v > dp.v) return std::nullopt;
    }
    return r;
}

std::optional<Rational> rational_witness_multiplier(const RationalGroup& src,
                                                    const RationalGroup& dst) {
    NatFamily a = src.characteristic.canonical(), b = dst.characteristic.canonical();
    auto c = tail_le_from(a, b);
    if (!c) return std::nullopt;
    std::set<i64> ps;
    for (const auto& pv : a.exceptions) ps.insert(pv.first);
    for (const auto& pv : b.exceptions) ps.insert(pv.first);
    i64 r = 1;
    auto fold = [&](i64 p) {
        ExtNat sp = a.at_prime(p), dp = b.at_prime(p);
        if (dp.is_inf) return true;
        if (sp.is_inf) return false;
        if (sp.v > dp.v) r = mul_checked(r, ipow_checked(p, sp.v - dp.v));
        return true;
    };
    for (i64 p : ps)
        if (!fold(p)) return std::nullopt;
    for (i64 n = 1; n < *c; ++n) {
        i64 p = nth_prime(n);
        if (ps.count(p)) continue;
        if (!fold(p)) return std::nullopt;
    }
    Rational out = make_rational(r, 1);
    if (!rational_hom(src, dst, out))
        throw Inconsistent("minimal multiplier rejected by the valuation check");
    return out;
}

ChainWitnessPlan chain_witness(const std::vector<RationalGroup>& groups, i64 max_chain) {
    if (groups.empty()) throw std::invalid_argument("need at least one group");
    i64 k = static_cast<i64>(groups.size());
    if (k > max_chain) throw CapExceeded{max_chain};
    ChainWitnessPlan plan;
    plan.k = k;
    plan.groups = groups;
    plan.probe = make_rational(1, 1);
    plan.trajectory.push_back(plan.probe);
    for (i64 i = 0; i + 1 < k; ++i) {
        auto r = rational_witness_multiplier(groups[static_cast<std::size_t>(i)],
                                             groups[static_cast<std::size_t>(i) + 1]);
        if (!r)
            throw NoWitness("no multiplier maps level " + std::to_string(i + 1) +
                            " into level " + std::to_string(i + 2));
        plan.multipliers.push_back(*r);
        plan.trajectory.push_back(rational_mul(plan.trajectory.back(), *r));
    }
    for (std::size_t i = 0; i < plan.trajectory.size(); ++i) {
        if (plan.trajectory[i].is_zero())
            throw Inconsistent("trajectory vanished before the last level");
        if (!rational_contains(groups[i], plan.trajectory[i]))
            throw Inconsistent("trajectory escapes level " + std::to_string(i + 1));
    }
    return plan;
}

namespace {

struct Ctx {
    const OracleOptions& opts;
    OracleReport rep;

    void check(const std::string& name, bool ok, const std::string& detail) {
        rep.checks.push_back({name, ok, detail});
    }
    void note(const std::string& s) { rep.truncations.push_back(s); }
};

std::vector<i64> shape_orders(i64 p, const PShape& s) {
    std::vector<i64> orders;
    for (i64 a : s.exponents) orders.push_back(ipow_checked(p, a));
    return orders;
}

// Kernel-chain index of multiplication by p on the p-component of the given
// shape; equals the largest exponent.
i64 mult_p_index(i64 p, const PShape& s) {
    FinPresGroup G = FinPresGroup::direct_sum_cyclic(shape_orders(p, s));
    Mat act(G.n_generators(), G.n_generators());
    for (int i = 0; i < G.n_generators(); ++i) act(i, i) = p;
    return G.kernel_chain(G.endomorphism_from_matrix(act)).stabilization_index;
}

// Index of the block shift on N copies of the shape's component.
i64 shift_index(i64 p, const PShape& s, i64 copies) {
    std::vector<i64> orders;
    for (i64 c = 0; c < copies; ++c)
        for (i64 o : shape_orders(p, s)) orders.push_back(o);
    FinPresGroup G = FinPresGroup::direct_sum_cyclic(orders);
    int block = static_cast<int>(s.exponents.size());
    Mat act(G.n_generators(), G.n_generators());
    for (int i = block; i < G.n_generators(); ++i) act(i - block, i) = 1;
    return G.kernel_chain(G.endomorphism_from_matrix(act)).stabilization_index;
}

std::optional<i64> whole_order(const GroupDescriptor& g, i64 budget) {
    if (!g.divisible.is_trivial()) return std::nullopt;
    i64 order = 1;
    for (const SummandEntry& e : g.summands) {
        const auto* td = std::get_if<TorsionDescriptor>(&e.payload);
        if (!td || !td->tail.exponents.empty() || e.multiplicity.is_inf) return std::nullopt;
        if (e.multiplicity.v > 8) return std::nullopt;
        for (i64 c = 0; c < e.multiplicity.v; ++c)
            for (const auto& [p, shape] : td->exceptions)
                for (i64 a : shape.exponents) {
                    i64 f;
                    try {
                        f = ipow_checked(p, a);
                        order = mul_checked(order, f);
                    } catch (const OverflowError&) {
                        return std::nullopt;
                    }
                    if (order > budget) return std::nullopt;
                }
    }
    return order;
}

std::vector<i64> whole_orders_list(const GroupDescriptor& g) {
    std::vector<i64> orders;
    for (const SummandEntry& e : g.summands) {
        const auto& td = std::get<TorsionDescriptor>(e.payload);
        for (i64 c = 0; c < e.multiplicity.v; ++c)
            for (const auto& [p, shape] : td.exceptions)
                for (i64 a : shape.exponents) orders.push_back(ipow_checked(p, a));
    }
    return orders;
}

std::optional<i64> claimed_bound(const Classification& v, const std::string& field) {
    for (const Witness& w : v.witnesses)
        if (w.kind == "exponent_bound" && w.field == field && w.value) return w.value;
    return std::nullopt;
}

bool used_rule(const Classification& v, const std::string& rule) {
    for (const RuleStep& s : v.rule_trace)
        if (s.rule == rule) return true;
    return false;
}

void divisible_checks(Ctx& c, const DivisiblePart& d, const Classification& verdict) {
    std::optional<i64> prufer_p = d.prufer_ranks.first_nonzero_prime();
    if (prufer_p) {
        i64 p = *prufer_p;
        bool grows = true;
        std::string detail;
        for (i64 cap : {3LL, 6LL}) {
            FinPresGroup G = FinPresGroup::direct_sum_cyclic({ipow_checked(p, cap)});
            Mat act(1, 1);
            act(0, 0) = p;
            i64 idx = G.kernel_chain(G.endomorphism_from_matrix(act)).stabilization_index;
            grows = grows && idx == cap;
            detail += "cap " + std::to_string(cap) + " -> index " + std::to_string(idx) + "; ";
        }
        c.note("quasicyclic part at p=" + std::to_string(p) +
               " truncated to Z/p^cap for cap in {3,6}");
        c.check("prufer-truncation-chains", grows,
                detail + "multiplication by p tracks the cap");
        c.check("prufer-verdict", verdict.sh == Verdict::No && verdict.torsion_sh == Verdict::No,
                "quasicyclic summand demands sh = no and torsion_sh = no; got sh = " +
                    verdict_str(verdict.sh) + ", torsion_sh = " + verdict_str(verdict.torsion_sh));
    }
    if (d.q_rank.is_inf) {
        i64 k = std::min<i64>(c.opts.max_chain, 4);
        std::vector<RationalGroup> qs(static_cast<std::size_t>(k),
                                      RationalGroup{NatFamily::infinite()});
        ChainWitnessPlan plan = chain_witness(qs, c.opts.max_chain);
        c.note("rational part of unbounded rank probed with a shift on " + std::to_string(k) +
               " coordinates");
        c.check("rational-omega-shift",
                static_cast<i64>(plan.trajectory.size()) == k &&
                    !plan.trajectory.back().is_zero(),
                "probe survives " + std::to_string(k - 1) + " steps and dies at step " +
                    std::to_string(k));
        c.check("rational-omega-verdict", verdict.sh == Verdict::No,
                "unbounded divisible rank demands sh = no; got " + verdict_str(verdict.sh));
    } else if (d.q_rank.v > 0) {
        c.note("divisible torsion-free part of rank " + std::to_string(d.q_rank.v) +
               " has no finite model; taken from the classification");
    }
}

void torsion_summand_checks(Ctx& c, const std::string& label, const TorsionDescriptor& t,
                            ExtNat mult, const Classification& verdict) {
    NatFamily fam = t.exponent_family();
    if (mult.is_inf && !fam.is_zero()) {
        std::optional<i64> p;
        for (const auto& [q, shape] : t.exceptions)
            if (shape.total_exponent() > 0) {
                p = q;
                break;
            }
        PShape shape = p ? t.shape_at(*p) : t.tail.at(1);
        i64 pp = p ? *p : nth_prime(1);
        bool grows = true;
        std::string detail;
        for (i64 copies : {2LL, 4LL}) {
            i64 idx = shift_index(pp, shape, copies);
            grows = grows && idx == copies;
            detail += std::to_string(copies) + " copies -> index " + std::to_string(idx) + "; ";
        }
        c.note(label + " repeated without bound; shift executed on 2 and 4 copies at p=" +
               std::to_string(pp));
        c.check(label + ":omega-shift", grows, detail + "the shift index tracks the copy count");
        c.check(label + ":omega-verdict", verdict.sh == Verdict::No,
                "unbounded repetition demands sh = no; got " + verdict_str(verdict.sh));
        return;
    }

    if (t.tail.exponents.empty()) {
        std::vector<i64> orders;
        i64 total = 1, log_sum = 0;
        bool too_big = false;
        try {
            for (const auto& [p, shape] : t.exceptions)
                for (i64 a : shape.exponents) {
                    orders.push_back(ipow_checked(p, a));
                    total = mul_checked(total, orders.back());
                    log_sum += a;
                }
        } catch (const OverflowError&) {
            too_big = true;
        }
        if (too_big || total > c.opts.order_budget) {
            c.note(label + " too large to brute-force; skipped");
            return;
        }
        FinPresGroup G = FinPresGroup::direct_sum_cyclic(orders);
        try {
            i64 mu = min_uniform_sh_exponent(G, c.opts.endo_budget);
            c.check(label + ":finite-brute", mu <= log_sum,
                    "largest kernel-chain index over all endomorphisms is " + std::to_string(mu) +
                        ", within the log-order bound " + std::to_string(log_sum));
        } catch (const BudgetExceeded&) {
            c.note(label + " has too many endomorphisms for the budget; skipped");
        }
        return;
    }

    if (!fam.sup()) {
        i64 n0 = 1;
        for (const auto& ps : t.exceptions) n0 = std::max(n0, prime_index(ps.first) + 1);
        bool strict = true, sized = true;
        std::string detail;
        i64 prev = -1;
        for (i64 n = n0; n < n0 + 3; ++n) {
            PShape s = t.tail.at(n);
            i64 p = nth_prime(n);
            try {
                ipow_checked(p, s.exponents.empty() ? 0 : s.exponents.front());
            } catch (const OverflowError&) {
                sized = false;
                break;
            }
            i64 idx = mult_p_index(p, s);
            strict = strict && idx > prev;
            prev = idx;
            detail += "p=" + std::to_string(p) + " -> index " + std::to_string(idx) + "; ";
        }
        c.note(label + " unbounded family executed at three tail primes");
        if (sized)
            c.check(label + ":unbounded-truncation", strict,
                    detail + "multiplication-by-p chains grow along the tail");
        else
            c.note(label + " tail components too large to instantiate; symbolic only");
        c.check(label + ":unbounded-verdict", verdict.torsion_sh == Verdict::No,
                "unbounded exponents demand torsion_sh = no; got " +
                    verdict_str(verdict.torsion_sh));
    }
}

struct CyclicProbe {
    i64 m = 0, k = 0;
    std::optional<i64> j;  // nullopt marks divisibility past the jump
};

std::optional<CyclicProbe> probe_at(const Rank1CyclicParams& params, i64 n) {
    i64 p = nth_prime(n);
    ExtNat m = params.m.at_prime(p), k = params.k.at_prime(p), j = params.j.at_prime(p);
    if (m.is_inf || k.is_inf || k.v < 1) return std::nullopt;
    CyclicProbe pr;
    pr.m = m.v;
    pr.k = k.v;
    if (!j.is_inf) pr.j = j.v;
    return pr;
}

void rank1_model_checks(Ctx& c, const std::string& label, const Rank1CyclicParams& params,
                        const Classification& verdict, bool ratio_ruled) {
    bool truncated = false;
    for (i64 n = 1; n <= c.opts.prime_budget; ++n) {
        i64 p = nth_prime(n);
        auto pr = probe_at(params, n);
        if (!pr) {
            c.note(label + " carries no torsion at p=" + std::to_string(p) + "; no model built");
            continue;
        }
        i64 j = pr->j ? *pr->j : c.opts.j_cap;
        if (!pr->j) truncated = true;
        i64 e = pr->m + pr->k;
        if (e + j + 1 > 40) {
            c.note(label + " model at p=" + std::to_string(p) + " beyond desk scale; skipped");
            continue;
        }
        Rank1Model M = build_rank1_model(p, pr->m, pr->k, j);
        bool ok = true;
        std::string detail;
        for (EndoCase which : {EndoCase::Case1, EndoCase::Case2}) {
            if (which == EndoCase::Case1 && j > pr->k) continue;
            if (which == EndoCase::Case2 && pr->k > j) continue;
            i64 l = case_action_exponent(M, which);
            i64 idx = torsion_chain_index(M, which);
            ok = ok && idx == ceil_div(e, l);
            detail += std::string(which == EndoCase::Case1 ? "case1" : "case2") + " acts by p^" +
                      std::to_string(l) + ", chain " + std::to_string(idx) + "; ";
        }
        c.check(label + ":case-chains@p=" + std::to_string(p), ok,
                detail + "restricted kernel chains match ceil(e/l)");
        if (ratio_ruled && verdict.sh == Verdict::Yes) {
            auto M_claim = claimed_bound(verdict, "sh");
            if (M_claim) {
                i64 l_true = pr->j ? std::min(*pr->j, pr->k) : pr->k;
                i64 ratio = ceil_div(e, l_true);
                c.check(label + ":ratio-bound@p=" + std::to_string(p), ratio <= *M_claim,
                        "ceil(e/l) = " + std::to_string(ratio) + " within the claimed bound " +
                            std::to_string(*M_claim));
            }
        }
    }
    if (truncated)
        c.note(label + " has j = inf; models use j = " + std::to_string(c.opts.j_cap));

    if (ratio_ruled && verdict.sh == Verdict::No) {
        i64 n0 = 1 + std::max({params.m.max_exception_index(), params.k.max_exception_index(),
                               params.j.max_exception_index()});
        // The ratio need not be monotone: where the smaller of k and j switches
        // regime it can dip before climbing.  The scan is sized so that a
        // genuinely unbounded ratio has cleared any dip by the end.
        i64 window = 8;
        for (const NatFamily* f : {&params.k, &params.j})
            if (f->tail_kind == NatFamily::Tail::Const && !f->tail_const.is_inf)
                window = std::max(window, f->tail_const.v + 2);
        window = std::min<i64>(window, 4096);
        auto ratio_at = [&](i64 n) -> std::optional<i64> {
            auto pr = probe_at(params, n);
            if (!pr) return std::nullopt;
            i64 l = pr->j ? std::min(*pr->j, pr->k) : pr->k;
            return ceil_div(pr->m + pr->k, l);
        };
        i64 n_end = n0 + 4 * window + 8;
        std::optional<i64> valley;
        for (i64 n = n0; n < n_end; ++n) {
            auto r = ratio_at(n);
            if (r && (!valley || *r < *valley)) valley = r;
        }
        auto end = ratio_at(n_end);
        c.check(label + ":ratio-growth",
                valley && end && *end >= 4 && *end > *valley,
                "ceil(e/l) reaches " + (end ? std::to_string(*end) : "-") + " at tail index " +
                    std::to_string(n_end) + ", above the scan minimum " +
                    (valley ? std::to_string(*valley) : "-"));
    }
}

std::optional<NatFamily> characteristic_family(const HeightMatrix& h) {
    NatFamily out;
    if (!h.tail.jumps.empty()) return std::nullopt;
    if (h.tail.infinite_from) {
        if (!(*h.tail.infinite_from == LinExpr::constant(0))) return std::nullopt;
        out.tail_kind = NatFamily::Tail::Infinite;
    } else if (h.tail.base.is_const()) {
        out.tail_kind = NatFamily::Tail::Const;
        out.tail_const = ExtNat::of(h.tail.base.b);
    } else {
        out.tail_kind = NatFamily::Tail::Linear;
        out.tail_lin = h.tail.base;
    }
    for (const auto& [p, row] : h.exceptions) {
        if (!row.jumps.empty()) return std::nullopt;
        if (row.infinite_from && *row.infinite_from != 0) return std::nullopt;
        out.set_exception(p, row.infinite_from ? ExtNat::inf() : ExtNat::of(row.base));
    }
    return out;
}

void b_entry_checks(Ctx& c, const std::string& label, const BDescriptor& b, ExtNat mult,
                    bool delegated, const Classification& verdict) {
    if (b.cyclic) {
        bool ratio_ruled = delegated && used_rule(verdict, "rank1-cyclic-ratio");
        rank1_model_checks(c, label, *b.cyclic, verdict, ratio_ruled);
    } else if (auto chi = characteristic_family(b.matrix)) {
        if (mult.is_inf) {
            i64 k = std::min<i64>(c.opts.max_chain, 4);
            std::vector<RationalGroup> gs(static_cast<std::size_t>(k), RationalGroup{*chi});
            ChainWitnessPlan plan = chain_witness(gs, c.opts.max_chain);
            c.note(label + " repeated without bound; identity chain executed on " +
                   std::to_string(k) + " rational coordinates");
            c.check(label + ":omega-chain",
                    static_cast<i64>(plan.trajectory.size()) == k &&
                        !plan.trajectory.back().is_zero(),
                    "probe survives " + std::to_string(k - 1) + " shift steps and dies at step " +
                        std::to_string(k));
            c.check(label + ":omega-verdict", verdict.sh == Verdict::No,
                    "unbounded repetition demands sh = no; got " + verdict_str(verdict.sh));
        } else {
            c.note(label + " is torsion-free of rank 1; rational model only");
        }
    } else {
        c.note(label + " has height jumps without single-jump data; no concrete model");
    }
    if (!b.extra_torsion.is_trivial())
        torsion_summand_checks(c, label + ":extra", b.extra_torsion, ExtNat::of(1), verdict);
}

void pattern_checks(Ctx& c, const std::string& label, const PrimeIndexedBPattern& fam) {
    for (i64 n = 1; n <= c.opts.prime_budget; ++n) {
        i64 p = nth_prime(n);
        HeightRow row = fam.supported_row.at(n);
        i64 m = row.base;
        i64 k = 0;
        std::optional<i64> j;
        if (row.jumps.size() == 1 && !row.infinite_from) {
            k = row.jumps[0].pos;
            j = row.jumps[0].gap;
        } else if (row.jumps.empty() && row.infinite_from && *row.infinite_from >= 1) {
            k = *row.infinite_from - m;
        } else if (row.jumps.empty() && !row.infinite_from) {
            c.note(label + " member at p=" + std::to_string(p) + " is torsion-free; skipped");
            continue;
        } else {
            c.note(label + " member at p=" + std::to_string(p) +
                   " has no single-jump reading; skipped");
            continue;
        }
        if (k < 1) {
            c.note(label + " member at p=" + std::to_string(p) + " carries no torsion; skipped");
            continue;
        }
        i64 jj = j ? *j : c.opts.j_cap;
        if (!j)
            c.note(label + " member at p=" + std::to_string(p) + " divisible past the jump; j = " +
                   std::to_string(jj) + " used");
        if (m + k + jj + 1 > 40) {
            c.note(label + " member at p=" + std::to_string(p) + " beyond desk scale; skipped");
            continue;
        }
        Rank1Model M = build_rank1_model(p, m, k, jj);
        bool ok = true;
        std::string detail;
        for (EndoCase which : {EndoCase::Case1, EndoCase::Case2}) {
            if (which == EndoCase::Case1 && jj > k) continue;
            if (which == EndoCase::Case2 && k > jj) continue;
            i64 idx = torsion_chain_index(M, which);
            ok = ok && idx == ceil_div(M.e(), case_action_exponent(M, which));
            detail += "chain " + std::to_string(idx) + "; ";
        }
        c.check(label + ":member-chains@p=" + std::to_string(p), ok,
                detail + "restricted kernel chains match ceil(e/l)");
    }
}

}  // namespace

OracleReport cross_check(const GroupDescriptor& g, const Classification& verdict,
                         const OracleOptions& opts) {
    auto bad = validate(g);
    if (!bad.empty()) throw ValidationError(bad);
    Ctx c{opts, {}};

    if (g.divisible.is_trivial() && g.summands.empty()) {
        bool all_yes = verdict.sh == Verdict::Yes && verdict.uniformly_sh == Verdict::Yes &&
                       verdict.sco_h == Verdict::Yes && verdict.uniformly_sco_h == Verdict::Yes &&
                       verdict.torsion_sh == Verdict::Yes;
        c.check("trivial-group", all_yes, "the zero group must classify all-yes");
    }

    if (!g.divisible.is_trivial()) divisible_checks(c, g.divisible, verdict);

    bool delegated = g.divisible.is_trivial() && g.summands.size() == 1 &&
                     g.summands[0].multiplicity == ExtNat::of(1);
    for (std::size_t i = 0; i < g.summands.size(); ++i) {
        const SummandEntry& e = g.summands[i];
        std::string label = e.label.empty() ? "summands[" + std::to_string(i) + "]" : e.label;
        if (const auto* td = std::get_if<TorsionDescriptor>(&e.payload))
            torsion_summand_checks(c, label, *td, e.multiplicity, verdict);
        else if (const auto* b = std::get_if<BDescriptor>(&e.payload))
            b_entry_checks(c, label, *b, e.multiplicity, delegated, verdict);
        else
            pattern_checks(c, label, std::get<PrimeIndexedBPattern>(e.payload));
    }

    if (auto order = whole_order(g, opts.order_budget)) {
        if (*order > 1) {
            FinPresGroup G = FinPresGroup::direct_sum_cyclic(whole_orders_list(g));
            try {
                i64 mu = min_uniform_sh_exponent(G, opts.endo_budget);
                auto bound = claimed_bound(verdict, "all");
                if (!bound) bound = claimed_bound(verdict, "uniformly_sh");
                c.check("finite-group-verdict",
                        verdict.sh == Verdict::Yes && (!bound || mu <= *bound),
                        "finite group of order " + std::to_string(*order) +
                            ": brute-forced uniform exponent " + std::to_string(mu) +
                            (bound ? " within the claimed bound " + std::to_string(*bound)
                                   : ", no bound claimed"));
            } catch (const BudgetExceeded&) {
                c.note("finite instantiation has too many endomorphisms for the budget");
            }
        }
    }

    c.rep.consistent = true;
    std::string failures;
    for (const OracleCheck& ch : c.rep.checks)
        if (!ch.passed) {
            c.rep.consistent = false;
            failures += ch.name + " (" + ch.detail + "); ";
        }
    if (!c.rep.consistent) throw Inconsistent("oracle checks failed: " + failures);
    return c.rep;
}

}  // namespace hopfian
