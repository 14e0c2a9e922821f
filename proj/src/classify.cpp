#include "hopfian/classify.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "hopfian/errors.hpp"

namespace hopfian {

std::string verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        case Verdict::Unknown: break;
    }
    return "unknown";
}

namespace {

enum Atom { A_USH = 0, A_SH, A_SCO, A_USCO, A_TSH, ATOM_COUNT };

const char* atom_name(int a) {
    switch (a) {
        case A_USH: return "uniformly_sh";
        case A_SH: return "sh";
        case A_SCO: return "sco_h";
        case A_USCO: return "uniformly_sco_h";
        case A_TSH: return "torsion_sh";
    }
    return "?";
}

struct Rule {
    const char* id;
    const char* statement;
    bool needs_reduced, needs_sp, needs_finite_rank;
    Atom from, to;
};

const Rule kRules[] = {
    {"uniform-to-plain-sh",
     "a single kernel-chain exponent valid for every endomorphism in particular bounds each chain",
     false, false, false, A_USH, A_SH},
    {"uniform-to-plain-sco",
     "a single image-chain exponent valid for every endomorphism in particular bounds each chain",
     false, false, false, A_USCO, A_SCO},
    {"uniform-sh-restricts-to-torsion",
     "a uniform kernel-chain exponent for the group restricts to its torsion subgroup",
     false, false, false, A_USH, A_TSH},
    {"reduced-sco-to-sh",
     "in a reduced group, stabilizing image chains force stabilizing kernel chains",
     true, false, false, A_SCO, A_SH},
    {"reduced-usco-to-ush",
     "in a reduced group, a uniform image-chain exponent forces a uniform kernel-chain exponent",
     true, false, false, A_USCO, A_USH},
    {"sp-torsion-lifts",
     "over a divisible torsion-free quotient, a kernel-chain exponent for the torsion lifts to a "
     "uniform one for the whole group",
     true, true, false, A_TSH, A_USH},
    {"finite-rank-torsion-lifts",
     "strongly Hopfian torsion beneath a finite-rank torsion-free quotient composes to a uniform "
     "exponent",
     false, false, true, A_TSH, A_USH},
    {"finite-rank-sh-to-sco",
     "in finite rank with a divisible torsion-free quotient, kernel stabilization forces image "
     "stabilization",
     true, true, true, A_SH, A_SCO},
    {"finite-rank-ush-to-usco",
     "in finite rank with a divisible torsion-free quotient, a uniform kernel-chain exponent "
     "forces a uniform image-chain one",
     true, true, true, A_USH, A_USCO},
};

// Unconditional conclusions available from the context flags alone.
struct FactRule {
    const char* id;
    const char* statement;
    bool needs_reduced, needs_not_sp, needs_finite_rank;
    Atom atom;
    Verdict value;
};

const FactRule kFactRules[] = {
    {"finite-rank-nondivisible-quotient",
     "a reduced group of finite rank whose torsion-free quotient is not divisible never "
     "stabilizes image chains",
     true, true, true, A_SCO, Verdict::No},
};

struct Engine {
    std::array<Verdict, ATOM_COUNT> state;
    std::vector<RuleStep> trace;

    void set(int a, Verdict v, const std::string& rule, const std::string& statement) {
        if (state[a] == v) return;
        if (state[a] != Verdict::Unknown)
            throw Contradiction(std::string(atom_name(a)) + " forced both " +
                                verdict_str(state[a]) + " and " + verdict_str(v) + " (rule " +
                                rule + ")");
        state[a] = v;
        trace.push_back({rule, statement});
    }
};

}  // namespace

Classification propagate(const Facts& facts, const ContextFlags& flags) {
    Engine eng;
    eng.state = {facts.uniformly_sh, facts.sh, facts.sco_h, facts.uniformly_sco_h,
                 facts.torsion_sh};
    for (const FactRule& r : kFactRules) {
        if (r.needs_reduced && !flags.reduced) continue;
        if (r.needs_not_sp && flags.sp) continue;
        if (r.needs_finite_rank && !flags.finite_rank) continue;
        eng.set(r.atom, r.value, r.id, r.statement);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule& r : kRules) {
            if (r.needs_reduced && !flags.reduced) continue;
            if (r.needs_sp && !flags.sp) continue;
            if (r.needs_finite_rank && !flags.finite_rank) continue;
            std::size_t before = eng.trace.size();
            if (eng.state[r.from] == Verdict::Yes) eng.set(r.to, Verdict::Yes, r.id, r.statement);
            if (eng.state[r.to] == Verdict::No)
                eng.set(r.from, Verdict::No, std::string(r.id) + "-contra",
                        std::string("contrapositive: ") + r.statement);
            if (eng.trace.size() != before) changed = true;
        }
    }
    Classification c;
    c.uniformly_sh = eng.state[A_USH];
    c.sh = eng.state[A_SH];
    c.sco_h = eng.state[A_SCO];
    c.uniformly_sco_h = eng.state[A_USCO];
    c.torsion_sh = eng.state[A_TSH];
    c.rule_trace = std::move(eng.trace);
    return c;
}

i64 uniform_exponent_bound(i64 m, i64 n) {
    if (m < 0 || n < 0) throw std::invalid_argument("bounds must be naturals");
    return m + mul_checked(n, n);
}

namespace {

Classification from_torsion_family(const NatFamily& e) {
    TorsionShResult r = torsion_is_sh(e);
    Verdict v = r.is_sh ? Verdict::Yes : Verdict::No;
    Classification c;
    c.uniformly_sh = c.sh = c.sco_h = c.uniformly_sco_h = c.torsion_sh = v;
    c.rule_trace.push_back(
        {"torsion-bounded-exponent",
         "a reduced torsion group has all four stabilization properties exactly when the orders "
         "of its p-components are bounded by a single p^e"});
    Witness w;
    w.field = "all";
    if (r.is_sh) {
        w.kind = "exponent_bound";
        w.value = r.bound;
        w.note = "log_p of the p-component order stays within this bound at every prime";
    } else {
        w.kind = "unbounded_family";
        w.primes = r.witness_primes;
        w.note = "the p-component orders exceed every fixed p^e along these primes";
    }
    c.witnesses.push_back(std::move(w));
    return c;
}

Classification trivial_classification() {
    Classification c;
    c.uniformly_sh = c.sh = c.sco_h = c.uniformly_sco_h = c.torsion_sh = Verdict::Yes;
    Witness w;
    w.kind = "exponent_bound";
    w.field = "uniformly_sh";
    w.value = 0;
    w.note = "the trivial group stabilizes every chain immediately";
    c.witnesses.push_back(std::move(w));
    c.rule_trace.push_back({"trivial-group", "the zero group has no nontrivial endomorphisms"});
    return c;
}

void merge_front(Classification& into, const Classification& pre) {
    into.witnesses.insert(into.witnesses.begin(), pre.witnesses.begin(), pre.witnesses.end());
    into.rule_trace.insert(into.rule_trace.begin(), pre.rule_trace.begin(), pre.rule_trace.end());
    into.torsion_unverified = into.torsion_unverified || pre.torsion_unverified;
}

}  // namespace

Classification classify_torsion(const TorsionDescriptor& t) {
    auto bad = t.invalid_reasons();
    if (!bad.empty()) throw ValidationError(bad);
    return from_torsion_family(t.exponent_family());
}

ChainResult longest_summand_chain(const std::vector<ChainEntry>& entries) {
    ChainResult out;
    for (const ChainEntry& e : entries) {
        if (e.multiplicity.is_inf) {
            out.bounded = false;
            out.unbounded_reason = "summand '" + e.label +
                                   "' repeats without bound and embeds in itself, so chains of "
                                   "every length exist";
            out.chain = {e.label, e.label};
            return out;
        }
    }

    struct Node {
        HeightMatrix mat;
        i64 weight;
        std::string label;
        int family;
    };
    std::vector<Node> nodes;
    i64 gbase = 0;
    for (const ChainEntry& e : entries)
        if (const auto* h = std::get_if<HeightMatrix>(&e.payload))
            gbase = std::max(gbase, h->max_exception_index());
    i64 g1 = gbase + 1, g2 = gbase + 2;

    for (std::size_t i = 0; i < entries.size(); ++i) {
        const ChainEntry& e = entries[i];
        if (const auto* h = std::get_if<HeightMatrix>(&e.payload)) {
            nodes.push_back({*h, e.multiplicity.v, e.label, -1});
        } else {
            const auto& fam = std::get<PrimeIndexedBPattern>(e.payload);
            HeightMatrix m1 = fam.member_at(g1).matrix;
            HeightMatrix m2 = fam.member_at(g2).matrix;
            if (walk_le(m1, m2) || walk_le(m2, m1)) {
                out.bounded = false;
                out.unbounded_reason = "members of '" + e.label +
                                       "' at different primes embed into one another, so chains "
                                       "of every length exist";
                out.chain = {e.label + "[p=" + std::to_string(nth_prime(g1)) + "]",
                             e.label + "[p=" + std::to_string(nth_prime(g2)) + "]"};
                return out;
            }
            nodes.push_back({m1, e.multiplicity.v,
                             e.label + "[p=" + std::to_string(nth_prime(g1)) + "]",
                             static_cast<int>(i)});
            nodes.push_back({m2, e.multiplicity.v,
                             e.label + "[p=" + std::to_string(nth_prime(g2)) + "]",
                             static_cast<int>(i)});
        }
    }

    std::size_t n = nodes.size();
    if (n == 0) {
        out.bounded = true;
        return out;
    }
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            le[i][j] = (i == j) || walk_le(nodes[i].mat, nodes[j].mat).has_value();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (le[i][k] && le[k][j]) le[i][j] = true;
    // Comparable members of one family certify chains through every prime.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && nodes[i].family >= 0 && nodes[i].family == nodes[j].family &&
                le[i][j]) {
                out.bounded = false;
                out.unbounded_reason = "members of '" + entries[nodes[i].family].label +
                                       "' at different primes embed into one another, so chains "
                                       "of every length exist";
                out.chain = {nodes[i].label, nodes[j].label};
                return out;
            }

    // Condense mutually comparable nodes, then take the heaviest path.
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        comp[i] = ncomp;
        for (std::size_t j = i + 1; j < n; ++j)
            if (le[i][j] && le[j][i]) comp[j] = ncomp;
        ++ncomp;
    }
    std::vector<i64> weight(ncomp, 0);
    std::vector<std::vector<std::string>> labels(ncomp);
    for (std::size_t i = 0; i < n; ++i) {
        weight[comp[i]] += nodes[i].weight;
        std::string lab = nodes[i].label;
        if (nodes[i].weight > 1) lab += " (x" + std::to_string(nodes[i].weight) + ")";
        labels[comp[i]].push_back(lab);
    }
    std::vector<std::vector<bool>> cle(ncomp, std::vector<bool>(ncomp, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (le[i][j]) cle[comp[i]][comp[j]] = true;

    std::vector<i64> best(ncomp, -1);
    std::vector<int> prev(ncomp, -1);
    // le is transitively closed, so predecessors can be folded in any order.
    bool progressed = true;
    for (int c = 0; c < ncomp; ++c) best[c] = weight[c];
    while (progressed) {
        progressed = false;
        for (int b = 0; b < ncomp; ++b)
            for (int a = 0; a < ncomp; ++a) {
                if (a == b || !cle[a][b] || cle[b][a]) continue;
                if (best[a] + weight[b] > best[b]) {
                    best[b] = best[a] + weight[b];
                    prev[b] = a;
                    progressed = true;
                }
            }
    }
    int endc = 0;
    for (int c = 1; c < ncomp; ++c)
        if (best[c] > best[endc]) endc = c;
    out.bounded = true;
    out.length = best[endc];
    std::vector<int> path;
    for (int c = endc; c >= 0; c = prev[c]) path.push_back(c);
    std::reverse(path.begin(), path.end());
    for (int c : path)
        for (const std::string& lab : labels[c]) out.chain.push_back(lab);
    return out;
}

namespace {

bool characteristic_reasons(const HeightMatrix& h, std::string& why) {
    if (!h.tail.jumps.empty()) {
        why = "tail pattern has finite jumps";
        return false;
    }
    if (h.tail.infinite_from && !(*h.tail.infinite_from == LinExpr::constant(0))) {
        why = "tail pattern turns infinite away from index 0";
        return false;
    }
    for (const auto& [p, r] : h.exceptions) {
        if (!r.jumps.empty()) {
            why = "row at prime " + std::to_string(p) + " has finite jumps";
            return false;
        }
        if (r.infinite_from && *r.infinite_from != 0) {
            why = "row at prime " + std::to_string(p) + " turns infinite away from index 0";
            return false;
        }
    }
    return true;
}

}  // namespace

Classification classify_completely_decomposable(const std::vector<CDEntry>& entries) {
    for (const CDEntry& e : entries) {
        std::string why;
        if (!characteristic_reasons(e.type, why)) throw NotACharacteristic(why);
    }
    if (entries.empty()) return trivial_classification();

    std::vector<ChainEntry> chain_entries;
    bool finite_rank = true, all_divisible = true, any_divisible = false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const CDEntry& e = entries[i];
        std::string label = e.label.empty() ? "types[" + std::to_string(i) + "]" : e.label;
        chain_entries.push_back({e.type, e.multiplicity, label});
        if (e.multiplicity.is_inf) finite_rank = false;
        if (matrix_is_fully_divisible(e.type)) any_divisible = true;
        else all_divisible = false;
    }
    ChainResult chain = longest_summand_chain(chain_entries);

    Facts f;
    f.torsion_sh = Verdict::Yes;
    Classification pre;
    if (chain.bounded) {
        f.uniformly_sh = Verdict::Yes;
        Witness w;
        w.kind = "exponent_bound";
        w.field = "uniformly_sh";
        w.value = chain.length;
        w.chain = chain.chain;
        w.note = "no chain of comparable types, counting multiplicity, is longer";
        pre.witnesses.push_back(std::move(w));
    } else {
        f.sh = Verdict::No;
        Witness w;
        w.kind = "chain";
        w.field = "sh";
        w.chain = chain.chain;
        w.note = chain.unbounded_reason;
        pre.witnesses.push_back(std::move(w));
    }
    if (finite_rank) {
        f.sco_h = f.uniformly_sco_h = all_divisible ? Verdict::Yes : Verdict::No;
        Witness w;
        w.kind = "implication";
        w.field = "sco_h";
        w.note = all_divisible
                     ? "a divisible torsion-free group of finite rank stabilizes image chains"
                     : "a torsion-free group of finite rank stabilizes image chains only when "
                       "divisible";
        pre.witnesses.push_back(std::move(w));
    }
    pre.rule_trace.push_back(
        {"completely-decomposable-chains",
         "a direct sum of rank-1 torsion-free groups has stabilizing kernel chains exactly when "
         "chains of comparable types, counting multiplicity, have bounded length"});

    ContextFlags flags;
    flags.reduced = !any_divisible;
    flags.sp = false;
    flags.finite_rank = finite_rank;
    Classification c = propagate(f, flags);
    merge_front(c, pre);
    return c;
}

namespace {

LinExpr tail_as_lin(const NatFamily& f) {
    return f.tail_kind == NatFamily::Tail::Linear ? f.tail_lin : LinExpr::constant(f.tail_const.v);
}

// Least integer bound for e_p / min(j_p, k_p) over all primes, treating
// primes with e_p = 0 as unconstrained; nullopt when the ratio is unbounded.
std::optional<i64> rank1_ratio_bound(const NatFamily& e, const NatFamily& k, const NatFamily& j,
                                     std::vector<i64>* witness_primes) {
    i64 M = 0;
    std::set<i64> ps;
    for (const auto& [p, v] : e.exceptions) ps.insert(p);
    for (const auto& [p, v] : k.exceptions) ps.insert(p);
    for (const auto& [p, v] : j.exceptions) ps.insert(p);

    auto ratio_at = [&](i64 p) -> std::optional<i64> {  // nullopt: invalid/unbounded spot
        ExtNat ep = e.at_prime(p);
        if (ep.is_inf) return std::nullopt;
        if (ep.v == 0) return 0;
        ExtNat kp = k.at_prime(p), jp = j.at_prime(p);
        ExtNat lp = jp.is_inf ? kp : (kp <= jp ? kp : jp);
        if (lp.is_inf) return 0;
        if (lp.v < 1) return std::nullopt;
        return ceil_div(ep.v, lp.v);
    };

    i64 n0 = std::max({e.max_exception_index(), k.max_exception_index(), j.max_exception_index()}) + 1;
    for (i64 p : ps) {
        auto r = ratio_at(p);
        if (!r) return std::nullopt;
        M = std::max(M, *r);
    }
    for (i64 n = 1; n < n0; ++n) {
        i64 p = nth_prime(n);
        if (ps.count(p)) continue;
        auto r = ratio_at(p);
        if (!r) return std::nullopt;
        M = std::max(M, *r);
    }

    if (e.tail_kind == NatFamily::Tail::Infinite) return std::nullopt;
    bool tail_zero = e.tail_kind == NatFamily::Tail::Const && e.tail_const.v == 0 &&
                     !e.tail_const.is_inf;
    if (!tail_zero) {
        LinExpr E = tail_as_lin(e);
        std::vector<LinExpr> branches;
        branches.push_back(tail_as_lin(k));
        if (j.tail_kind != NatFamily::Tail::Infinite) branches.push_back(tail_as_lin(j));
        for (const LinExpr& g : branches) {
            bool unbounded = false;
            if (g.a == 0) {
                if (g.b < 1 || E.a > 0) unbounded = true;
                else M = std::max(M, ceil_div(E.b, g.b));
            } else {
                if (g.at(n0) < 1) return std::nullopt;
                M = std::max(M, ceil_div(E.at(n0), g.at(n0)));
                M = std::max(M, ceil_div(E.a, g.a));
            }
            if (unbounded) {
                if (witness_primes)
                    for (i64 n = n0; n < n0 + 3; ++n) witness_primes->push_back(nth_prime(n));
                return std::nullopt;
            }
        }
    }
    return M;
}

bool cyclic_all_rows_eventually_infinite(const Rank1CyclicParams& p) {
    return all_rows_eventually_infinite(p.matrix());
}

}  // namespace

Classification classify_rank1_cyclic(const Rank1CyclicParams& params) {
    auto bad = params.invalid_reasons();
    if (!bad.empty()) throw ValidationError(bad);
    NatFamily e = params.torsion_exponents();
    TorsionShResult tr = torsion_is_sh(e);

    Facts f;
    f.torsion_sh = tr.is_sh ? Verdict::Yes : Verdict::No;
    Classification pre;
    std::vector<i64> ratio_witness;
    std::optional<i64> M = rank1_ratio_bound(e, params.k, params.j, &ratio_witness);
    if (M) {
        f.sh = Verdict::Yes;
        Witness w;
        w.kind = "exponent_bound";
        w.field = "sh";
        w.value = std::max<i64>(1, *M);
        w.note = "the torsion exponent stays within this multiple of the smaller jump datum at "
                 "every prime";
        pre.witnesses.push_back(std::move(w));
    } else {
        f.sh = Verdict::No;
        Witness w;
        w.kind = "unbounded_family";
        w.field = "sh";
        w.primes = ratio_witness;
        w.note = "the torsion exponent outgrows every fixed multiple of the smaller jump datum";
        pre.witnesses.push_back(std::move(w));
    }
    if (!tr.is_sh) {
        Witness w;
        w.kind = "unbounded_family";
        w.field = "torsion_sh";
        w.primes = tr.witness_primes;
        w.note = "the p-component orders exceed every fixed p^e along these primes";
        pre.witnesses.push_back(std::move(w));
    } else if (tr.bound) {
        Witness w;
        w.kind = "exponent_bound";
        w.field = "torsion_sh";
        w.value = tr.bound;
        w.note = "log_p of the p-component order stays within this bound at every prime";
        pre.witnesses.push_back(std::move(w));
    }
    pre.rule_trace.push_back(
        {"rank1-cyclic-ratio",
         "a rank-1 group with cyclic p-torsion has stabilizing kernel chains exactly when the "
         "torsion exponent is bounded by a fixed multiple of the smaller jump datum"});

    ContextFlags flags;
    flags.reduced = true;
    flags.sp = cyclic_all_rows_eventually_infinite(params);
    flags.finite_rank = true;
    Classification c = propagate(f, flags);
    merge_front(c, pre);
    return c;
}

namespace {

bool delegation_applicable(const GroupDescriptor& g, Rank1CyclicParams& out) {
    if (g.summands.size() != 1) return false;
    const SummandEntry& e = g.summands[0];
    if (e.multiplicity.is_inf || e.multiplicity.v != 1) return false;
    const auto* b = std::get_if<BDescriptor>(&e.payload);
    if (!b || !b->cyclic || !b->extra_torsion.is_trivial()) return false;
    out = *b->cyclic;
    return true;
}

}  // namespace

Classification classify_warfield(const GroupDescriptor& g) {
    if (!g.divisible.is_trivial())
        throw NotReduced("classify_warfield expects an empty divisible part");
    auto bad = validate(g);
    if (!bad.empty()) throw ValidationError(bad);

    ContextFlags flags = context_flags(g);
    bool unverified = false;
    for (const SummandEntry& e : g.summands)
        if (const auto* b = std::get_if<BDescriptor>(&e.payload))
            if (a_torsion(*b).unverified) unverified = true;

    NatFamily t;
    try {
        t = total_torsion_exponent(g);
    } catch (const UnboundedAtAPrime& u) {
        Facts f;
        f.sh = Verdict::No;
        f.torsion_sh = Verdict::No;
        Classification c = propagate(f, flags);
        Witness w;
        w.kind = "unbounded_family";
        w.field = "sh";
        w.primes = {u.prime};
        w.note = "the p-component at this prime is infinite, so multiplication by p has an "
                 "ever-growing kernel chain";
        c.witnesses.insert(c.witnesses.begin(), std::move(w));
        c.rule_trace.insert(c.rule_trace.begin(),
                            {"infinite-p-component",
                             "a group with stabilizing kernel chains has finite p-components"});
        c.torsion_unverified = unverified;
        return c;
    }
    TorsionShResult tr = torsion_is_sh(t);

    std::vector<ChainEntry> chain_entries;
    for (std::size_t i = 0; i < g.summands.size(); ++i) {
        const SummandEntry& e = g.summands[i];
        std::string label =
            e.label.empty() ? "summands[" + std::to_string(i) + "]" : e.label;
        if (const auto* b = std::get_if<BDescriptor>(&e.payload))
            chain_entries.push_back({b->matrix, e.multiplicity, label});
        else if (const auto* fam = std::get_if<PrimeIndexedBPattern>(&e.payload))
            chain_entries.push_back({*fam, e.multiplicity, label});
    }
    if (chain_entries.empty()) {
        Classification c = from_torsion_family(t);
        c.torsion_unverified = unverified;
        return c;
    }

    ChainResult chain = longest_summand_chain(chain_entries);
    Facts f;
    f.torsion_sh = tr.is_sh ? Verdict::Yes : Verdict::No;
    Classification pre;
    pre.torsion_unverified = unverified;

    // A torsion direct summand with unbounded exponents fails on its own,
    // and the failure passes to the whole sum.
    std::optional<NatFamily> unbounded_part;
    std::string unbounded_label;
    for (std::size_t i = 0; i < g.summands.size() && !unbounded_part; ++i) {
        const SummandEntry& e = g.summands[i];
        NatFamily fam;
        if (const auto* td = std::get_if<TorsionDescriptor>(&e.payload))
            fam = td->exponent_family();
        else if (const auto* b = std::get_if<BDescriptor>(&e.payload))
            fam = b->extra_torsion.exponent_family();
        else
            continue;
        if (!fam.sup()) {
            unbounded_part = fam;
            unbounded_label =
                e.label.empty() ? "summands[" + std::to_string(i) + "]" : e.label;
        }
    }

    if (tr.is_sh) {
        Witness w;
        w.kind = "exponent_bound";
        w.field = "torsion_sh";
        w.value = tr.bound;
        w.note = "log_p of the p-component order stays within this bound at every prime";
        pre.witnesses.push_back(std::move(w));
    } else {
        Witness w;
        w.kind = "unbounded_family";
        w.field = "torsion_sh";
        w.primes = tr.witness_primes;
        w.note = "the p-component orders exceed every fixed p^e along these primes";
        pre.witnesses.push_back(std::move(w));
    }

    if (!chain.bounded) {
        f.sh = Verdict::No;
        Witness w;
        w.kind = "chain";
        w.field = "sh";
        w.chain = chain.chain;
        w.note = chain.unbounded_reason;
        pre.witnesses.push_back(std::move(w));
        pre.rule_trace.push_back(
            {"unbounded-summand-chains",
             "arbitrarily long chains of summands, each embedding into the next modulo torsion, "
             "assemble an endomorphism whose kernel chain never stabilizes"});
    } else if (unbounded_part) {
        f.sh = Verdict::No;
        Witness w;
        w.kind = "unbounded_family";
        w.field = "sh";
        w.primes = unbounded_part->unbounded_witness_primes(3);
        w.note = "the torsion direct summand '" + unbounded_label +
                 "' has unbounded exponents, and kernel-chain stabilization passes to direct "
                 "summands";
        pre.witnesses.push_back(std::move(w));
        pre.rule_trace.push_back(
            {"torsion-summand-unbounded",
             "an unbounded torsion direct summand already fails kernel-chain stabilization, and "
             "the property passes to direct summands"});
    } else if (tr.is_sh) {
        f.uniformly_sh = Verdict::Yes;
        Witness w;
        w.kind = "exponent_bound";
        w.field = "uniformly_sh";
        w.value = uniform_exponent_bound(*tr.bound, chain.length);
        w.chain = chain.chain;
        w.note = "torsion exponent m plus n*n for the chain bound n is a uniform kernel-chain "
                 "exponent";
        pre.witnesses.push_back(std::move(w));
        pre.rule_trace.push_back(
            {"bounded-chains-with-sh-torsion",
             "bounded chains of comparable summands together with strongly Hopfian torsion give "
             "a uniform kernel-chain exponent"});
    } else {
        Rank1CyclicParams params;
        if (delegation_applicable(g, params)) {
            Classification sub = classify_rank1_cyclic(params);
            f.sh = sub.sh;
            for (const Witness& w : sub.witnesses)
                if (w.field == "sh") pre.witnesses.push_back(w);
            // The implication steps in sub's trace reappear when the facts are
            // propagated below; keep only the step the delegation itself adds.
            for (const RuleStep& s : sub.rule_trace)
                if (s.rule == "rank1-cyclic-ratio") pre.rule_trace.push_back(s);
        }
        // Otherwise: bounded chains with torsion that is not strongly
        // Hopfian leave the plain kernel-chain question open.
    }

    Classification c = propagate(f, flags);
    merge_front(c, pre);
    return c;
}

namespace {

Verdict and_verdict(Verdict a, Verdict b) {
    if (a == Verdict::No || b == Verdict::No) return Verdict::No;
    if (a == Verdict::Yes && b == Verdict::Yes) return Verdict::Yes;
    return Verdict::Unknown;
}

}  // namespace

ContextFlags context_flags(const GroupDescriptor& g) {
    ContextFlags f;
    f.reduced = g.divisible.is_trivial();
    f.finite_rank = !g.divisible.q_rank.is_inf;
    for (const SummandEntry& e : g.summands) {
        if (std::holds_alternative<TorsionDescriptor>(e.payload)) continue;
        if (std::holds_alternative<PrimeIndexedBPattern>(e.payload)) f.finite_rank = false;
        if (e.multiplicity.is_inf) f.finite_rank = false;
    }
    f.sp = f.reduced ? is_sp(g) : false;
    return f;
}

Classification classify(const GroupDescriptor& g) {
    auto bad = validate(g);
    if (!bad.empty()) throw ValidationError(bad);

    GroupDescriptor reduced_part;
    reduced_part.summands = g.summands;
    Classification r = g.summands.empty() ? trivial_classification()
                                          : classify_warfield(reduced_part);
    if (g.divisible.is_trivial()) return r;

    const DivisiblePart& d = g.divisible;
    std::optional<i64> prufer_p = d.prufer_ranks.first_nonzero_prime();
    bool q_fin = !d.q_rank.is_inf;
    std::optional<i64> prufer_sup = d.prufer_ranks.sup();

    Facts df;
    df.torsion_sh = prufer_p ? Verdict::No : Verdict::Yes;
    df.sh = df.uniformly_sh = (!prufer_p && q_fin) ? Verdict::Yes : Verdict::No;
    df.sco_h = df.uniformly_sco_h = (q_fin && prufer_sup) ? Verdict::Yes : Verdict::No;

    Classification pre;
    if (df.sh == Verdict::No) {
        Witness w;
        w.kind = "endo";
        w.field = "sh";
        if (prufer_p) {
            w.primes = {*prufer_p};
            w.note = "multiplication by p on the quasicyclic part has a strictly growing kernel "
                     "chain";
        } else {
            w.note = "a coordinate shift on infinitely many rational summands grows its kernel "
                     "chain without bound";
        }
        pre.witnesses.push_back(std::move(w));
    } else {
        Witness w;
        w.kind = "exponent_bound";
        w.field = "uniformly_sh";
        w.value = d.q_rank.v;
        w.note = "a torsion-free divisible group of this finite rank has it as a uniform "
                 "kernel-chain exponent";
        pre.witnesses.push_back(std::move(w));
    }
    if (df.sco_h == Verdict::No) {
        Witness w;
        w.kind = "endo";
        w.field = "sco_h";
        if (!q_fin) {
            w.note = "a coordinate shift away from the first rational summand shrinks image "
                     "chains forever";
        } else {
            w.primes = d.prufer_ranks.unbounded_witness_primes(3);
            w.note = "shifts assembled over quasicyclic powers of growing rank shrink image "
                     "chains forever";
        }
        pre.witnesses.push_back(std::move(w));
    } else {
        Witness w;
        w.kind = "exponent_bound";
        w.field = "uniformly_sco_h";
        w.value = std::max<i64>(d.q_rank.v, prufer_sup ? *prufer_sup : 0);
        w.note = "images of a divisible group with these finite ranks stabilize within the "
                 "larger rank";
        pre.witnesses.push_back(std::move(w));
    }
    pre.rule_trace.push_back(
        {"divisible-reduced-split",
         "kernel-chain properties of a divisible-plus-reduced direct sum are decided "
         "componentwise"});
    pre.rule_trace.push_back(
        {"summand-closure",
         "every stabilization property passes to direct summands, so a failing part refutes the "
         "whole sum"});

    Facts comb;
    comb.sh = and_verdict(df.sh, r.sh);
    comb.uniformly_sh = and_verdict(df.uniformly_sh, r.uniformly_sh);
    comb.torsion_sh = prufer_p ? Verdict::No : r.torsion_sh;
    comb.sco_h = df.sco_h == Verdict::No || r.sco_h == Verdict::No ? Verdict::No
                                                                   : Verdict::Unknown;
    comb.uniformly_sco_h =
        df.uniformly_sco_h == Verdict::No || r.uniformly_sco_h == Verdict::No ? Verdict::No
                                                                              : Verdict::Unknown;

    ContextFlags flags;
    flags.reduced = false;
    flags.sp = false;
    flags.finite_rank = context_flags(g).finite_rank;
    Classification c = propagate(comb, flags);
    merge_front(c, pre);
    c.witnesses.insert(c.witnesses.end(), r.witnesses.begin(), r.witnesses.end());
    c.rule_trace.insert(c.rule_trace.end(), r.rule_trace.begin(), r.rule_trace.end());
    c.torsion_unverified = c.torsion_unverified || r.torsion_unverified;
    return c;
}

}  // namespace hopfian
