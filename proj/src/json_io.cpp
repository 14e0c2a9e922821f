#include "hopfian/json_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "hopfian/errors.hpp"

namespace hopfian {

namespace {

std::string sub(const std::string& at, const std::string& key) { return at + "/" + key; }
std::string sub(const std::string& at, std::size_t i) { return at + "/" + std::to_string(i); }

void need_object(const json& j, const std::string& at) {
    if (!j.is_object()) throw ParseError(at, "expected an object");
}

void check_keys(const json& j, const std::string& at,
                std::initializer_list<const char*> allowed) {
    need_object(j, at);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ParseError(sub(at, it.key()), "unknown field");
    }
}

i64 as_int(const json& j, const std::string& at) {
    if (!j.is_number_integer()) throw ParseError(at, "expected an integer");
    return j.get<i64>();
}

i64 as_nonneg(const json& j, const std::string& at) {
    i64 v = as_int(j, at);
    if (v < 0) throw ParseError(at, "expected a nonnegative value");
    return v;
}

const json* opt_field(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& req_field(const json& j, const std::string& at, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(at, std::string("missing field \"") + key + "\"");
    return *it;
}

i64 as_prime(const json& j, const std::string& at, i64& prev) {
    i64 p = as_int(j, at);
    if (p < 2 || !is_prime(p)) throw ParseError(at, "not a prime");
    if (p <= prev) throw ParseError(at, "exception primes must be strictly increasing");
    prev = p;
    return p;
}

json linexpr_object(const LinExpr& e) { return json{{"a", e.a}, {"b", e.b}}; }

}  // namespace

json linexpr_to_json(const LinExpr& e) {
    if (e.is_const()) return e.b;
    return linexpr_object(e);
}

LinExpr linexpr_from_json(const json& j, const std::string& at) {
    if (j.is_number_integer()) return LinExpr::constant(j.get<i64>());
    check_keys(j, at, {"a", "b"});
    LinExpr e;
    e.a = as_int(req_field(j, at, "a"), sub(at, "a"));
    e.b = as_int(req_field(j, at, "b"), sub(at, "b"));
    return e;
}

json extnat_to_json(ExtNat v, const char* sentinel) {
    if (v.is_inf) return sentinel;
    return v.v;
}

ExtNat extnat_from_json(const json& j, const std::string& at, const char* sentinel) {
    if (j.is_string()) {
        if (j.get<std::string>() == sentinel) return ExtNat::inf();
        throw ParseError(at, std::string("expected an integer or \"") + sentinel + "\"");
    }
    return ExtNat::of(as_nonneg(j, at));
}

json natfamily_to_json(const NatFamily& f) {
    json tail;
    if (f.tail_kind == NatFamily::Tail::Infinite ||
        (f.tail_kind == NatFamily::Tail::Const && f.tail_const.is_inf))
        tail = "inf";
    else if (f.tail_kind == NatFamily::Tail::Const)
        tail = json{{"const", f.tail_const.v}};
    else
        tail = json{{"linear", linexpr_object(f.tail_lin)}};
    if (f.exceptions.empty()) {
        if (tail.is_string()) return tail;
        if (f.tail_kind == NatFamily::Tail::Const) return f.tail_const.v;
    }
    json out = json::object();
    if (!f.exceptions.empty()) {
        json exc = json::array();
        for (const auto& [p, v] : f.exceptions)
            exc.push_back(json{{"prime", p}, {"value", extnat_to_json(v)}});
        out["exceptions"] = std::move(exc);
    }
    out["tail"] = std::move(tail);
    return out;
}

NatFamily natfamily_from_json(const json& j, const std::string& at) {
    if (j.is_number_integer()) return NatFamily::constant(as_nonneg(j, at));
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return NatFamily::infinite();
        throw ParseError(at, "expected an integer, \"inf\", or an object");
    }
    check_keys(j, at, {"exceptions", "tail"});
    NatFamily f;
    const json& t = req_field(j, at, "tail");
    const std::string tat = sub(at, "tail");
    if (t.is_string()) {
        if (t.get<std::string>() != "inf")
            throw ParseError(tat, "expected \"inf\", {\"const\": v} or {\"linear\": ...}");
        f.tail_kind = NatFamily::Tail::Infinite;
    } else {
        check_keys(t, tat, {"const", "linear"});
        const json* c = opt_field(t, "const");
        const json* l = opt_field(t, "linear");
        if ((c != nullptr) == (l != nullptr))
            throw ParseError(tat, "give exactly one of \"const\" and \"linear\"");
        if (c) {
            f.tail_kind = NatFamily::Tail::Const;
            f.tail_const = ExtNat::of(as_nonneg(*c, sub(tat, "const")));
        } else {
            LinExpr e = linexpr_from_json(*l, sub(tat, "linear"));
            if (e.a <= 0) throw ParseError(sub(tat, "linear"), "slope must be positive");
            if (e.at(1) < 0)
                throw ParseError(sub(tat, "linear"), "negative at the first prime");
            f.tail_kind = NatFamily::Tail::Linear;
            f.tail_lin = e;
        }
    }
    if (const json* exc = opt_field(j, "exceptions")) {
        const std::string eat = sub(at, "exceptions");
        if (!exc->is_array()) throw ParseError(eat, "expected an array");
        i64 prev = 0;
        for (std::size_t i = 0; i < exc->size(); ++i) {
            const json& e = (*exc)[i];
            const std::string iat = sub(eat, i);
            check_keys(e, iat, {"prime", "value"});
            i64 p = as_prime(req_field(e, iat, "prime"), sub(iat, "prime"), prev);
            f.set_exception(p, extnat_from_json(req_field(e, iat, "value"), sub(iat, "value")));
        }
    }
    return f;
}

json heightrow_to_json(const HeightRow& r) {
    json out = json::object();
    out["base"] = r.base;
    if (!r.jumps.empty()) {
        json js = json::array();
        for (const Jump& jm : r.jumps) js.push_back(json{{"pos", jm.pos}, {"gap", jm.gap}});
        out["jumps"] = std::move(js);
    }
    if (r.infinite_from) out["infinite_from"] = *r.infinite_from;
    return out;
}

HeightRow heightrow_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"base", "jumps", "infinite_from"});
    HeightRow r;
    r.base = as_int(req_field(j, at, "base"), sub(at, "base"));
    if (const json* js = opt_field(j, "jumps")) {
        const std::string jat = sub(at, "jumps");
        if (!js->is_array()) throw ParseError(jat, "expected an array");
        for (std::size_t i = 0; i < js->size(); ++i) {
            const std::string iat = sub(jat, i);
            check_keys((*js)[i], iat, {"pos", "gap"});
            Jump jm;
            jm.pos = as_int(req_field((*js)[i], iat, "pos"), sub(iat, "pos"));
            jm.gap = as_int(req_field((*js)[i], iat, "gap"), sub(iat, "gap"));
            r.jumps.push_back(jm);
        }
    }
    if (const json* inf = opt_field(j, "infinite_from"))
        r.infinite_from = as_int(*inf, sub(at, "infinite_from"));
    return r;
}

json rowpattern_to_json(const RowPattern& r) {
    json out = json::object();
    out["base"] = linexpr_to_json(r.base);
    if (!r.jumps.empty()) {
        json js = json::array();
        for (const JumpPattern& jm : r.jumps)
            js.push_back(json{{"pos", linexpr_to_json(jm.pos)}, {"gap", linexpr_to_json(jm.gap)}});
        out["jumps"] = std::move(js);
    }
    if (r.infinite_from) out["infinite_from"] = linexpr_to_json(*r.infinite_from);
    return out;
}

RowPattern rowpattern_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"base", "jumps", "infinite_from"});
    RowPattern r;
    r.base = linexpr_from_json(req_field(j, at, "base"), sub(at, "base"));
    if (const json* js = opt_field(j, "jumps")) {
        const std::string jat = sub(at, "jumps");
        if (!js->is_array()) throw ParseError(jat, "expected an array");
        for (std::size_t i = 0; i < js->size(); ++i) {
            const std::string iat = sub(jat, i);
            check_keys((*js)[i], iat, {"pos", "gap"});
            JumpPattern jm;
            jm.pos = linexpr_from_json(req_field((*js)[i], iat, "pos"), sub(iat, "pos"));
            jm.gap = linexpr_from_json(req_field((*js)[i], iat, "gap"), sub(iat, "gap"));
            r.jumps.push_back(jm);
        }
    }
    if (const json* inf = opt_field(j, "infinite_from"))
        r.infinite_from = linexpr_from_json(*inf, sub(at, "infinite_from"));
    return r;
}

json matrix_to_json(const HeightMatrix& h) {
    json out = json::object();
    if (!h.exceptions.empty()) {
        json exc = json::array();
        for (const auto& [p, row] : h.exceptions)
            exc.push_back(json{{"prime", p}, {"row", heightrow_to_json(row)}});
        out["exceptions"] = std::move(exc);
    }
    out["tail"] = rowpattern_to_json(h.tail);
    return out;
}

HeightMatrix matrix_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"exceptions", "tail"});
    HeightMatrix h;
    if (const json* t = opt_field(j, "tail")) h.tail = rowpattern_from_json(*t, sub(at, "tail"));
    if (const json* exc = opt_field(j, "exceptions")) {
        const std::string eat = sub(at, "exceptions");
        if (!exc->is_array()) throw ParseError(eat, "expected an array");
        i64 prev = 0;
        for (std::size_t i = 0; i < exc->size(); ++i) {
            const json& e = (*exc)[i];
            const std::string iat = sub(eat, i);
            check_keys(e, iat, {"prime", "row"});
            i64 p = as_prime(req_field(e, iat, "prime"), sub(iat, "prime"), prev);
            h.set_exception(p, heightrow_from_json(req_field(e, iat, "row"), sub(iat, "row")));
        }
    }
    return h;
}

namespace {

json shape_to_json(const PShape& s) {
    json out = json::array();
    for (i64 e : s.exponents) out.push_back(e);
    return out;
}

PShape shape_from_json(const json& j, const std::string& at) {
    if (!j.is_array()) throw ParseError(at, "expected an array of exponents");
    PShape s;
    for (std::size_t i = 0; i < j.size(); ++i) s.exponents.push_back(as_int(j[i], sub(at, i)));
    return s;
}

}  // namespace

json torsion_to_json(const TorsionDescriptor& t) {
    json out = json::object();
    if (!t.exceptions.empty()) {
        json exc = json::array();
        for (const auto& [p, shape] : t.exceptions)
            exc.push_back(json{{"prime", p}, {"shape", shape_to_json(shape)}});
        out["exceptions"] = std::move(exc);
    }
    if (!t.tail.exponents.empty()) {
        json tail = json::array();
        for (const LinExpr& e : t.tail.exponents) tail.push_back(linexpr_to_json(e));
        out["tail"] = std::move(tail);
    }
    return out;
}

TorsionDescriptor torsion_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"exceptions", "tail"});
    TorsionDescriptor t;
    if (const json* tail = opt_field(j, "tail")) {
        const std::string tat = sub(at, "tail");
        if (!tail->is_array()) throw ParseError(tat, "expected an array of exponent forms");
        for (std::size_t i = 0; i < tail->size(); ++i)
            t.tail.exponents.push_back(linexpr_from_json((*tail)[i], sub(tat, i)));
    }
    if (const json* exc = opt_field(j, "exceptions")) {
        const std::string eat = sub(at, "exceptions");
        if (!exc->is_array()) throw ParseError(eat, "expected an array");
        i64 prev = 0;
        for (std::size_t i = 0; i < exc->size(); ++i) {
            const json& e = (*exc)[i];
            const std::string iat = sub(eat, i);
            check_keys(e, iat, {"prime", "shape"});
            i64 p = as_prime(req_field(e, iat, "prime"), sub(iat, "prime"), prev);
            t.set_exception(p, shape_from_json(req_field(e, iat, "shape"), sub(iat, "shape")));
        }
    }
    return t;
}

namespace {

json cyclic_to_json(const Rank1CyclicParams& c) {
    json out = json::object();
    out["m"] = natfamily_to_json(c.m);
    out["k"] = natfamily_to_json(c.k);
    out["j"] = natfamily_to_json(c.j);
    if (c.declared_e) out["e"] = natfamily_to_json(*c.declared_e);
    return out;
}

Rank1CyclicParams cyclic_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"m", "k", "j", "e"});
    Rank1CyclicParams c;
    c.m = natfamily_from_json(req_field(j, at, "m"), sub(at, "m"));
    c.k = natfamily_from_json(req_field(j, at, "k"), sub(at, "k"));
    c.j = natfamily_from_json(req_field(j, at, "j"), sub(at, "j"));
    if (const json* e = opt_field(j, "e")) c.declared_e = natfamily_from_json(*e, sub(at, "e"));
    return c;
}

json b_to_json(const BDescriptor& b) {
    json out = json::object();
    if (b.cyclic)
        out["cyclic"] = cyclic_to_json(*b.cyclic);
    else
        out["matrix"] = matrix_to_json(b.matrix);
    if (b.declared_torsion) out["declared_torsion"] = natfamily_to_json(*b.declared_torsion);
    if (!b.extra_torsion.is_trivial()) out["extra_torsion"] = torsion_to_json(b.extra_torsion);
    return out;
}

BDescriptor b_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"matrix", "cyclic", "declared_torsion", "extra_torsion"});
    BDescriptor b;
    const json* mx = opt_field(j, "matrix");
    const json* cy = opt_field(j, "cyclic");
    if ((mx != nullptr) == (cy != nullptr))
        throw ParseError(at, "give exactly one of \"matrix\" and \"cyclic\"");
    if (cy) {
        b.cyclic = cyclic_from_json(*cy, sub(at, "cyclic"));
        b.matrix = b.cyclic->matrix();
    } else {
        b.matrix = matrix_from_json(*mx, sub(at, "matrix"));
    }
    if (const json* d = opt_field(j, "declared_torsion"))
        b.declared_torsion = natfamily_from_json(*d, sub(at, "declared_torsion"));
    if (const json* x = opt_field(j, "extra_torsion"))
        b.extra_torsion = torsion_from_json(*x, sub(at, "extra_torsion"));
    return b;
}

json divisible_to_json(const DivisiblePart& d) {
    json out = json::object();
    if (!(d.q_rank == ExtNat::of(0))) out["q_rank"] = extnat_to_json(d.q_rank, "omega");
    if (!d.prufer_ranks.is_zero()) out["prufer_ranks"] = natfamily_to_json(d.prufer_ranks);
    return out;
}

DivisiblePart divisible_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"q_rank", "prufer_ranks"});
    DivisiblePart d;
    if (const json* q = opt_field(j, "q_rank"))
        d.q_rank = extnat_from_json(*q, sub(at, "q_rank"), "omega");
    if (const json* pr = opt_field(j, "prufer_ranks"))
        d.prufer_ranks = natfamily_from_json(*pr, sub(at, "prufer_ranks"));
    return d;
}

json summand_to_json(const SummandEntry& e) {
    json out = json::object();
    if (const auto* b = std::get_if<BDescriptor>(&e.payload)) {
        if (b->cyclic && !b->declared_torsion && b->extra_torsion.is_trivial())
            out["cyclic"] = cyclic_to_json(*b->cyclic);
        else
            out["b"] = b_to_json(*b);
    } else if (const auto* td = std::get_if<TorsionDescriptor>(&e.payload)) {
        out["torsion"] = torsion_to_json(*td);
    } else {
        const auto& fam = std::get<PrimeIndexedBPattern>(e.payload);
        out["b_family"] = json{{"supported_row", rowpattern_to_json(fam.supported_row)}};
    }
    if (!(e.multiplicity == ExtNat::of(1)))
        out["multiplicity"] = extnat_to_json(e.multiplicity, "omega");
    if (!e.label.empty()) out["label"] = e.label;
    return out;
}

SummandEntry summand_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"b", "cyclic", "torsion", "b_family", "multiplicity", "label"});
    SummandEntry e;
    int payloads = 0;
    for (const char* key : {"b", "cyclic", "torsion", "b_family"})
        if (opt_field(j, key)) ++payloads;
    if (payloads != 1)
        throw ParseError(at, "give exactly one of \"b\", \"cyclic\", \"torsion\", \"b_family\"");
    if (const json* b = opt_field(j, "b")) {
        e.payload = b_from_json(*b, sub(at, "b"));
    } else if (const json* cy = opt_field(j, "cyclic")) {
        BDescriptor bd;
        bd.cyclic = cyclic_from_json(*cy, sub(at, "cyclic"));
        bd.matrix = bd.cyclic->matrix();
        e.payload = std::move(bd);
    } else if (const json* td = opt_field(j, "torsion")) {
        e.payload = torsion_from_json(*td, sub(at, "torsion"));
    } else {
        const json* fam = opt_field(j, "b_family");
        const std::string fat = sub(at, "b_family");
        check_keys(*fam, fat, {"supported_row"});
        PrimeIndexedBPattern pb;
        pb.supported_row =
            rowpattern_from_json(req_field(*fam, fat, "supported_row"), sub(fat, "supported_row"));
        e.payload = std::move(pb);
    }
    if (const json* m = opt_field(j, "multiplicity"))
        e.multiplicity = extnat_from_json(*m, sub(at, "multiplicity"), "omega");
    if (const json* l = opt_field(j, "label")) {
        if (!l->is_string()) throw ParseError(sub(at, "label"), "expected a string");
        e.label = l->get<std::string>();
    }
    return e;
}

}  // namespace

json group_to_json(const GroupDescriptor& g) {
    json out = json::object();
    if (!g.divisible.is_trivial()) out["divisible"] = divisible_to_json(g.divisible);
    if (!g.summands.empty()) {
        json arr = json::array();
        for (const SummandEntry& e : g.summands) arr.push_back(summand_to_json(e));
        out["summands"] = std::move(arr);
    }
    return out;
}

GroupDescriptor group_from_json(const json& j, const std::string& at) {
    check_keys(j, at, {"divisible", "summands"});
    GroupDescriptor g;
    if (const json* d = opt_field(j, "divisible"))
        g.divisible = divisible_from_json(*d, sub(at, "divisible"));
    if (const json* s = opt_field(j, "summands")) {
        const std::string sat = sub(at, "summands");
        if (!s->is_array()) throw ParseError(sat, "expected an array");
        for (std::size_t i = 0; i < s->size(); ++i)
            g.summands.push_back(summand_from_json((*s)[i], sub(sat, i)));
    }
    return g;
}

json document_to_json(const DescriptorDocument& d) {
    json out = json::object();
    out["format_version"] = d.format_version;
    out["group"] = group_to_json(d.group);
    OracleOptions def;
    if (!(d.options == def)) {
        json o = json::object();
        if (d.options.prime_budget != def.prime_budget) o["prime_budget"] = d.options.prime_budget;
        if (d.options.endo_budget != def.endo_budget) o["endo_budget"] = d.options.endo_budget;
        if (d.options.max_chain != def.max_chain) o["max_chain"] = d.options.max_chain;
        if (d.options.j_cap != def.j_cap) o["j_cap"] = d.options.j_cap;
        if (d.options.order_budget != def.order_budget) o["order_budget"] = d.options.order_budget;
        out["options"] = std::move(o);
    }
    return out;
}

std::string serialize_document(const DescriptorDocument& d) {
    return document_to_json(d).dump(2) + "\n";
}

DescriptorDocument document_from_json(const json& j) {
    check_keys(j, "", {"format_version", "group", "options"});
    DescriptorDocument d;
    const json& fv = req_field(j, "", "format_version");
    if (!fv.is_string() || fv.get<std::string>() != "1")
        throw ParseError("/format_version", "unsupported format version; expected \"1\"");
    d.group = group_from_json(req_field(j, "", "group"), "/group");
    if (const json* o = opt_field(j, "options")) {
        const std::string oat = "/options";
        check_keys(*o, oat,
                   {"prime_budget", "endo_budget", "max_chain", "j_cap", "order_budget"});
        auto read = [&](const char* key, i64& slot) {
            if (const json* v = opt_field(*o, key)) {
                i64 x = as_int(*v, sub(oat, key));
                if (x < 1) throw ParseError(sub(oat, key), "expected a positive value");
                slot = x;
            }
        };
        read("prime_budget", d.options.prime_budget);
        read("endo_budget", d.options.endo_budget);
        read("max_chain", d.options.max_chain);
        read("j_cap", d.options.j_cap);
        read("order_budget", d.options.order_budget);
    }
    auto bad = validate(d.group);
    if (!bad.empty()) throw ValidationError(bad);
    return d;
}

DescriptorDocument parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
    return document_from_json(j);
}

DescriptorDocument load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_document(buf.str());
}

json report_to_json(const Classification& c, const ContextFlags& flags,
                    const OracleReport* oracle, const OracleOptions& opts, i64 timing_ms) {
    json verdicts{{"sh", verdict_str(c.sh)},
                  {"uniformly_sh", verdict_str(c.uniformly_sh)},
                  {"sco_h", verdict_str(c.sco_h)},
                  {"uniformly_sco_h", verdict_str(c.uniformly_sco_h)},
                  {"torsion_sh", verdict_str(c.torsion_sh)}};
    json ws = json::array();
    for (const Witness& w : c.witnesses) {
        json o{{"kind", w.kind}, {"field", w.field}};
        if (w.value) o["value"] = *w.value;
        if (!w.primes.empty()) o["primes"] = w.primes;
        if (!w.chain.empty()) o["chain"] = w.chain;
        if (!w.note.empty()) o["note"] = w.note;
        ws.push_back(std::move(o));
    }
    json rt = json::array();
    for (const RuleStep& s : c.rule_trace)
        rt.push_back(json{{"rule", s.rule}, {"statement", s.statement}});
    json out{{"verdicts", std::move(verdicts)},
             {"witnesses", std::move(ws)},
             {"rule_trace", std::move(rt)},
             {"context", json{{"reduced", flags.reduced},
                              {"sp", flags.sp},
                              {"finite_rank", flags.finite_rank},
                              {"torsion_unverified", c.torsion_unverified}}},
             {"options", json{{"prime_budget", opts.prime_budget},
                              {"endo_budget", opts.endo_budget},
                              {"max_chain", opts.max_chain},
                              {"j_cap", opts.j_cap},
                              {"order_budget", opts.order_budget}}},
             {"timing_ms", timing_ms}};
    if (oracle) {
        json checks = json::array();
        for (const OracleCheck& ch : oracle->checks)
            checks.push_back(
                json{{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
        out["oracle"] = json{{"consistent", oracle->consistent},
                             {"checks", std::move(checks)},
                             {"truncations", oracle->truncations}};
    }
    return out;
}

}  // namespace hopfian
