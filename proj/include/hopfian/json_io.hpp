#pragma once

#include <string>

#include <json.hpp>

#include "hopfian/classify.hpp"
#include "hopfian/descriptors.hpp"
#include "hopfian/oracle.hpp"

namespace hopfian {

using json = nlohmann::json;

// Versioned on-disk form of a group descriptor plus oracle budgets.  Parsing
// fills defaults, so parse -> serialize -> parse is the identity.
struct DescriptorDocument {
    std::string format_version = "1";
    GroupDescriptor group;
    OracleOptions options;
    bool operator==(const DescriptorDocument&) const = default;
};

json linexpr_to_json(const LinExpr& e);
json extnat_to_json(ExtNat v, const char* sentinel = "inf");
json natfamily_to_json(const NatFamily& f);
json heightrow_to_json(const HeightRow& r);
json rowpattern_to_json(const RowPattern& r);
json matrix_to_json(const HeightMatrix& h);
json torsion_to_json(const TorsionDescriptor& t);
json group_to_json(const GroupDescriptor& g);
json document_to_json(const DescriptorDocument& d);
std::string serialize_document(const DescriptorDocument& d);

// Strict readers: every unknown field, type mismatch, duplicate prime or
// non-prime index is a ParseError carrying the JSON pointer of the offender.
LinExpr linexpr_from_json(const json& j, const std::string& at);
ExtNat extnat_from_json(const json& j, const std::string& at, const char* sentinel = "inf");
NatFamily natfamily_from_json(const json& j, const std::string& at);
HeightRow heightrow_from_json(const json& j, const std::string& at);
RowPattern rowpattern_from_json(const json& j, const std::string& at);
HeightMatrix matrix_from_json(const json& j, const std::string& at);
TorsionDescriptor torsion_from_json(const json& j, const std::string& at);
GroupDescriptor group_from_json(const json& j, const std::string& at);

// Full document readers; they run validate() and throw ValidationError on a
// structurally sound but mathematically broken descriptor.
DescriptorDocument document_from_json(const json& j);
DescriptorDocument parse_document(const std::string& text);
DescriptorDocument load_document(const std::string& path);

json report_to_json(const Classification& c, const ContextFlags& flags,
                    const OracleReport* oracle, const OracleOptions& opts, i64 timing_ms);

}  // namespace hopfian
