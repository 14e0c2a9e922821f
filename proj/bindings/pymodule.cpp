#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "hopfian/classify.hpp"
#include "hopfian/errors.hpp"
#include "hopfian/fpgroup.hpp"
#include "hopfian/intmat.hpp"
#include "hopfian/json_io.hpp"
#include "hopfian/oracle.hpp"

namespace py = pybind11;
using namespace hopfian;

namespace {

std::string classify_text(const std::string& text, bool with_oracle) {
    DescriptorDocument doc = parse_document(text);
    Classification c = classify(doc.group);
    ContextFlags flags = context_flags(doc.group);
    std::optional<OracleReport> orep;
    if (with_oracle) orep = cross_check(doc.group, c, doc.options);
    return report_to_json(c, flags, orep ? &*orep : nullptr, doc.options, 0).dump();
}

std::string roundtrip_text(const std::string& text) {
    return serialize_document(parse_document(text));
}

py::dict snf_rows(const std::vector<Vec>& rows) {
    if (rows.empty()) throw std::invalid_argument("need at least one row");
    for (const Vec& r : rows)
        if (r.size() != rows.front().size())
            throw std::invalid_argument("rows must have equal length");
    Mat m = Mat::from_rows(rows);
    SnfResult s = smith_normal_form(m);
    GroupStructure coker = cokernel_structure(m);
    py::dict out;
    out["diagonal"] = s.diag;
    out["rank"] = s.rank;
    out["free_rank"] = coker.free_rank;
    out["invariant_factors"] = coker.invariant_factors;
    return out;
}

i64 min_uniform_exponent(const std::vector<i64>& orders, i64 budget) {
    return min_uniform_sh_exponent(FinPresGroup::direct_sum_cyclic(orders), budget);
}

i64 chain_index(const std::vector<i64>& orders, const std::vector<Vec>& matrix) {
    FinPresGroup g = FinPresGroup::direct_sum_cyclic(orders);
    Mat m = Mat::from_rows(matrix);
    return g.kernel_chain(g.endomorphism_from_matrix(m)).stabilization_index;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "symbolic classifier for strong Hopficity of abelian groups";
    m.def("classify_text", &classify_text, py::arg("text"), py::arg("with_oracle") = false,
          "Classify a descriptor document (JSON text); returns the report as JSON text.");
    m.def("roundtrip_text", &roundtrip_text, py::arg("text"),
          "Parse a descriptor document and serialize it back.");
    m.def("snf", &snf_rows, py::arg("rows"),
          "Smith normal form and cokernel structure of an integer matrix.");
    m.def("min_uniform_exponent", &min_uniform_exponent, py::arg("orders"),
          py::arg("budget") = i64(1) << 17,
          "Largest kernel-chain stabilization index over all endomorphisms of the "
          "direct sum of cyclic groups of the given orders.");
    m.def("chain_index", &chain_index, py::arg("orders"), py::arg("matrix"),
          "Kernel-chain stabilization index of one endomorphism given by a matrix "
          "on canonical generators.");

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ValidationError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });
}
