// json_io.hpp — JSON encode/decode of the file formats plus canonical
// serialization and digests.
//
// Complex numbers encode as two-element arrays [re, im]; matrices as nested
// row arrays. Document schemas (qnetsyn.system_params, qnetsyn.model_matrix,
// qnetsyn.netlist, qnetsyn.verification_report) are described in
// docs/schemas.md and enforced on ingestion with SchemaError.

#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

#include "qnetsyn/core_types.hpp"
#include "qnetsyn/model_matrix.hpp"
#include "qnetsyn/synthesis.hpp"
#include "qnetsyn/verify.hpp"

namespace qnetsyn {

using nlohmann::json;

// ----------------------------- matrix encoding -------------------------------

json cmat_to_json(const CMat& a);
json rmat_to_json(const RMat& a);

// Accepts [re, im] pairs or bare numbers (treated as real) for complex
// entries; requires rectangular nested arrays.
CMat cmat_from_json(const json& j, const std::string& what);
RMat rmat_from_json(const json& j, const std::string& what);

// ----------------------------- document formats ------------------------------

json system_to_json(const SystemParams& g);
SystemParams system_from_json(const json& j);

json model_to_json(const ModelMatrix& m);
ModelMatrix model_from_json(const json& j);

json netlist_to_json(const SynthesisNetlist& netlist);
SynthesisNetlist netlist_from_json(const json& j);

json report_to_json(const VerificationReport& report);

json qsde_to_json(const QsdeMatrices& q);

// Parses a document that is either a system or a model matrix and returns the
// model view (systems are wrapped with build_model).
ModelMatrix model_or_system_from_json(const json& j);

// ------------------------- canonical form and digests ------------------------

// Deterministic serialization: object keys sorted, no whitespace, floats
// printed with 17 significant digits, -0 normalized to 0. Two documents with
// the same canonical dump are treated as identical everywhere digests appear.
std::string canonical_dump(const json& j);

std::string sha256_hex(std::string_view data);

// SHA-256 of the canonical system document; binds netlists to their targets.
std::string system_digest(const SystemParams& g);

// Parses text, mapping parse failures to SchemaError.
json parse_json_text(const std::string& text, const std::string& what);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace qnetsyn
