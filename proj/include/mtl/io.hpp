#pragma once

#include <string>

#include <json.hpp>

#include "mtl/analysis.hpp"
#include "mtl/polytope.hpp"
#include "mtl/support_patch.hpp"
#include "mtl/sym_tensor.hpp"
#include "mtl/valuations.hpp"

namespace mtl::io {

using Json = nlohmann::json;

/// {"n", "rank", "coeffs": {"[i1,...,ip]": c}} with 1-based sorted indices; |c| < 1e-14 omitted.
Json tensor_to_json(const SymTensor& t);
SymTensor tensor_from_json(const Json& j);

/// {"dim": n, "vertices": [[...], ...]}
Json polytope_to_json(const Polytope& p);
Polytope polytope_from_json(const Json& j);

/// {"patches": [{"position": {...}, "normal": {...}}, ...]}
Json patch_to_json(const SupportPatch& eta);
SupportPatch patch_from_json(const Json& j, int n);

Json descriptor_to_json(const BasisDescriptor& d);
BasisDescriptor descriptor_from_json(const Json& j, int n);

Json report_to_json(const AxiomReport& r);
Json decomposition_to_json(const DecompositionResult& r);

/// Parses a file; throws InvalidArgument with the path on I/O or syntax errors.
Json read_json_file(const std::string& path);
/// Writes j.dump(2) plus a trailing newline.
void write_json_file(const std::string& path, const Json& j);

}  // namespace mtl::io
