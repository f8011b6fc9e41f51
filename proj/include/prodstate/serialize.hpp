#pragma once

#include "prodstate/cover.hpp"
#include "prodstate/discrete.hpp"
#include "prodstate/hardness.hpp"
#include "prodstate/mps.hpp"
#include "prodstate/polyopt.hpp"

#include <json.hpp>

#include <string>

namespace prodstate {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

Json complex_to_json(cplx z);
cplx complex_from_json(const Json& j);

Json vector_to_json(const VectorXc& v);
VectorXc vector_from_json(const Json& j);

/// Row-major list of rows.
Json matrix_to_json(const MatrixXc& m);
MatrixXc matrix_from_json(const Json& j);

Json state_to_json(const QuantumState& s);
QuantumState state_from_json(const Json& j);

Json params_to_json(const ProductParams& p);
ProductParams params_from_json(const Json& j);

Json cover_params_to_json(const CoverParams& p);
CoverParams cover_params_from_json(const Json& j);

Json cover_to_json(const Cover& c);
Cover cover_from_json(const Json& j);

Json mps_to_json(const MatrixProductState& m);
MatrixProductState mps_from_json(const Json& j);

Json tensor_to_json(const Tensor4& t);
Tensor4 tensor_from_json(const Json& j);

Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j);

Json class_to_json(const DiscreteClass& c);
DiscreteClass class_from_json(const Json& j);

Json poly_to_json(const PolySystem& s);
PolySystem poly_from_json(const Json& j);

Json domain_to_json(const OptDomain& d);
OptDomain domain_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// FNV-1a 64-bit digest as 16 hex digits.
std::string digest(const std::string& bytes);

} // namespace prodstate
