#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "ddlqr/excitation_data.hpp"
#include "ddlqr/lqr_programs.hpp"
#include "ddlqr/lti_system.hpp"
#include "ddlqr/riccati.hpp"

// JSON forms of the library types. Matrices are row-major nested arrays.
// Readers throw IoError on missing, malformed or unknown keys; shape and
// definiteness problems surface as the usual library errors.
namespace ddlqr::io {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j, const std::string& what);

/// {"n", "m", "A", "B"}; n and m are optional on input and checked if present.
Json to_json(const LtiSystem& sys);
LtiSystem system_from_json(const Json& j);

/// {"N", "Qx", "Qf", "R"}.
Json to_json(const CostWeights& w);
CostWeights weights_from_json(const Json& j);

/// {"T", "U0T", "X0T", "X1T"}.
Json to_json(const ExperimentRecord& rec);
ExperimentRecord record_from_json(const Json& j);

/// {"mode", "status", "objective", "gap", "iters", "primal_infeas",
///  "dual_infeas", "gains", "S"}.
Json to_json(const LqrSolution& sol);

/// {"N", "P0", "gains", "P"}.
Json to_json(const RiccatiSolution& ric);

/// {"P", "K", "iterations"}.
Json to_json(const DareSolution& dare);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace ddlqr::io
