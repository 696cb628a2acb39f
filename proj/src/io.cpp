#include "ddlqr/io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "ddlqr/errors.hpp"

namespace ddlqr::io {
namespace {

void require_object(const Json& j, const std::string& what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw IoError(what + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw IoError(what + ": unknown key \"" + item.key() + "\"");
  }
}

const Json& field(const Json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw IoError(what + ": missing key \"" + key + "\"");
  return *it;
}

int integer_field(const Json& j, const char* key, const std::string& what) {
  const Json& v = field(j, key, what);
  if (!v.is_number_integer()) throw IoError(what + ": \"" + key + "\" must be an integer");
  return v.get<int>();
}

}  // namespace

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw IoError(what + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw IoError(what + ": expected an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw IoError(what + ": rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw IoError(what + ": non-numeric entry");
      M(r, c) = v.get<double>();
      if (!std::isfinite(M(r, c))) throw IoError(what + ": non-finite entry");
    }
  }
  return M;
}

Json to_json(const LtiSystem& sys) {
  return {{"n", sys.n()}, {"m", sys.m()}, {"A", matrix_to_json(sys.A())}, {"B", matrix_to_json(sys.B())}};
}

LtiSystem system_from_json(const Json& j) {
  const std::string what = "system";
  require_object(j, what, {"n", "m", "A", "B"});
  Matrix A = matrix_from_json(field(j, "A", what), what + ".A");
  Matrix B = matrix_from_json(field(j, "B", what), what + ".B");
  if (j.contains("n") && integer_field(j, "n", what) != A.rows()) throw IoError("system: n does not match A");
  if (j.contains("m") && integer_field(j, "m", what) != B.cols()) throw IoError("system: m does not match B");
  return LtiSystem(std::move(A), std::move(B));
}

Json to_json(const CostWeights& w) {
  return {{"N", w.horizon()}, {"Qx", matrix_to_json(w.Qx())}, {"Qf", matrix_to_json(w.Qf())}, {"R", matrix_to_json(w.R())}};
}

CostWeights weights_from_json(const Json& j) {
  const std::string what = "weights";
  require_object(j, what, {"N", "Qx", "Qf", "R"});
  return CostWeights(matrix_from_json(field(j, "Qx", what), "weights.Qx"),
                     matrix_from_json(field(j, "Qf", what), "weights.Qf"),
                     matrix_from_json(field(j, "R", what), "weights.R"), integer_field(j, "N", what));
}

Json to_json(const ExperimentRecord& rec) {
  return {{"T", rec.T()},
          {"U0T", matrix_to_json(rec.U0T)},
          {"X0T", matrix_to_json(rec.X0T)},
          {"X1T", matrix_to_json(rec.X1T)}};
}

ExperimentRecord record_from_json(const Json& j) {
  const std::string what = "data";
  require_object(j, what, {"T", "U0T", "X0T", "X1T"});
  Matrix U0T = matrix_from_json(field(j, "U0T", what), "data.U0T");
  Matrix X0T = matrix_from_json(field(j, "X0T", what), "data.X0T");
  Matrix X1T = matrix_from_json(field(j, "X1T", what), "data.X1T");
  if (integer_field(j, "T", what) != U0T.cols()) throw IoError("data: T does not match U0T");
  return ExperimentRecord::from_matrices(std::move(U0T), std::move(X0T), std::move(X1T));
}

Json to_json(const LqrSolution& sol) {
  Json gains = Json::array();
  for (const Matrix& K : sol.gains) gains.push_back(matrix_to_json(K));
  Json S = Json::array();
  for (const Matrix& M : sol.S) S.push_back(matrix_to_json(M));
  return {{"mode", mode_name(sol.mode)},
          {"status", sdp::status_name(sol.status)},
          {"objective", sol.objective},
          {"gap", sol.gap},
          {"iters", sol.iterations},
          {"primal_infeas", sol.primal_infeas},
          {"dual_infeas", sol.dual_infeas},
          {"gains", std::move(gains)},
          {"S", std::move(S)}};
}

Json to_json(const RiccatiSolution& ric) {
  Json gains = Json::array();
  for (const Matrix& K : ric.K) gains.push_back(matrix_to_json(K));
  Json P = Json::array();
  for (const Matrix& M : ric.P) P.push_back(matrix_to_json(M));
  return {{"N", static_cast<int>(ric.K.size())}, {"P0", matrix_to_json(ric.P.front())}, {"gains", std::move(gains)}, {"P", std::move(P)}};
}

Json to_json(const DareSolution& dare) {
  return {{"P", matrix_to_json(dare.P)}, {"K", matrix_to_json(dare.K)}, {"iterations", dare.iterations}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  // max_digits10 output, so values survive a round trip exactly.
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ddlqr::io
