#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "ddlqr/bench.hpp"
#include "ddlqr/errors.hpp"
#include "ddlqr/io.hpp"

using namespace ddlqr;
using io::Json;

TEST_CASE("matrices") {
  const Matrix M{{1, 2, 3}, {4, 5, 6}};
  const Json j = io::matrix_to_json(M);
  CHECK(j.dump() == "[[1.0,2.0,3.0],[4.0,5.0,6.0]]");
  CHECK(io::matrix_from_json(j, "M") == M);
  CHECK(io::matrix_from_json(Json::parse("[[7]]"), "s") == Matrix::Constant(1, 1, 7));
  CHECK_THROWS_AS(io::matrix_from_json(Json::parse("[[1, 2], [3]]"), "M"), IoError);
  CHECK_THROWS_AS(io::matrix_from_json(Json::parse("[[1, \"x\"]]"), "M"), IoError);
  CHECK_THROWS_AS(io::matrix_from_json(Json::parse("3"), "M"), IoError);
}

TEST_CASE("round trips") {
  Rng rng(2);
  const LtiSystem sys = bench::reactor_system();
  const LtiSystem back = io::system_from_json(Json::parse(io::to_json(sys).dump()));
  CHECK(back.A() == sys.A());
  CHECK(back.B() == sys.B());

  const CostWeights w(2.0 * Matrix::Identity(4, 4), Matrix::Identity(4, 4), Matrix::Identity(2, 2), 7);
  const CostWeights w2 = io::weights_from_json(io::to_json(w));
  CHECK(w2.horizon() == 7);
  CHECK(w2.Qx() == w.Qx());

  const ExperimentRecord rec = collect_experiment(sys, rng.normal_vector(4), pe_input(2, 15, rng));
  const ExperimentRecord r2 = io::record_from_json(Json::parse(io::to_json(rec).dump()));
  CHECK(r2.U0T == rec.U0T);
  CHECK(r2.X0T == rec.X0T);
  CHECK(r2.X1T == rec.X1T);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(io::system_from_json(Json::parse(R"({"A": [[1]]})")), IoError);
  CHECK_THROWS_AS(io::system_from_json(Json::parse(R"({"A": [[1]], "B": [[1]], "C": 1})")), IoError);
  CHECK_THROWS_AS(io::system_from_json(Json::parse(R"({"n": 2, "A": [[1]], "B": [[1]]})")), IoError);
  CHECK_THROWS_AS(io::system_from_json(Json::parse(R"({"A": [[1, 0]], "B": [[1]]})")), DimensionError);
  CHECK_THROWS_AS(io::weights_from_json(Json::parse(R"({"N": 2, "Qx": [[-1]], "Qf": [[1]], "R": [[1]]})")),
                  DefinitenessError);
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/ddlqr.json"), IoError);

  const auto dir = std::filesystem::temp_directory_path() / "ddlqr_test_io";
  std::filesystem::remove_all(dir);
  io::write_text_file(dir / "sub" / "broken.json", "{ not json");
  CHECK_THROWS_AS(io::read_json_file(dir / "sub" / "broken.json"), IoError);
  io::write_json_file(dir / "ok.json", io::to_json(LtiSystem(Matrix::Constant(1, 1, 1), Matrix::Constant(1, 1, 1))));
  CHECK(io::system_from_json(io::read_json_file(dir / "ok.json")).n() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("solution documents") {
  const LtiSystem sys(Matrix::Constant(1, 1, 1), Matrix::Constant(1, 1, 1));
  const RiccatiSolution ric = riccati_recursion(sys, CostWeights::identity(1, 1, 1));
  const Json j = io::to_json(ric);
  CHECK(j["N"] == 1);
  CHECK(j["P0"][0][0].get<double>() == 1.5);
  CHECK(j["gains"][0][0][0].get<double>() == doctest::Approx(-0.5).epsilon(1e-15));

  const LqrSolution sol = solve_mb(sys, CostWeights::identity(1, 1, 1));
  const Json s = io::to_json(sol);
  CHECK(s["mode"] == "mb");
  CHECK(s["status"] == "optimal");
  CHECK(s["gains"].size() == 1);
  CHECK(s["S"].size() == 2);
}
