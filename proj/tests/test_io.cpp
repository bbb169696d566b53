#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "chainscope/io.hpp"

using namespace chainscope;
using io::json;

namespace {

const std::string kData = CHAINSCOPE_DATA_DIR;

MetricSpace csv(const std::string& text) {
  std::istringstream in(text);
  return io::read_matrix_csv(in);
}

MetricSpace jsonl(const std::string& text) {
  std::istringstream in(text);
  return io::read_points_jsonl(in);
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::postcondition;
}

}  // namespace

TEST_CASE("matrix csv", "[io]") {
  const MetricSpace X = csv("0,2\n2,0\n\n");
  CHECK(X.size() == 2);
  CHECK(X.distance(0, 1) == 2.0);
  CHECK(code_of([] { csv(""); }) == Errc::malformed_input);
  CHECK(code_of([] { csv("0,x\nx,0\n"); }) == Errc::malformed_input);
  CHECK(code_of([] { csv("0,1 2\n1,0\n"); }) == Errc::malformed_input);
  CHECK(code_of([] { csv("0,1,2\n1,0\n"); }) == Errc::malformed_input);
}

TEST_CASE("matrix files and metric violations", "[io]") {
  const MetricSpace square = io::read_matrix_csv(kData + "/square.csv");
  CHECK(square.size() == 4);
  CHECK(square.diameter() == std::sqrt(2.0));
  try {
    io::read_matrix_csv(kData + "/bad_triangle.csv");
    FAIL("bad triangle accepted");
  } catch (const MetricViolation& e) {
    CHECK(e.axiom() == "triangle");
    CHECK(e.witness() == std::array<std::size_t, 3>{0, 2, 1});
  }
  CHECK(code_of([] { io::read_matrix_csv(kData + "/absent.csv"); }) == Errc::malformed_input);
}

TEST_CASE("points jsonl", "[io]") {
  const MetricSpace plane = io::read_points_jsonl(kData + "/plane.jsonl");
  CHECK(plane.size() == 5);
  CHECK(plane.distance(0, 3) == std::sqrt(2.0));
  CHECK(plane.provider() == ProviderKind::euclidean);

  // Ids in any order.
  const MetricSpace shuffled = jsonl(
      "{\"provider\": \"euclidean\"}\n"
      "{\"id\": 1, \"coords\": {\"0\": 5}}\n"
      "{\"id\": 0, \"coords\": {\"0\": 2}}\n");
  CHECK(shuffled.distance(0, 1) == 3.0);

  const MetricSpace sup = jsonl(
      "{\"provider\": \"sup-norm-sparse\"}\n"
      "{\"id\": 0, \"coords\": {\"7\": 1}}\n"
      "{\"id\": 1, \"coords\": {\"9\": 0.5}}\n");
  CHECK(sup.distance(0, 1) == 1.0);

  const MetricSpace l1 = jsonl(
      "{\"provider\": \"p-norm-sparse\", \"param\": 1}\n"
      "{\"id\": 0, \"coords\": {\"1\": 1}}\n"
      "{\"id\": 1, \"coords\": {\"2\": 0.5}}\n");
  CHECK(l1.distance(0, 1) == 1.5);

  const MetricSpace capped = jsonl(
      "{\"provider\": \"bounded-usual\", \"param\": 2}\n"
      "{\"id\": 0, \"coords\": {\"0\": 0}}\n"
      "{\"id\": 1, \"coords\": {\"0\": 10}}\n");
  CHECK(capped.distance(0, 1) == 2.0);

  const MetricSpace fns = jsonl(
      "{\"provider\": \"function-sup\", \"param\": 3}\n"
      "{\"id\": 0, \"coords\": {\"0\": 0, \"1\": 1, \"2\": 0}}\n"
      "{\"id\": 1, \"coords\": {\"0\": 0, \"1\": 0, \"2\": 0.25}}\n");
  CHECK(fns.distance(0, 1) == 1.0);
}

TEST_CASE("malformed points files", "[io]") {
  const std::string header = "{\"provider\": \"euclidean\"}\n";
  CHECK(code_of([] { jsonl(""); }) == Errc::malformed_input);
  CHECK(code_of([&] { jsonl(header); }) == Errc::malformed_input);
  CHECK(code_of([] { jsonl("{\"id\": 0, \"coords\": {}}\n"); }) == Errc::malformed_input);
  CHECK(code_of([&] { jsonl(header + "{\"id\": 0}\n"); }) == Errc::malformed_input);
  CHECK(code_of([&] { jsonl(header + "not json\n"); }) == Errc::malformed_input);
  CHECK(code_of([&] { jsonl(header + "{\"id\": 0, \"coords\": {\"0\": 1}}\n{\"id\": 0, \"coords\": {\"0\": 2}}\n"); }) ==
        Errc::malformed_input);
  CHECK(code_of([&] { jsonl(header + "{\"id\": 1, \"coords\": {\"0\": 1}}\n"); }) == Errc::malformed_input);
  CHECK(code_of([&] { jsonl(header + "{\"id\": 0, \"coords\": {\"0\": \"a\"}}\n"); }) == Errc::malformed_input);
  CHECK(code_of([] { jsonl("{\"provider\": \"hyperbolic\"}\n{\"id\": 0, \"coords\": {}}\n"); }) ==
        Errc::malformed_input);
  CHECK(code_of([] { jsonl("{\"provider\": \"euclidean\", \"param\": 1.5}\n{\"id\": 0, \"coords\": {}}\n"); }) ==
        Errc::malformed_input);
}

TEST_CASE("prefixes, schedules and functions", "[io]") {
  CHECK(io::prefix_from_json(json::parse("[3, 1, 4]")) == std::vector<std::size_t>{3, 1, 4});
  CHECK(code_of([] { io::prefix_from_json(json::parse("[1, -2]")); }) == Errc::malformed_input);
  CHECK(code_of([] { io::prefix_from_json(json::parse("{}")); }) == Errc::malformed_input);

  const ToleranceSchedule s = io::schedule_from_json(io::read_json_file(kData + "/unit_schedule.json"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].eps == 0.5);
  CHECK(s[0].start == 1);
  const json round = io::schedule_to_json(io::schedule_from_json(json::parse("[[1, 0], [0.5, 3]]")));
  CHECK(round == json::parse("[[1.0, 0], [0.5, 3]]"));
  CHECK(code_of([] { io::schedule_from_json(json::parse("[[1]]")); }) == Errc::malformed_input);
  CHECK(code_of([] { io::schedule_from_json(json::parse("[[1, -1]]")); }) == Errc::malformed_input);

  CHECK(io::function_from_json(json::parse("{\"values\": [1, 2.5]}")) == std::vector<double>{1, 2.5});
  CHECK(code_of([] { io::function_from_json(json::parse("[1]")); }) == Errc::malformed_input);
  CHECK(code_of([] { io::function_from_json(json::parse("{\"values\": [true]}")); }) == Errc::malformed_input);
  CHECK(io::prefix_from_json(io::read_json_file(kData + "/naturals_prefix.json")).size() == 100);
}

TEST_CASE("report encoding", "[io]") {
  CHECK(io::number(1.5) == json(1.5));
  CHECK(io::number(kInfinity) == json("inf"));
  CHECK(io::number(-kInfinity) == json("-inf"));
  CHECK(io::number(std::nan("")) == json("nan"));

  const MetricSpace N = io::read_points_jsonl(kData + "/naturals.jsonl");
  const SequencePrefix p(N, io::prefix_from_json(io::read_json_file(kData + "/naturals_prefix.json")));
  const json v = io::verdict_to_json(quasi_cauchy_test(p, ToleranceSchedule({{0.5, 1}})));
  CHECK(v["status"] == "falsified");
  CHECK(v["witness"]["index"] == 1);
  CHECK(v["witness"]["gap"] == 1.0);
  CHECK(io::verdict_to_json(Verdict{}) == json{{"status", "consistent"}});

  const MetricSpace X = line_space({0.0, 0.4, 0.8, 1.2});
  const json d = io::decomposition_to_json(approximate(ScalarFunction(X, {0.0, 0.4, 0.8, 1.2}), 0.5));
  CHECK(d["eps"] == 0.5);
  CHECK(d["levels"]["3"] == json::array({3}));
  CHECK(d["g"].size() == 4);
  CHECK(d["h"].size() == 4);
  CHECK(d["sup_error"].get<double>() < 0.5);
}
