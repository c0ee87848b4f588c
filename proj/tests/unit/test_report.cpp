#include <doctest.h>

#include "affineineq/report.hpp"

#include <cmath>
#include <limits>

using namespace affineineq;

TEST_CASE("function specs round-trip through JSON") {
  FunctionSpec s;
  s.family = "gn-extremal";
  s.n = 3;
  s.p = 2.0;
  s.alpha = 1.4;
  s.frame = "explicit";
  s.matrix = Matrix::Identity(3, 3);
  s.matrix(0, 2) = 0.5;
  s.center = Vector{{0.1, -0.2, 0.3}};
  s.seed = 99;
  s.normalize = false;
  const FunctionSpec t = function_spec_from_json(to_json(s));
  CHECK(t.family == s.family);
  CHECK(t.n == 3);
  CHECK(t.alpha == 1.4);
  CHECK(t.matrix == s.matrix);
  CHECK(t.center == s.center);
  CHECK(t.seed == s.seed);
  CHECK_FALSE(t.normalize);
  CHECK(to_json(t) == to_json(s));

  FunctionSpec g;
  g.family = "grid";
  g.shape = {2, 2};
  g.origin = Vector{{0.0, 0.0}};
  g.spacing = Vector{{1.0, 1.0}};
  g.values = {0, 1, 2, 3};
  CHECK(function_spec_from_json(to_json(g)).values == g.values);
}

TEST_CASE("body specs round-trip through JSON") {
  BodySpec b;
  b.kind = "hull";
  b.n = 3;
  b.count = 12;
  b.seed = 5;
  const BodySpec c = body_spec_from_json(to_json(b));
  CHECK(c.kind == "hull");
  CHECK(c.count == 12);
  CHECK(c.seed == std::optional<std::uint64_t>(5));
  CHECK(to_json(c) == to_json(b));
}

TEST_CASE("parsers reject unknown keys and wrong types") {
  CHECK_THROWS_AS(function_spec_from_json(Json{{"famly", "gaussian"}}), ConfigError);
  CHECK_THROWS_AS(function_spec_from_json(Json{{"n", "two"}}), ConfigError);
  CHECK_THROWS_AS(function_spec_from_json(Json{{"n", 2.5}}), ConfigError);
  CHECK_THROWS_AS(function_spec_from_json(Json{{"seed", -1}}), ConfigError);
  CHECK_THROWS_AS(function_spec_from_json(Json::array()), ConfigError);
  CHECK_THROWS_AS(body_spec_from_json(Json{{"kind", "ball"}, {"radius", "1"}}), ConfigError);
  CHECK_THROWS_AS(levels_from_json(Json{{"sphere_level", -4}}), ConfigError);
  CHECK_THROWS_AS(tolerances_from_json(Json{{"ratio", -1.0}}), ConfigError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 2], [3]]"), "m"), ConfigError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, \"x\"]]"), "m"), ConfigError);
  CHECK_THROWS_AS(vector_from_json(Json::parse("[1, null]"), "v"), ConfigError);
}

TEST_CASE("missing keys take defaults") {
  const FunctionSpec s = function_spec_from_json(Json::object());
  CHECK(s.family == "gaussian");
  CHECK(s.n == 2);
  CHECK(s.normalize);
  CHECK_FALSE(s.seed.has_value());
  const Tolerances t = tolerances_from_json(Json{{"ratio", 5e-3}});
  CHECK(t.ratio == 5e-3);
  CHECK(t.entropy == Tolerances{}.entropy);
}

TEST_CASE("reports serialize non-finite values as null") {
  DeficitReport r;
  r.id = "main";
  r.n = 2;
  r.p = 3.0;
  r.lhs = 1.0;
  r.rhs = std::numeric_limits<double>::infinity();
  r.deficit = std::nan("");
  r.diagnostics["x"] = -std::numeric_limits<double>::infinity();
  const Json j = to_json(r);
  CHECK(j.at("v") == 1);
  CHECK(j.at("rhs").is_null());
  CHECK(j.at("deficit").is_null());
  CHECK(j.at("refinement_delta").is_null());
  CHECK(j.at("diagnostics").at("x").is_null());
  const std::string line = to_line(j);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.find("NaN") == std::string::npos);
  CHECK(Json::parse(line) == j);
}

TEST_CASE("randomized inputs are detected") {
  FunctionSpec f;
  CHECK_FALSE(is_randomized(f));
  f.frame = "random-sl";
  CHECK(is_randomized(f));
  BodySpec b;
  CHECK_FALSE(is_randomized(b));
  b.kind = "ellipsoid";
  CHECK(is_randomized(b));
  b.matrix = Matrix::Identity(2, 2);
  CHECK_FALSE(is_randomized(b));
  b.kind = "halfspace";
  CHECK(is_randomized(b));
}
