#include <doctest.h>

#include "affineineq/suite.hpp"

#include <set>
#include <sstream>

using namespace affineineq;

namespace {

Json config(Json checks) {
  return Json{{"v", 1}, {"suite", "t"}, {"seed", 7}, {"refinement", false}, {"checks", std::move(checks)}};
}

Json ball_check(const std::string& expect) {
  return Json{{"id", "bp-centroid"}, {"body", {{"kind", "ball"}}}, {"p", 2.0}, {"expect", expect}};
}

Json with(Json j, const Json& extra) {
  j.update(extra);
  return j;
}

DeficitReport report(double deficit, double tol) {
  DeficitReport r;
  r.deficit = deficit;
  r.tolerance = tol;
  r.tolerance_scale = 2.0;
  return r;
}

}  // namespace

TEST_CASE("expectations") {
  // T = 0.2
  CHECK(meets(report(-0.1, 0.1), Expect::Holds));
  CHECK_FALSE(meets(report(-0.3, 0.1), Expect::Holds));
  CHECK(meets(report(0.15, 0.1), Expect::Equality));
  CHECK_FALSE(meets(report(0.25, 0.1), Expect::Equality));
  CHECK(meets(report(0.25, 0.1), Expect::Strict));
  CHECK_FALSE(meets(report(0.15, 0.1), Expect::Strict));
  CHECK(meets(report(-0.25, 0.1), Expect::Violated));
  CHECK_FALSE(meets(report(-0.15, 0.1), Expect::Violated));
  CHECK_FALSE(meets(report(std::nan(""), 0.1), Expect::Holds));
  for (auto e : {Expect::Holds, Expect::Equality, Expect::Strict, Expect::Violated}) {
    CHECK(expect_from_string(to_string(e)) == e);
  }
  CHECK_THROWS_AS(expect_from_string("maybe"), ConfigError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_suite(Json::array()), ConfigError);
  CHECK_THROWS_AS(parse_suite(Json{{"v", 2}, {"seed", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_suite(Json{{"v", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_suite(Json{{"v", 1}, {"seed", -3}}), ConfigError);
  CHECK_THROWS_AS(parse_suite(Json{{"v", 1}, {"seed", 1}, {"extra", true}}), ConfigError);
  CHECK_THROWS_AS(parse_suite(config(Json::array({Json{{"id", "nope"}, {"function", Json::object()}}}))), ConfigError);
  CHECK_THROWS_AS(parse_suite(config(Json::array({Json{{"id", "main"}}}))), ConfigError);
  CHECK_THROWS_AS(parse_suite(config(Json::array({Json{{"id", "bp-centroid"}, {"function", Json::object()}}}))),
                  ConfigError);
  CHECK_THROWS_AS(parse_suite(config(Json::array({with(ball_check("holds"), Json{{"tolerance", -1}})}))), ConfigError);
  CHECK_THROWS_AS(parse_suite(config(Json::array({with(ball_check("holds"), Json{{"colour", 1}})}))), ConfigError);
  CHECK_THROWS_AS(load_suite("/nonexistent/config.json"), ConfigError);
  const auto empty = parse_suite(Json{{"v", 1}, {"seed", 0}});
  CHECK(empty.checks.empty());
}

TEST_CASE("randomized inputs need a seed or a replicate count") {
  Json c = Json{{"id", "bp-centroid"}, {"body", {{"kind", "halfspace"}}}};
  CHECK_THROWS_AS(parse_suite(config(Json::array({c}))), ConfigError);
  c["body"]["seed"] = 3;
  CHECK(parse_suite(config(Json::array({c}))).checks.size() == 1);

  Json r = Json{{"id", "bp-centroid"}, {"label", "poly"}, {"body", {{"kind", "halfspace"}}}, {"replicate", 4}};
  const auto s = parse_suite(config(Json::array({r})));
  REQUIRE(s.checks.size() == 4);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < 4; ++i) {
    seeds.insert(*s.checks[i].body->seed);
    CHECK(*s.checks[i].body->seed == derive_seed(7, 0, i));
    CHECK(s.checks[i].label == "poly#" + std::to_string(i));
  }
  CHECK(seeds.size() == 4);
  CHECK(derive_seed(7, 0, 0) != derive_seed(8, 0, 0));
  CHECK(derive_seed(7, 0, 1) != derive_seed(7, 1, 0));
}

TEST_CASE("options merge suite and check settings") {
  Json j = config(Json::array({with(ball_check("holds"), Json{{"tolerance", 0.25}, {"refinement", true}})}));
  j["tolerances"] = Json{{"bodies", 1e-5}};
  j["levels"] = Json{{"sphere_level", 64}};
  const auto s = parse_suite(j);
  const auto o = eval_options(s, s.checks[0]);
  CHECK(o.tolerance == 0.25);
  CHECK(o.refinement);
  CHECK(o.tolerances.bodies == 1e-5);
  CHECK(o.functional.levels.sphere_level == 64);
}

TEST_CASE("running a suite") {
  const auto s = parse_suite(config(Json::array({
      ball_check("equality"),
      Json{{"id", "bp-centroid"}, {"body", {{"kind", "cube"}}}, {"p", 2.0}, {"expect", "violated"}},
      Json{{"id", "affine-sobolev"}, {"function", {{"n", 2}, {"p", 3.0}}}},
  })));
  std::ostringstream out;
  const auto summary = run_suite(s, out);
  CHECK(summary.total == 3);
  CHECK(summary.passed == 1);
  CHECK(summary.failed == 1);
  CHECK(summary.errors == 1);
  CHECK(exit_code(summary) == 3);

  std::istringstream lines(out.str());
  std::string line;
  std::vector<Json> rows;
  while (std::getline(lines, line)) rows.push_back(Json::parse(line));
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].at("v") == 1);
    CHECK(rows[i].at("index") == i);
  }
  CHECK(rows[0].at("pass") == true);
  CHECK(rows[1].at("holds") == true);
  CHECK(rows[1].at("pass") == false);
  CHECK(rows[2].contains("error"));

  const Json sj = summary_json(s, summary);
  CHECK(sj.at("total") == 3);
  CHECK(sj.at("worst").contains("bp-centroid"));
  CHECK(sj.at("worst").at("bp-centroid").at("index") == 0);
}

TEST_CASE("exit codes") {
  SuiteSummary s;
  CHECK(exit_code(s) == 0);
  s.failed = 1;
  CHECK(exit_code(s) == 1);
  s.errors = 1;
  CHECK(exit_code(s) == 3);
}

TEST_CASE("suite output is deterministic") {
  const auto s = parse_suite(config(Json::array({
      Json{{"id", "bp-centroid"}, {"body", {{"kind", "hull"}, {"count", 6}}}, {"p", 1.0}, {"replicate", 2}},
      Json{{"id", "affine-log-sobolev"}, {"function", {{"family", "logsob-extremal"}, {"frame", "random-sl"}, {"seed", 4}}}},
  })));
  std::ostringstream a, b;
  run_suite(s, a);
  run_suite(s, b);
  CHECK(a.str() == b.str());
  CHECK_FALSE(a.str().empty());
}
