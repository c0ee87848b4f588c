#pragma once

#include "affineineq/inequalities.hpp"
#include "affineineq/report.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace affineineq {

/// What a check asserts about its deficit d, with T = tolerance * scale:
///   holds     d >= -T   (the inequality)
///   equality  |d| <= T  (an extremal)
///   strict    d > T     (a strictly non-extremal input)
///   violated  d < -T    (inverted; exercises failure paths)
enum class Expect { Holds, Equality, Strict, Violated };

Expect expect_from_string(const std::string& s);
std::string to_string(Expect e);
bool meets(const DeficitReport& r, Expect e);

struct Check {
  std::string id;
  std::string label;
  std::optional<FunctionSpec> function;
  std::optional<BodySpec> body;
  double p = 2.0;  // bodies
  Expect expect = Expect::Holds;
  std::optional<double> tolerance;
  std::optional<bool> refinement;
  Matrix cost_matrix;  // gentil
};

struct SuiteConfig {
  std::string name;
  std::uint64_t seed = 0;
  QuadratureLevels levels;
  Tolerances tolerances;
  bool refinement = true;
  std::string output;
  std::vector<Check> checks;
};

/// Parses and expands a v:1 config. A check with "replicate": k expands to k
/// checks whose seeds derive from the suite seed. Throws ConfigError on
/// schema violations, unknown ids and unseeded randomized inputs.
SuiteConfig parse_suite(const Json& j);
SuiteConfig load_suite(const std::string& path);

/// Seed of replicate i of check c.
std::uint64_t derive_seed(std::uint64_t suite_seed, std::size_t check, std::size_t replicate);

EvalOptions eval_options(const SuiteConfig& config, const Check& check);

struct SuiteSummary {
  int total = 0;
  int passed = 0;
  int failed = 0;
  int errors = 0;
  struct Worst {
    double deficit = 0.0;
    int index = -1;
  };
  std::map<std::string, Worst> worst;  // smallest deficit / tolerance scale per id
};

/// Runs every check in order, writing one JSON line per check.
SuiteSummary run_suite(const SuiteConfig& config, std::ostream& jsonl);

Json summary_json(const SuiteConfig& config, const SuiteSummary& summary);

/// 0 all pass, 1 failures, 3 runtime errors.
int exit_code(const SuiteSummary& summary);

}  // namespace affineineq
