#include "affineineq/suite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace affineineq {

Expect expect_from_string(const std::string& s) {
  if (s == "holds") return Expect::Holds;
  if (s == "equality") return Expect::Equality;
  if (s == "strict") return Expect::Strict;
  if (s == "violated") return Expect::Violated;
  throw ConfigError("unknown expectation '" + s + "' (holds, equality, strict, violated)");
}

std::string to_string(Expect e) {
  switch (e) {
    case Expect::Holds: return "holds";
    case Expect::Equality: return "equality";
    case Expect::Strict: return "strict";
    case Expect::Violated: return "violated";
  }
  return "holds";
}

bool meets(const DeficitReport& r, Expect e) {
  const double T = r.tolerance * r.tolerance_scale;
  if (!std::isfinite(r.deficit)) return false;
  switch (e) {
    case Expect::Holds: return r.deficit >= -T;
    case Expect::Equality: return std::abs(r.deficit) <= T;
    case Expect::Strict: return r.deficit > T;
    case Expect::Violated: return r.deficit < -T;
  }
  return false;
}

std::uint64_t derive_seed(std::uint64_t suite_seed, std::size_t check, std::size_t replicate) {
  // splitmix64 over the three inputs
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(suite_seed) ^ check) ^ replicate) >> 11;
}

namespace {

Check parse_check(const Json& j, std::size_t index) {
  const std::string where = "checks[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  static const std::set<std::string> allowed = {"id",        "label",      "function", "body",
                                                "p",         "expect",     "tolerance", "refinement",
                                                "replicate", "cost_matrix"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
  Check c;
  if (!j.contains("id") || !j.at("id").is_string()) throw ConfigError(where + ": 'id' is required");
  c.id = j.at("id").get<std::string>();
  const auto& ids = inequality_ids();
  if (std::find(ids.begin(), ids.end(), c.id) == ids.end()) throw ConfigError(where + ": unknown inequality '" + c.id + "'");
  if (j.contains("label")) {
    if (!j.at("label").is_string()) throw ConfigError(where + ": 'label' must be a string");
    c.label = j.at("label").get<std::string>();
  }
  if (j.contains("function")) c.function = function_spec_from_json(j.at("function"));
  if (j.contains("body")) c.body = body_spec_from_json(j.at("body"));
  if (c.id == "bp-centroid" && !c.body) throw ConfigError(where + ": bp-centroid needs a 'body'");
  if (c.id != "bp-centroid" && !c.function) throw ConfigError(where + ": " + c.id + " needs a 'function'");
  if (j.contains("p")) {
    if (!j.at("p").is_number()) throw ConfigError(where + ": 'p' must be a number");
    c.p = j.at("p").get<double>();
  }
  if (j.contains("expect")) {
    if (!j.at("expect").is_string()) throw ConfigError(where + ": 'expect' must be a string");
    c.expect = expect_from_string(j.at("expect").get<std::string>());
  }
  if (j.contains("tolerance")) {
    if (!j.at("tolerance").is_number() || j.at("tolerance").get<double>() < 0) {
      throw ConfigError(where + ": 'tolerance' must be a non-negative number");
    }
    c.tolerance = j.at("tolerance").get<double>();
  }
  if (j.contains("refinement")) {
    if (!j.at("refinement").is_boolean()) throw ConfigError(where + ": 'refinement' must be a boolean");
    c.refinement = j.at("refinement").get<bool>();
  }
  if (j.contains("cost_matrix")) c.cost_matrix = matrix_from_json(j.at("cost_matrix"), "cost_matrix");
  return c;
}

}  // namespace

SuiteConfig parse_suite(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> allowed = {"v",          "suite",  "seed",   "levels",
                                                "tolerances", "refinement", "output", "checks"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  if (!j.contains("v") || !j.at("v").is_number_integer() || j.at("v").get<int>() != kSchemaVersion) {
    throw ConfigError("config: schema version 'v' must be 1");
  }
  SuiteConfig c;
  if (j.contains("suite")) {
    if (!j.at("suite").is_string()) throw ConfigError("config: 'suite' must be a string");
    c.name = j.at("suite").get<std::string>();
  }
  if (!j.contains("seed")) throw ConfigError("config: 'seed' is required");
  const Json& seed = j.at("seed");
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<long long>() < 0)) {
    throw ConfigError("config: 'seed' must be a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  if (j.contains("levels")) c.levels = levels_from_json(j.at("levels"));
  if (j.contains("tolerances")) c.tolerances = tolerances_from_json(j.at("tolerances"));
  if (j.contains("refinement")) {
    if (!j.at("refinement").is_boolean()) throw ConfigError("config: 'refinement' must be a boolean");
    c.refinement = j.at("refinement").get<bool>();
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("config: 'output' must be a string");
    c.output = j.at("output").get<std::string>();
  }
  if (!j.contains("checks")) return c;
  const Json& checks = j.at("checks");
  if (!checks.is_array()) throw ConfigError("config: 'checks' must be an array");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const Json& cj = checks[i];
    Check base = parse_check(cj, i);
    int replicate = 0;
    if (cj.contains("replicate")) {
      if (!cj.at("replicate").is_number_integer() || cj.at("replicate").get<int>() < 1) {
        throw ConfigError("checks[" + std::to_string(i) + "]: 'replicate' must be a positive integer");
      }
      replicate = cj.at("replicate").get<int>();
    }
    if (replicate == 0) {
      const bool unseeded = (base.function && is_randomized(*base.function) && !base.function->seed) ||
                            (base.body && is_randomized(*base.body) && !base.body->seed);
      if (unseeded) throw ConfigError("checks[" + std::to_string(i) + "]: randomized input without a seed");
      c.checks.push_back(base);
      continue;
    }
    for (int r = 0; r < replicate; ++r) {
      Check copy = base;
      const std::uint64_t s = derive_seed(c.seed, i, static_cast<std::size_t>(r));
      if (copy.function) copy.function->seed = s;
      if (copy.body) copy.body->seed = s;
      if (!copy.label.empty()) copy.label += "#" + std::to_string(r);
      c.checks.push_back(copy);
    }
  }
  return c;
}

SuiteConfig load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_suite(j);
}

EvalOptions eval_options(const SuiteConfig& config, const Check& check) {
  EvalOptions o;
  o.functional.levels = config.levels;
  o.tolerances = config.tolerances;
  o.tolerance = check.tolerance;
  o.refinement = check.refinement.value_or(config.refinement);
  o.cost_matrix = check.cost_matrix;
  return o;
}

SuiteSummary run_suite(const SuiteConfig& config, std::ostream& jsonl) {
  SuiteSummary s;
  for (std::size_t i = 0; i < config.checks.size(); ++i) {
    const Check& c = config.checks[i];
    Json line;
    line["v"] = kSchemaVersion;
    line["suite"] = config.name;
    line["index"] = i;
    line["label"] = c.label;
    line["expect"] = to_string(c.expect);
    ++s.total;
    try {
      const DeficitReport r = evaluate(c.id, c.function, c.body, c.p, eval_options(config, c));
      const bool ok = meets(r, c.expect);
      Json body = to_json(r);
      body["holds"] = r.pass;
      body["pass"] = ok;
      for (auto& [k, v] : body.items()) {
        if (k != "v") line[k] = v;
      }
      ok ? ++s.passed : ++s.failed;
      const double scaled = r.tolerance_scale > 0 ? r.deficit / r.tolerance_scale : r.deficit;
      auto it = s.worst.find(r.id);
      if (it == s.worst.end() || scaled < it->second.deficit) s.worst[r.id] = {scaled, static_cast<int>(i)};
    } catch (const std::exception& e) {
      line["id"] = c.id;
      line["pass"] = false;
      line["error"] = e.what();
      ++s.errors;
    }
    jsonl << to_line(line) << '\n';
  }
  jsonl.flush();
  return s;
}

Json summary_json(const SuiteConfig& config, const SuiteSummary& s) {
  Json j;
  j["v"] = kSchemaVersion;
  j["suite"] = config.name;
  j["total"] = s.total;
  j["passed"] = s.passed;
  j["failed"] = s.failed;
  j["errors"] = s.errors;
  Json worst = Json::object();
  for (const auto& [id, w] : s.worst) worst[id] = Json{{"scaled_deficit", w.deficit}, {"index", w.index}};
  j["worst"] = worst;
  return j;
}

int exit_code(const SuiteSummary& s) {
  if (s.errors > 0) return 3;
  if (s.failed > 0) return 1;
  return 0;
}

}  // namespace affineineq
