// affineineq: command-line front end (verify, deficit, sweep, body).

#include "affineineq/bodies.hpp"
#include "affineineq/inequalities.hpp"
#include "affineineq/report.hpp"
#include "affineineq/suite.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace affineineq;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<double> split_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// "a,b;c,d" -> rows
Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(split_numbers(row, ','));
  if (rows.empty() || rows[0].empty()) throw ConfigError("empty matrix");
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return M;
}

Vector parse_vector(const std::string& text) {
  const auto v = split_numbers(text, ',');
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Flags shared by deficit and sweep.
struct InputFlags {
  FunctionSpec f;
  BodySpec body;
  std::string body_kind;
  std::string matrix;
  std::string center;
  std::string cost_matrix;
  std::uint64_t seed = 0;
  bool has_seed = false;
  bool no_normalize = false;
  double p = 2.0;
  int n = 2;
  double radius = 1.0;
  QuadratureLevels levels;
  double tolerance = -1.0;
  bool no_refine = false;
  std::string expect = "holds";

  void add(CLI::App* app) {
    app->add_option("--n", n, "Dimension")->check(CLI::Range(1, 5));
    app->add_option("--p", p, "Exponent");
    app->add_option("--family", f.family, "Function family");
    app->add_option("--A", f.frame, "Frame: identity, diag, random-sl, random-gl, explicit");
    app->add_option("--anisotropy", f.anisotropy, "Axis ratio for the diag frame");
    app->add_option("--matrix", matrix, "Explicit matrix 'a,b;c,d' (function frame or body)");
    app->add_option("--center", center, "Center 'x,y,...'");
    app->add_option("--seed", seed, "Seed for randomized inputs")->each([this](const std::string&) { has_seed = true; });
    app->add_option("--a", f.a, "Amplitude");
    app->add_option("--b", f.b, "Rate / slope");
    app->add_option("--c", f.c, "Cone height");
    app->add_option("--sigma", f.sigma, "Log-Sobolev scale");
    app->add_option("--alpha", f.alpha, "Gagliardo-Nirenberg alpha");
    app->add_option("--beta", f.beta, "L-infinity exponent beta");
    app->add_option("--radius", radius, "Bump radius / body radius");
    app->add_option("--smoothness", f.smoothness, "Bump smoothness");
    app->add_flag("--no-normalize", no_normalize, "Keep the given amplitude");
    app->add_option("--body", body_kind, "Body kind for bp-centroid");
    app->add_option("--count", body.count, "Facets or generators of random polytopes");
    app->add_option("--s", body.s, "Exponent of lq-ball bodies");
    app->add_option("--cost-matrix", cost_matrix, "Gentil cost matrix 'a,b;c,d'");
    app->add_option("--sphere-level", levels.sphere_level, "Direction grid level");
    app->add_option("--space-level", levels.space_angular_level, "Angular level of space rules");
    app->add_option("--radial-nodes", levels.radial_nodes, "Radial nodes of space rules");
    app->add_option("--box-nodes", levels.box_nodes, "Box rule nodes per axis");
    app->add_option("--tolerance", tolerance, "Tolerance override");
    app->add_flag("--no-refine", no_refine, "Skip the refinement delta");
    app->add_option("--expect", expect, "holds, equality, strict or violated");
  }

  Check check(const std::string& id) const {
    Check c;
    c.id = id;
    c.p = p;
    c.expect = expect_from_string(expect);
    if (tolerance >= 0) c.tolerance = tolerance;
    if (!cost_matrix.empty()) c.cost_matrix = parse_matrix(cost_matrix);
    if (id == "bp-centroid") {
      BodySpec b = body;
      b.kind = body_kind.empty() ? "ball" : body_kind;
      b.n = n;
      b.radius = radius;
      if (!matrix.empty()) b.matrix = parse_matrix(matrix);
      if (has_seed) b.seed = seed;
      if (is_randomized(b) && !b.seed) throw ConfigError("randomized body needs --seed");
      c.body = b;
    } else {
      FunctionSpec s = f;
      s.n = n;
      s.p = p;
      s.radius = radius;
      s.normalize = !no_normalize;
      if (!matrix.empty()) {
        s.matrix = parse_matrix(matrix);
        if (s.frame == "identity") s.frame = "explicit";
      }
      if (!center.empty()) s.center = parse_vector(center);
      if (has_seed) s.seed = seed;
      if (is_randomized(s) && !s.seed) throw ConfigError("randomized frame needs --seed");
      c.function = s;
    }
    return c;
  }

  SuiteConfig config() const {
    SuiteConfig cfg;
    cfg.name = "cli";
    cfg.levels = levels;
    cfg.refinement = !no_refine;
    return cfg;
  }
};

bool is_known_id(const std::string& id) {
  const auto& ids = inequality_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

int cmd_verify(const std::string& path, const std::string& out_override) {
  SuiteConfig cfg;
  try {
    cfg = load_suite(path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const std::string out = out_override.empty() ? cfg.output : out_override;
  SuiteSummary summary;
  if (out.empty()) {
    summary = run_suite(cfg, std::cout);
    std::cerr << to_line(summary_json(cfg, summary)) << "\n";
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) {
      std::cerr << "cannot write '" << out << "'\n";
      return kExitRuntime;
    }
    summary = run_suite(cfg, file);
    Json s = summary_json(cfg, summary);
    s["output"] = out;
    std::cout << to_line(s) << "\n";
  }
  return exit_code(summary);
}

int cmd_deficit(const std::string& id, const InputFlags& flags) {
  if (!is_known_id(id)) {
    std::cerr << "unknown inequality '" << id << "'\n";
    return kExitConfig;
  }
  SuiteConfig cfg = flags.config();
  cfg.checks.push_back(flags.check(id));
  const SuiteSummary s = run_suite(cfg, std::cout);
  return exit_code(s);
}

void set_param(Check& c, SuiteConfig& cfg, const std::string& name, double v) {
  FunctionSpec* f = c.function ? &*c.function : nullptr;
  auto need_f = [&] {
    if (!f) throw ConfigError("parameter '" + name + "' applies to functions only");
    return f;
  };
  if (name == "b") need_f()->b = v;
  else if (name == "sigma") need_f()->sigma = v;
  else if (name == "anisotropy") {
    need_f()->anisotropy = v;
    f->frame = "diag";
  } else if (name == "alpha") need_f()->alpha = v;
  else if (name == "beta") need_f()->beta = v;
  else if (name == "radius") {
    if (f) f->radius = v; else c.body->radius = v;
  } else if (name == "p") {
    if (f) f->p = v; else c.p = v;
  } else if (name == "sphere-level") cfg.levels.sphere_level = static_cast<int>(v);
  else if (name == "space-level") cfg.levels.space_angular_level = static_cast<int>(v);
  else if (name == "radial-nodes") cfg.levels.radial_nodes = static_cast<int>(v);
  else if (name == "box-nodes") cfg.levels.box_nodes = static_cast<int>(v);
  else throw ConfigError("unknown sweep parameter '" + name + "'");
}

int cmd_sweep(const std::string& id, const InputFlags& flags, const std::string& param, const std::string& values,
              double from, double to, int steps, const std::string& out) {
  if (!is_known_id(id)) {
    std::cerr << "unknown inequality '" << id << "'\n";
    return kExitConfig;
  }
  std::vector<double> grid;
  try {
    if (!values.empty()) {
      grid = split_numbers(values, ',');
    } else {
      if (steps < 1) throw ConfigError("--steps must be positive");
      for (int i = 0; i < steps; ++i) grid.push_back(steps == 1 ? from : from + (to - from) * i / (steps - 1));
    }
    if (grid.empty()) throw ConfigError("empty sweep");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  struct Row {
    double value;
    std::optional<DeficitReport> report;
    std::string error;
  };
  std::vector<Row> rows;
  for (double v : grid) {
    SuiteConfig cfg = flags.config();
    Check c = flags.check(id);
    set_param(c, cfg, param, v);
    Row row{v, std::nullopt, ""};
    try {
      row.report = evaluate(c.id, c.function, c.body, c.p, eval_options(cfg, c));
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  std::set<std::string> diag;
  for (const auto& r : rows) {
    if (r.report) for (const auto& [k, v] : r.report->diagnostics) diag.insert(k);
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) {
    std::cerr << "cannot write '" << out << "'\n";
    return kExitRuntime;
  }
  file << "param,value,lhs,rhs,deficit,refinement_delta,pass";
  for (const auto& k : diag) file << "," << k;
  file << ",error\n";
  bool all_pass = true;
  bool any_error = false;
  for (const auto& r : rows) {
    file << param << "," << fmt(r.value);
    if (r.report) {
      const DeficitReport& d = *r.report;
      file << "," << fmt(d.lhs) << "," << fmt(d.rhs) << "," << fmt(d.deficit) << "," << fmt(d.refinement_delta) << ","
           << (d.pass ? "true" : "false");
      for (const auto& k : diag) {
        auto it = d.diagnostics.find(k);
        file << "," << (it == d.diagnostics.end() ? std::string() : fmt(it->second));
      }
      file << ",\n";
      all_pass = all_pass && d.pass;
    } else {
      file << ",,,,,false";
      for (std::size_t k = 0; k < diag.size(); ++k) file << ",";
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      file << "," << msg << "\n";
      any_error = true;
    }
  }
  if (any_error) return kExitRuntime;
  return all_pass ? kExitPass : kExitFail;
}

int cmd_body(const std::string& op, const InputFlags& flags, const std::string& dir, bool samples) {
  Check c = flags.check("bp-centroid");
  const BodySpec& spec = *c.body;
  const int level = flags.levels.resolved(spec.n).sphere_level;
  const ConvexBody K = make_body(spec, shared_sphere_rule(spec.n, level));
  Json out;
  out["v"] = kSchemaVersion;
  out["op"] = op;
  out["body"] = to_json(spec);
  out["sphere_level"] = level;
  auto dump = [&](const ConvexBody& B, Json& j) {
    j["radial"] = B.radial_samples();
    j["support"] = B.support_samples();
  };
  if (op == "volume") {
    out["volume"] = volume(K);
    out["volume_quadrature"] = volume_by_quadrature(K);
    if (auto v = K.closed_form_volume()) out["volume_closed_form"] = *v;
  } else if (op == "support" || op == "radial") {
    if (dir.empty()) throw ConfigError("--dir is required");
    const Vector u = parse_vector(dir);
    if (u.size() != spec.n) throw ConfigError("--dir must have n entries");
    out["direction"] = split_numbers(dir, ',');
    out[op] = op == "support" ? K.support(u) : K.radial(u);
  } else if (op == "polar") {
    const ConvexBody P = polar(K);
    out["volume"] = volume(K);
    out["polar_kind"] = P.kind();
    out["polar_volume"] = volume(P);
    out["volume_product"] = volume(K) * volume(P);
    if (samples) dump(P, out);
  } else if (op == "centroid") {
    const ConvexBody G = centroid_body(K, flags.p);
    out["p"] = flags.p;
    out["volume"] = volume(K);
    out["centroid_volume"] = volume_by_quadrature(G);
    out["volume_ratio"] = volume_by_quadrature(G) / volume(K);
    if (samples) dump(G, out);
  } else if (op == "fit") {
    const EllipsoidFit fit = fit_ellipsoid(K);
    Json T = Json::array();
    for (Eigen::Index i = 0; i < fit.T.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < fit.T.cols(); ++j) row.push_back(fit.T(i, j));
      T.push_back(row);
    }
    out["T"] = T;
    out["residual"] = fit.residual;
  } else {
    throw ConfigError("unknown body op '" + op + "' (volume, support, radial, polar, centroid, fit)");
  }
  if (samples && (op == "volume" || op == "fit")) dump(K, out);
  std::cout << to_line(out) << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine Sobolev-type inequalities: verification suites, deficits, sweeps and body computations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "Run a JSON suite and write JSONL reports");
  verify->add_option("config", config_path, "Suite config (JSON)")->required();
  verify->add_option("--out", verify_out, "JSONL output (overrides the config)");

  std::string deficit_id;
  InputFlags deficit_flags;
  auto* deficit = app.add_subcommand("deficit", "Evaluate one inequality and print its report");
  deficit->add_option("id", deficit_id, "Inequality id")->required();
  deficit_flags.add(deficit);

  std::string sweep_id;
  InputFlags sweep_flags;
  std::string param;
  std::string values;
  std::string sweep_out;
  double from = 0.0;
  double to = 1.0;
  int steps = 5;
  auto* sweep = app.add_subcommand("sweep", "Vary one parameter and write CSV rows");
  sweep->add_option("id", sweep_id, "Inequality id")->required();
  sweep_flags.add(sweep);
  sweep->add_option("--param", param, "b, sigma, anisotropy, alpha, beta, radius, p, sphere-level, space-level, "
                                      "radial-nodes, box-nodes")->required();
  sweep->add_option("--values", values, "Comma-separated values");
  sweep->add_option("--from", from, "Range start");
  sweep->add_option("--to", to, "Range end");
  sweep->add_option("--steps", steps, "Range points");
  sweep->add_option("--out", sweep_out, "CSV output")->required();

  std::string body_op;
  InputFlags body_flags;
  std::string dir;
  bool samples = false;
  auto* body = app.add_subcommand("body", "Body computations: volume, support, radial, polar, centroid, fit");
  body->add_option("op", body_op, "Operation")->required();
  body_flags.add(body);
  body->add_option("--dir", dir, "Direction 'x,y,...' for support/radial");
  body->add_flag("--samples", samples, "Include grid samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*verify) return cmd_verify(config_path, verify_out);
    if (*deficit) return cmd_deficit(deficit_id, deficit_flags);
    if (*sweep) return cmd_sweep(sweep_id, sweep_flags, param, values, from, to, steps, sweep_out);
    if (*body) {
      body_flags.body_kind = body_flags.body_kind.empty() ? "ball" : body_flags.body_kind;
      return cmd_body(body_op, body_flags, dir, samples);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitPass;
}
