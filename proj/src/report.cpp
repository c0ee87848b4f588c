#include "affineineq/report.hpp"

#include <cmath>
#include <set>

namespace affineineq {

namespace {

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json matrix_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
  }
}

double get_number(const Json& j, const char* key, double fallback, const char* what) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string(what) + ": '" + key + "' must be a number");
  return v.get<double>();
}

int get_int(const Json& j, const char* key, int fallback, const char* what) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string(what) + ": '" + key + "' must be an integer");
  return v.get<int>();
}

std::string get_string(const Json& j, const char* key, const std::string& fallback, const char* what) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(std::string(what) + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const Json& j, const char* key, bool fallback, const char* what) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string(what) + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::optional<std::uint64_t> get_seed(const Json& j, const char* what) {
  if (!j.contains("seed")) return std::nullopt;
  const Json& v = j.at("seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError(std::string(what) + ": 'seed' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

const char* tolerance_kind_name(ToleranceKind k) {
  switch (k) {
    case ToleranceKind::Absolute: return "absolute";
    case ToleranceKind::Relative: return "relative";
    case ToleranceKind::Volume: return "volume";
  }
  return "absolute";
}

}  // namespace

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ConfigError(std::string(what) + ": matrix rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(std::string(what) + ": ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ConfigError(std::string(what) + ": matrix entries must be numbers");
      M(i, c) = v.get<double>();
    }
  }
  return M;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + ": entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json to_json(const FunctionSpec& s) {
  Json j;
  j["family"] = s.family;
  j["n"] = s.n;
  j["p"] = s.p;
  j["a"] = s.a;
  j["b"] = s.b;
  j["c"] = s.c;
  j["sigma"] = s.sigma;
  j["alpha"] = s.alpha;
  j["q"] = s.q;
  j["radius"] = s.radius;
  j["smoothness"] = s.smoothness;
  j["beta"] = s.beta;
  j["frame"] = s.frame;
  j["anisotropy"] = s.anisotropy;
  if (s.matrix.size() > 0) j["matrix"] = matrix_json(s.matrix);
  if (s.center.size() > 0) j["center"] = vector_json(s.center);
  if (s.seed) j["seed"] = *s.seed;
  j["normalize"] = s.normalize;
  if (s.family == "grid") {
    j["shape"] = s.shape;
    j["origin"] = vector_json(s.origin);
    j["spacing"] = vector_json(s.spacing);
    j["values"] = s.values;
  }
  return j;
}

FunctionSpec function_spec_from_json(const Json& j) {
  const char* what = "function";
  check_keys(j,
             {"family", "n", "p", "a", "b", "c", "sigma", "alpha", "q", "radius", "smoothness", "beta", "frame",
              "anisotropy", "matrix", "center", "seed", "normalize", "shape", "origin", "spacing", "values"},
             what);
  FunctionSpec s;
  s.family = get_string(j, "family", s.family, what);
  s.n = get_int(j, "n", s.n, what);
  s.p = get_number(j, "p", s.p, what);
  s.a = get_number(j, "a", s.a, what);
  s.b = get_number(j, "b", s.b, what);
  s.c = get_number(j, "c", s.c, what);
  s.sigma = get_number(j, "sigma", s.sigma, what);
  s.alpha = get_number(j, "alpha", s.alpha, what);
  s.q = get_number(j, "q", s.q, what);
  s.radius = get_number(j, "radius", s.radius, what);
  s.smoothness = get_int(j, "smoothness", s.smoothness, what);
  s.beta = get_number(j, "beta", s.beta, what);
  s.frame = get_string(j, "frame", s.frame, what);
  s.anisotropy = get_number(j, "anisotropy", s.anisotropy, what);
  if (j.contains("matrix")) s.matrix = matrix_from_json(j.at("matrix"), what);
  if (j.contains("center")) s.center = vector_from_json(j.at("center"), what);
  s.seed = get_seed(j, what);
  s.normalize = get_bool(j, "normalize", s.normalize, what);
  if (j.contains("shape")) {
    if (!j.at("shape").is_array()) throw ConfigError("function: 'shape' must be an array");
    for (const auto& v : j.at("shape")) {
      if (!v.is_number_integer()) throw ConfigError("function: 'shape' entries must be integers");
      s.shape.push_back(v.get<int>());
    }
  }
  if (j.contains("origin")) s.origin = vector_from_json(j.at("origin"), what);
  if (j.contains("spacing")) s.spacing = vector_from_json(j.at("spacing"), what);
  if (j.contains("values")) {
    const Vector v = vector_from_json(j.at("values"), what);
    s.values.assign(v.data(), v.data() + v.size());
  }
  return s;
}

Json to_json(const BodySpec& s) {
  Json j;
  j["kind"] = s.kind;
  j["n"] = s.n;
  if (s.kind == "ball" || s.kind == "cube" || s.kind == "cross-polytope") j["radius"] = s.radius;
  if (s.kind == "lq-ball") j["s"] = s.s;
  if (s.kind == "halfspace" || s.kind == "hull") j["count"] = s.count;
  if (s.matrix.size() > 0) j["matrix"] = matrix_json(s.matrix);
  if (s.seed) j["seed"] = *s.seed;
  return j;
}

BodySpec body_spec_from_json(const Json& j) {
  const char* what = "body";
  check_keys(j, {"kind", "n", "radius", "s", "count", "matrix", "seed"}, what);
  BodySpec s;
  s.kind = get_string(j, "kind", s.kind, what);
  s.n = get_int(j, "n", s.n, what);
  s.radius = get_number(j, "radius", s.radius, what);
  s.s = get_number(j, "s", s.s, what);
  s.count = get_int(j, "count", s.count, what);
  if (j.contains("matrix")) s.matrix = matrix_from_json(j.at("matrix"), what);
  s.seed = get_seed(j, what);
  return s;
}

Json to_json(const QuadratureLevels& l) {
  return Json{{"sphere_level", l.sphere_level},
              {"space_angular_level", l.space_angular_level},
              {"radial_nodes", l.radial_nodes},
              {"box_nodes", l.box_nodes}};
}

QuadratureLevels levels_from_json(const Json& j) {
  const char* what = "levels";
  check_keys(j, {"sphere_level", "space_angular_level", "radial_nodes", "box_nodes"}, what);
  QuadratureLevels l;
  l.sphere_level = get_int(j, "sphere_level", 0, what);
  l.space_angular_level = get_int(j, "space_angular_level", 0, what);
  l.radial_nodes = get_int(j, "radial_nodes", 0, what);
  l.box_nodes = get_int(j, "box_nodes", 0, what);
  if (l.sphere_level < 0 || l.space_angular_level < 0 || l.radial_nodes < 0 || l.box_nodes < 0) {
    throw ConfigError("levels: values must be non-negative");
  }
  return l;
}

Json to_json(const Tolerances& t) { return Json{{"entropy", t.entropy}, {"ratio", t.ratio}, {"bodies", t.bodies}}; }

Tolerances tolerances_from_json(const Json& j) {
  const char* what = "tolerances";
  check_keys(j, {"entropy", "ratio", "bodies"}, what);
  Tolerances t;
  t.entropy = get_number(j, "entropy", t.entropy, what);
  t.ratio = get_number(j, "ratio", t.ratio, what);
  t.bodies = get_number(j, "bodies", t.bodies, what);
  if (t.entropy < 0 || t.ratio < 0 || t.bodies < 0) throw ConfigError("tolerances: values must be non-negative");
  return t;
}

Json to_json(const DeficitReport& r) {
  Json j;
  j["v"] = kSchemaVersion;
  j["id"] = r.id;
  j["n"] = r.n;
  j["p"] = number(r.p);
  if (r.alpha) j["alpha"] = *r.alpha;
  if (r.beta) j["beta"] = *r.beta;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["deficit"] = number(r.deficit);
  if (r.ratio) j["ratio"] = number(*r.ratio);
  j["tolerance"] = r.tolerance;
  j["tolerance_kind"] = tolerance_kind_name(r.tolerance_kind);
  j["tolerance_scale"] = number(r.tolerance_scale);
  j["pass"] = r.pass;
  Json input;
  if (r.function) input["function"] = to_json(*r.function);
  if (r.body) input["body"] = to_json(*r.body);
  j["input"] = input;
  j["levels"] = to_json(r.levels);
  j["refinement_delta"] = number(r.refinement_delta);
  Json diag = Json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = number(v);
  j["diagnostics"] = diag;
  return j;
}

bool is_randomized(const FunctionSpec& spec) { return spec.frame == "random-sl" || spec.frame == "random-gl"; }

bool is_randomized(const BodySpec& spec) {
  return spec.kind == "halfspace" || spec.kind == "hull" || (spec.kind == "ellipsoid" && spec.matrix.size() == 0);
}

std::string to_line(const Json& j) { return j.dump(); }

}  // namespace affineineq
