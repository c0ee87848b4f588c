#include "affineineq/bodies.hpp"

#include "affineineq/constants.hpp"
#include "affineineq/parallel.hpp"
#include "affineineq/polytope.hpp"
#include "affineineq/sphere_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace affineineq {

struct ConvexBody::State {
  BodyRepresentation rep;
  std::shared_ptr<const SphericalRule> grid;
  std::vector<double> radial;
  mutable std::once_flag support_once;
  mutable std::vector<double> support;
};

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBlock = 256;

double pow_abs(double t, double p) {
  t = std::abs(t);
  if (p == 1.0) return t;
  if (p == 2.0) return t * t;
  if (p == 3.0) return t * t * t;
  if (p == 4.0) {
    const double s = t * t;
    return s * s;
  }
  return std::pow(t, p);
}

double lq_norm(const Vector& x, double s) {
  if (std::isinf(s)) return x.cwiseAbs().maxCoeff();
  if (s == 1.0) return x.cwiseAbs().sum();
  if (s == 2.0) return x.norm();
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x(i)) / scale, s);
  return scale * std::pow(acc, 1.0 / s);
}

double conjugate_exponent(double s) {
  if (s == 1.0) return std::numeric_limits<double>::infinity();
  return s / (s - 1.0);
}

Matrix checked_inverse(const Matrix& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() < 1) throw std::invalid_argument(std::string(what) + ": matrix must be square");
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) throw std::invalid_argument(std::string(what) + ": matrix is singular");
  return lu.inverse();
}

Matrix tangent_completion(const Vector& v) {
  const Eigen::Index n = v.size();
  Eigen::HouseholderQR<Matrix> qr(v);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - 1);
}

// Positive part of the max over columns; throws when the body is unbounded in u.
double max_positive_dot(const Matrix& cols, const Vector& u, const char* what) {
  const double m = max_dot(cols, u);
  if (!(m > 0.0)) throw std::domain_error(std::string(what) + ": body is unbounded in this direction");
  return m;
}

double radial_unit(const ConvexBody::State& s, const Vector& u);
double support_unit(const ConvexBody::State& s, const Vector& u);

// sup over the sphere of r(xi) <u, xi>: grid scan, then local refinement.
double support_by_search(const ConvexBody::State& s, const Vector& u) {
  const SphericalRule& g = *s.grid;
  const Eigen::Map<const Vector> r(s.radial.data(), static_cast<Eigen::Index>(s.radial.size()));
  const Vector scores = (g.nodes.transpose() * u).cwiseProduct(r);
  Eigen::Index best = 0;
  const double start = scores.maxCoeff(&best);
  if (g.layout == SphereLayout::Scattered) {
    const auto& rs = std::get<RadialSamples>(s.rep);
    if (!rs.radial_fn) return start;
  }
  const auto objective = [&](const Vector& xi) { return radial_unit(s, xi) * u.dot(xi); };
  return refine_maximum(objective, g.nodes.col(best), start, g.spacing).value;
}

double radial_unit(const ConvexBody::State& s, const Vector& u) {
  return std::visit(
      [&](const auto& rep) -> double {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, RadialSamples>) {
          if (rep.radial_fn) return rep.radial_fn(u);
          return interpolate_on_sphere(*s.grid, rep.radial, u);
        } else if constexpr (std::is_same_v<T, HalfspaceIntersection>) {
          return 1.0 / max_positive_dot(rep.normals, u, "radial");
        } else if constexpr (std::is_same_v<T, SymmetricVertexHull>) {
          return 1.0 / max_positive_dot(rep.polar_vertices, u, "radial");
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return 1.0 / (rep.A_inv * u).norm();
        } else {
          return 1.0 / lq_norm(rep.A_inv * u, rep.s);
        }
      },
      s.rep);
}

double support_unit(const ConvexBody::State& s, const Vector& u) {
  return std::visit(
      [&](const auto& rep) -> double {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, RadialSamples>) {
          if (rep.support_fn) return rep.support_fn(u);
          if (!rep.support.empty()) return interpolate_on_sphere(*s.grid, rep.support, u);
          return support_by_search(s, u);
        } else if constexpr (std::is_same_v<T, HalfspaceIntersection>) {
          return max_dot(rep.vertices, u);
        } else if constexpr (std::is_same_v<T, SymmetricVertexHull>) {
          return (rep.generators.transpose() * u).cwiseAbs().maxCoeff();
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return (rep.A.transpose() * u).norm();
        } else {
          return lq_norm(rep.A.transpose() * u, conjugate_exponent(rep.s));
        }
      },
      s.rep);
}

bool is_symmetric_set(const Matrix& cols) {
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    bool found = false;
    for (Eigen::Index k = 0; k < cols.cols() && !found; ++k) {
      found = (cols.col(j) + cols.col(k)).norm() <= 1e-14 * std::max(1.0, cols.col(j).norm());
    }
    if (!found) return false;
  }
  return true;
}

// One column from each antipodal pair.
Matrix half_of_symmetric(const Matrix& cols) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    bool paired = false;
    for (Eigen::Index k : keep) {
      if ((cols.col(j) + cols.col(k)).norm() <= 1e-14 * std::max(1.0, cols.col(j).norm())) paired = true;
    }
    if (!paired) keep.push_back(j);
  }
  Matrix out(cols.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = cols.col(keep[i]);
  return out;
}

// Index of the single non-zero entry, or -1.
int axis_of(const Vector& v) {
  int axis = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0.0) {
      if (axis >= 0) return -1;
      axis = static_cast<int>(i);
    }
  }
  return axis;
}

std::optional<double> box_volume(const Matrix& normals) {
  const int n = static_cast<int>(normals.rows());
  if (normals.cols() != 2 * n) return std::nullopt;
  std::vector<double> plus(static_cast<std::size_t>(n), 0.0);
  std::vector<double> minus(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index j = 0; j < normals.cols(); ++j) {
    const int a = axis_of(normals.col(j));
    if (a < 0) return std::nullopt;
    const double c = normals(a, j);
    auto& slot = c > 0 ? plus[static_cast<std::size_t>(a)] : minus[static_cast<std::size_t>(a)];
    if (slot != 0.0) return std::nullopt;
    slot = std::abs(c);
  }
  double vol = 1.0;
  for (int i = 0; i < n; ++i) {
    if (plus[static_cast<std::size_t>(i)] == 0.0 || minus[static_cast<std::size_t>(i)] == 0.0) return std::nullopt;
    vol *= 1.0 / plus[static_cast<std::size_t>(i)] + 1.0 / minus[static_cast<std::size_t>(i)];
  }
  return vol;
}

Matrix symmetric_points(const Matrix& generators) {
  Matrix both(generators.rows(), 2 * generators.cols());
  both << generators, -generators;
  return both;
}

std::optional<double> cross_volume(const Matrix& generators) {
  const int n = static_cast<int>(generators.rows());
  if (generators.cols() != n) return std::nullopt;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  double vol = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int a = axis_of(generators.col(j));
    if (a < 0 || seen[static_cast<std::size_t>(a)]) return std::nullopt;
    seen[static_cast<std::size_t>(a)] = true;
    vol *= 2.0 * std::abs(generators(a, j)) / static_cast<double>(j + 1);
  }
  return vol;
}

}  // namespace

std::shared_ptr<const SphericalRule> shared_sphere_rule(int n, int level) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const SphericalRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, level}];
  if (!slot) slot = std::make_shared<const SphericalRule>(sphere_rule(n, level));
  return slot;
}

ConvexBody ConvexBody::build(BodyRepresentation rep, std::shared_ptr<const SphericalRule> grid) {
  if (!grid) throw std::invalid_argument("ConvexBody: missing direction grid");
  auto state = std::make_shared<State>();
  state->rep = std::move(rep);
  state->grid = std::move(grid);
  const SphericalRule& g = *state->grid;
  if (auto* rs = std::get_if<RadialSamples>(&state->rep)) {
    if (rs->radial.size() != g.size()) throw std::invalid_argument("ConvexBody: radial sample count does not match the grid");
    if (!rs->support.empty() && rs->support.size() != g.size()) {
      throw std::invalid_argument("ConvexBody: support sample count does not match the grid");
    }
    state->radial = rs->radial;
  } else {
    state->radial.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) state->radial[i] = radial_unit(*state, g.node(i));
  }
  for (double r : state->radial) {
    if (!(r > 1e-12) || !std::isfinite(r)) throw std::invalid_argument("ConvexBody: origin must be interior and the body bounded");
  }
  return ConvexBody(std::move(state));
}

ConvexBody ConvexBody::ellipsoid(const Matrix& A, std::shared_ptr<const SphericalRule> grid) {
  if (grid && A.rows() != grid->dim) throw std::invalid_argument("ellipsoid: dimension mismatch");
  return build(Ellipsoid{A, checked_inverse(A, "ellipsoid")}, std::move(grid));
}

ConvexBody ConvexBody::ball(int n, double radius, std::shared_ptr<const SphericalRule> grid) {
  if (!(radius > 0)) throw std::invalid_argument("ball: radius must be positive");
  return ellipsoid(radius * Matrix::Identity(n, n), std::move(grid));
}

ConvexBody ConvexBody::halfspaces(const Matrix& normals, std::shared_ptr<const SphericalRule> grid) {
  if (grid && normals.rows() != grid->dim) throw std::invalid_argument("halfspaces: dimension mismatch");
  return build(HalfspaceIntersection{normals, halfspace_vertices(normals)}, std::move(grid));
}

ConvexBody ConvexBody::cube(int n, double half_width, std::shared_ptr<const SphericalRule> grid) {
  if (!(half_width > 0)) throw std::invalid_argument("cube: half width must be positive");
  Matrix normals(n, 2 * n);
  normals << Matrix::Identity(n, n) / half_width, -Matrix::Identity(n, n) / half_width;
  return halfspaces(normals, std::move(grid));
}

ConvexBody ConvexBody::symmetric_hull(const Matrix& generators, std::shared_ptr<const SphericalRule> grid) {
  if (grid && generators.rows() != grid->dim) throw std::invalid_argument("symmetric_hull: dimension mismatch");
  Matrix both(generators.rows(), 2 * generators.cols());
  both << generators, -generators;
  return build(SymmetricVertexHull{generators, halfspace_vertices(both)}, std::move(grid));
}

ConvexBody ConvexBody::cross_polytope(int n, double radius, std::shared_ptr<const SphericalRule> grid) {
  if (!(radius > 0)) throw std::invalid_argument("cross_polytope: radius must be positive");
  return symmetric_hull(radius * Matrix::Identity(n, n), std::move(grid));
}

ConvexBody ConvexBody::lq_ball(double s, const Matrix& A, std::shared_ptr<const SphericalRule> grid) {
  if (!(s >= 1.0) || !std::isfinite(s)) throw std::invalid_argument("lq_ball: exponent must be finite and >= 1");
  if (grid && A.rows() != grid->dim) throw std::invalid_argument("lq_ball: dimension mismatch");
  return build(LqBallImage{s, A, checked_inverse(A, "lq_ball")}, std::move(grid));
}

ConvexBody ConvexBody::from_samples(RadialSamples samples, std::shared_ptr<const SphericalRule> grid) {
  return build(std::move(samples), std::move(grid));
}

int ConvexBody::dim() const { return state_->grid->dim; }
const SphericalRule& ConvexBody::grid() const { return *state_->grid; }
const std::shared_ptr<const SphericalRule>& ConvexBody::grid_ptr() const { return state_->grid; }
const BodyRepresentation& ConvexBody::representation() const { return state_->rep; }
const std::vector<double>& ConvexBody::radial_samples() const { return state_->radial; }

std::string ConvexBody::kind() const {
  switch (state_->rep.index()) {
    case 0: return "radial-samples";
    case 1: return "halfspaces";
    case 2: return "symmetric-hull";
    case 3: return "ellipsoid";
    default: return "lq-ball";
  }
}

const std::vector<double>& ConvexBody::support_samples() const {
  std::call_once(state_->support_once, [this] {
    const SphericalRule& g = *state_->grid;
    if (const auto* rs = std::get_if<RadialSamples>(&state_->rep); rs && !rs->support.empty()) {
      state_->support = rs->support;
      return;
    }
    state_->support.assign(g.size(), 0.0);
    const State& s = *state_;
    parallel_for(g.size(), [&](std::size_t i) { s.support[i] = support_unit(s, g.node(i)); });
  });
  return state_->support;
}

double ConvexBody::radial(const Vector& u) const {
  const double len = u.norm();
  if (!(len > 0)) throw std::invalid_argument("radial: zero direction");
  return radial_unit(*state_, u / len) / len;
}

double ConvexBody::gauge(const Vector& x) const {
  const double len = x.norm();
  if (len == 0.0) return 0.0;
  return len / radial_unit(*state_, x / len);
}

double ConvexBody::support(const Vector& u) const {
  const double len = u.norm();
  if (len == 0.0) return 0.0;
  return len * support_unit(*state_, u / len);
}

bool ConvexBody::exact_radial() const {
  if (const auto* rs = std::get_if<RadialSamples>(&state_->rep)) return static_cast<bool>(rs->radial_fn);
  return true;
}

bool ConvexBody::exact_support() const {
  if (const auto* rs = std::get_if<RadialSamples>(&state_->rep)) return static_cast<bool>(rs->support_fn);
  return true;
}

std::optional<double> ConvexBody::closed_form_volume() const {
  const int n = dim();
  return std::visit(
      [&](const auto& rep) -> std::optional<double> {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, Ellipsoid>) {
          return std::abs(rep.A.determinant()) * ball_volume(n);
        } else if constexpr (std::is_same_v<T, LqBallImage>) {
          return std::abs(rep.A.determinant()) * std::pow(2.0 * gamma(1.0 + 1.0 / rep.s), n) / gamma(1.0 + n / rep.s);
        } else if constexpr (std::is_same_v<T, HalfspaceIntersection>) {
          if (auto box = box_volume(rep.normals)) return box;
          if (n == 2 || n == 3) return polytope_volume(rep.normals, rep.vertices);
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, SymmetricVertexHull>) {
          if (auto cross = cross_volume(rep.generators)) return cross;
          if (n == 2 || n == 3) return polytope_volume(rep.polar_vertices, symmetric_points(rep.generators));
          return std::nullopt;
        } else {
          return std::nullopt;
        }
      },
      state_->rep);
}

double volume_by_quadrature(const ConvexBody& K) {
  const int n = K.dim();
  const auto& r = K.radial_samples();
  std::vector<double> rn(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) rn[i] = std::pow(r[i], n);
  return integrate_sphere_values(K.grid(), rn) / n;
}

double volume(const ConvexBody& K) {
  if (auto v = K.closed_form_volume()) return *v;
  return volume_by_quadrature(K);
}

bool contains(const ConvexBody& K, const Vector& x) {
  if (x.norm() == 0.0) return true;
  if (const auto* rs = std::get_if<RadialSamples>(&K.representation()); rs && !rs->support.empty() && !rs->radial_fn) {
    const Vector dots = K.grid().nodes.transpose() * x;
    for (Eigen::Index i = 0; i < dots.size(); ++i) {
      if (dots(i) > rs->support[static_cast<std::size_t>(i)]) return false;
    }
    return true;
  }
  return K.gauge(x) <= 1.0;
}

ConvexBody polar(const ConvexBody& K) {
  const auto& grid = K.grid_ptr();
  const int n = K.dim();
  const auto& rep = K.representation();
  if (const auto* e = std::get_if<Ellipsoid>(&rep)) return ConvexBody::ellipsoid(e->A_inv.transpose(), grid);
  if (const auto* l = std::get_if<LqBallImage>(&rep)) {
    if (l->s == 1.0) {
      Matrix normals(n, 2 * n);
      normals << l->A, -l->A;
      return ConvexBody::halfspaces(normals, grid);
    }
    return ConvexBody::lq_ball(conjugate_exponent(l->s), l->A_inv.transpose(), grid);
  }
  if (const auto* h = std::get_if<SymmetricVertexHull>(&rep)) {
    Matrix normals(n, 2 * h->generators.cols());
    normals << h->generators, -h->generators;
    return ConvexBody::halfspaces(normals, grid);
  }
  if (const auto* h = std::get_if<HalfspaceIntersection>(&rep); h && is_symmetric_set(h->normals)) {
    return ConvexBody::symmetric_hull(half_of_symmetric(h->normals), grid);
  }

  RadialSamples out;
  const auto& hs = K.support_samples();
  const auto& rs = K.radial_samples();
  out.radial.resize(hs.size());
  out.support.resize(rs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0)) throw std::domain_error("polar: support function vanishes; origin not interior");
    out.radial[i] = 1.0 / hs[i];
    out.support[i] = 1.0 / rs[i];
  }
  if (K.exact_support()) out.radial_fn = [K](const Vector& u) { return 1.0 / K.support(u); };
  if (K.exact_radial()) out.support_fn = [K](const Vector& u) { return 1.0 / K.radial(u); };
  return ConvexBody::from_samples(std::move(out), grid);
}

ConvexBody dilate(const ConvexBody& K, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("dilate: factor must be positive");
  if (!std::holds_alternative<RadialSamples>(K.representation())) {
    return linear_image(K, lambda * Matrix::Identity(K.dim(), K.dim()));
  }
  const auto& src = std::get<RadialSamples>(K.representation());
  RadialSamples out;
  out.radial = K.radial_samples();
  for (double& r : out.radial) r *= lambda;
  out.support = src.support;
  for (double& h : out.support) h *= lambda;
  if (src.radial_fn) out.radial_fn = [f = src.radial_fn, lambda](const Vector& u) { return lambda * f(u); };
  if (src.support_fn) out.support_fn = [f = src.support_fn, lambda](const Vector& u) { return lambda * f(u); };
  return ConvexBody::from_samples(std::move(out), K.grid_ptr());
}

ConvexBody linear_image(const ConvexBody& K, const Matrix& A) {
  const int n = K.dim();
  if (A.rows() != n || A.cols() != n) throw std::invalid_argument("linear_image: dimension mismatch");
  const Matrix A_inv = checked_inverse(A, "linear_image");
  const auto& grid = K.grid_ptr();
  const auto& rep = K.representation();
  if (const auto* e = std::get_if<Ellipsoid>(&rep)) return ConvexBody::ellipsoid(A * e->A, grid);
  if (const auto* l = std::get_if<LqBallImage>(&rep)) return ConvexBody::lq_ball(l->s, A * l->A, grid);
  if (const auto* h = std::get_if<HalfspaceIntersection>(&rep)) {
    return ConvexBody::halfspaces(A_inv.transpose() * h->normals, grid);
  }
  if (const auto* h = std::get_if<SymmetricVertexHull>(&rep)) return ConvexBody::symmetric_hull(A * h->generators, grid);

  const auto& src = std::get<RadialSamples>(rep);
  const SphericalRule& g = *grid;
  const Matrix At = A.transpose();
  RadialSamples out;
  out.radial.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out.radial[i] = K.radial(A_inv * g.node(i));
  if (K.exact_support() || !src.support.empty()) {
    out.support.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.support[i] = K.support(At * g.node(i));
  }
  if (K.exact_radial()) out.radial_fn = [K, A_inv](const Vector& u) { return K.radial(A_inv * u); };
  if (K.exact_support()) out.support_fn = [K, At](const Vector& u) { return K.support(At * u); };
  return ConvexBody::from_samples(std::move(out), grid);
}

// ---------------------------------------------------------------------------
// L_p centroid bodies

namespace {

bool smooth_exact_radial(const ConvexBody& K) {
  const auto& rep = K.representation();
  if (std::holds_alternative<Ellipsoid>(rep) || std::holds_alternative<LqBallImage>(rep)) return true;
  if (const auto* rs = std::get_if<RadialSamples>(&rep)) return static_cast<bool>(rs->radial_fn);
  return false;
}

// Nodes split at <v, xi> = 0, in the frame (v, tangent basis): one column
// per node, with weights and <v, xi>.
struct AdaptedRule {
  Matrix local;
  Vector w;
  Vector t;
};

// log r_K at the unit vectors F X, batched where K has a closed form.
Vector log_radial_columns(const ConvexBody& K, const Matrix& F, const Matrix& X) {
  const auto cols = X.cols();
  Vector r(cols);
  const auto& rep = K.representation();
  if (const auto* e = std::get_if<Ellipsoid>(&rep)) {
    const Matrix Y = (e->A_inv * F) * X;
    return -0.5 * Y.colwise().squaredNorm().transpose().array().log();
  }
  if (const auto* l = std::get_if<LqBallImage>(&rep)) {
    const Matrix Y = (l->A_inv * F) * X;
    for (Eigen::Index j = 0; j < cols; ++j) r(j) = -std::log(lq_norm(Y.col(j), l->s));
    return r;
  }
  const Matrix Y = F * X;
  for (Eigen::Index j = 0; j < cols; ++j) r(j) = std::log(K.radial(Y.col(j)));
  return r;
}

const AdaptedRule& adapted_rule(int n) {
  static const AdaptedRule two = [] {
    AdaptedRule r;
    const auto [x, w] = gauss_legendre(96);
    const auto m = static_cast<Eigen::Index>(2 * x.size());
    r.local.resize(2, m);
    r.w.resize(m);
    r.t.resize(m);
    // angle from v over the halves [-pi/2, pi/2] and [pi/2, 3pi/2]
    Eigen::Index c = 0;
    for (double mid : {0.0, kPi}) {
      for (std::size_t k = 0; k < x.size(); ++k, ++c) {
        const double angle = mid + 0.5 * kPi * x[k];
        r.local(0, c) = std::cos(angle);
        r.local(1, c) = std::sin(angle);
        r.w(c) = 0.5 * kPi * w[k];
        r.t(c) = std::cos(angle);
      }
    }
    return r;
  }();
  static const AdaptedRule three = [] {
    AdaptedRule r;
    const auto [x, w] = gauss_legendre(32);
    const int n_phi = 64;
    const double dphi = 2.0 * kPi / n_phi;
    const auto m = static_cast<Eigen::Index>(2 * x.size()) * n_phi;
    r.local.resize(3, m);
    r.w.resize(m);
    r.t.resize(m);
    // <v, xi> over [-1, 0] and [0, 1], uniform in the azimuth
    Eigen::Index c = 0;
    for (double mid : {-0.5, 0.5}) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double t = mid + 0.5 * x[k];
        const double sn = std::sqrt(std::max(0.0, 1.0 - t * t));
        for (int j = 0; j < n_phi; ++j, ++c) {
          r.local(0, c) = t;
          r.local(1, c) = sn * std::cos(dphi * j);
          r.local(2, c) = sn * std::sin(dphi * j);
          r.w(c) = 0.5 * w[k] * dphi;
          r.t(c) = t;
        }
      }
    }
    return r;
  }();
  return n == 2 ? two : three;
}

// w_c |t_c|^p for the adapted rule.
Vector adapted_weights(int n, double p) {
  const AdaptedRule& rule = adapted_rule(n);
  Vector tw(rule.w.size());
  for (Eigen::Index c = 0; c < tw.size(); ++c) tw(c) = rule.w(c) * pow_abs(rule.t(c), p);
  return tw;
}

// int r_K(xi)^{n+p} |<v, xi>|^p dxi for unit v; tw from adapted_weights.
double adapted_moment(const ConvexBody& K, double p, const Vector& v, const Vector& tw) {
  const int n = K.dim();
  Matrix frame(n, n);
  frame << v, tangent_completion(v);
  const Vector log_r = log_radial_columns(K, frame, adapted_rule(n).local);
  return tw.dot(((n + p) * log_r.array()).exp().matrix());
}

struct CentroidKernel {
  const ConvexBody* K = nullptr;
  double p = 1.0;
  double scale = 1.0;  // 1 / (a_1 vol(K) (n+p))
  bool adapted = false;
  Vector adapted_tw;
  // polytope: int_K |<v, x>|^p over facet cones
  std::shared_ptr<const FacetSimplices> facets;
  Vector grid_weights;  // w_j r_j^{n+p}

  double operator()(const Vector& u) const {
    const double len = u.norm();
    if (len == 0.0) return 0.0;
    const Vector v = u / len;
    double moment = 0.0;
    if (facets) {
      // int_K |<v, x>|^p = (1 / (n+p)) int_S r^{n+p} |<v, xi>|^p
      moment = (K->dim() + p) * polytope_moment(*facets, v, p);
    } else if (adapted) {
      moment = adapted_moment(*K, p, v, adapted_tw);
    } else {
      const Vector dots = K->grid().nodes.transpose() * v;
      for (Eigen::Index j = 0; j < dots.size(); ++j) moment += grid_weights(j) * pow_abs(dots(j), p);
    }
    return len * std::pow(scale * moment, 1.0 / p);
  }
};

CentroidKernel make_kernel(const ConvexBody& K, double p, CentroidOptions::Integration integration) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("centroid_body: p must be finite and >= 1");
  const int n = K.dim();
  CentroidKernel k;
  k.K = &K;
  k.p = p;
  const double a1 = ball_volume(n + p) / (ball_volume(2) * ball_volume(n) * ball_volume(p - 1));
  k.scale = 1.0 / (a1 * volume(K) * (n + p));
  using I = CentroidOptions::Integration;
  if (integration != I::Grid && (n == 2 || n == 3)) {
    const auto& rep = K.representation();
    if (const auto* h = std::get_if<HalfspaceIntersection>(&rep)) {
      k.facets = std::make_shared<const FacetSimplices>(facet_simplices(h->normals, h->vertices));
      return k;
    }
    if (const auto* h = std::get_if<SymmetricVertexHull>(&rep)) {
      k.facets = std::make_shared<const FacetSimplices>(facet_simplices(h->polar_vertices, symmetric_points(h->generators)));
      return k;
    }
  }
  k.adapted = integration == I::Adapted || (integration == I::Auto && smooth_exact_radial(K));
  if (k.adapted && (n < 2 || n > 3)) {
    if (integration == I::Adapted) throw std::invalid_argument("centroid_body: adapted integration needs n in {2, 3}");
    k.adapted = false;
  }
  if (k.adapted) k.adapted_tw = adapted_weights(n, p);
  if (!k.adapted) {
    const SphericalRule& g = K.grid();
    const auto& r = K.radial_samples();
    k.grid_weights.resize(static_cast<Eigen::Index>(g.size()));
    for (std::size_t j = 0; j < g.size(); ++j) {
      k.grid_weights(static_cast<Eigen::Index>(j)) = g.weights[j] * std::pow(r[j], n + p);
    }
  }
  return k;
}

}  // namespace

double centroid_support(const ConvexBody& K, double p, const Vector& v, CentroidOptions::Integration integration) {
  return make_kernel(K, p, integration)(v);
}

ConvexBody centroid_body(const ConvexBody& K, double p, const CentroidOptions& options) {
  const SphericalRule& g = K.grid();
  CentroidKernel kernel = make_kernel(K, p, options.integration);
  RadialSamples out;
  out.support.assign(g.size(), 0.0);
  parallel_for(g.size(), [&](std::size_t i) { out.support[i] = kernel(g.node(i)); });
  out.radial = support_to_radial(g, out.support, options.refine);
  // The kernel keeps a pointer; the evaluator owns a copy of the body.
  out.support_fn = [K, kernel](const Vector& u) {
    CentroidKernel local = kernel;
    local.K = &K;
    return local(u);
  };
  return ConvexBody::from_samples(std::move(out), K.grid_ptr());
}

std::vector<double> support_to_radial(const SphericalRule& grid, std::span<const double> support, bool refine,
                                      const DirectionFn& support_eval) {
  const std::size_t N = grid.size();
  if (support.size() != N) throw std::invalid_argument("support_to_radial: sample count does not match the grid");
  Vector inv_h(static_cast<Eigen::Index>(N));
  for (std::size_t j = 0; j < N; ++j) {
    if (!(support[j] > 0) || !std::isfinite(support[j])) {
      throw std::invalid_argument("support_to_radial: support samples must be positive and finite");
    }
    inv_h(static_cast<Eigen::Index>(j)) = 1.0 / support[j];
  }
  std::vector<double> best(N, 0.0);
  std::vector<Eigen::Index> arg(N, 0);
  parallel_chunks(N, kBlock, [&](std::size_t begin, std::size_t end) {
    const auto rows = static_cast<Eigen::Index>(end - begin);
    const Matrix dots = grid.nodes.middleCols(static_cast<Eigen::Index>(begin), rows).transpose() * grid.nodes;
    for (Eigen::Index i = 0; i < rows; ++i) {
      Eigen::Index j = 0;
      const double m = (dots.row(i).transpose().array() * inv_h.array()).maxCoeff(&j);
      best[begin + static_cast<std::size_t>(i)] = m;
      arg[begin + static_cast<std::size_t>(i)] = j;
    }
  });
  const bool can_refine = refine && (support_eval || grid.layout != SphereLayout::Scattered);
  if (can_refine) {
    parallel_for(N, [&](std::size_t i) {
      const Vector u = grid.node(i);
      const auto objective = [&](const Vector& xi) {
        const double h = support_eval ? support_eval(xi) : interpolate_on_sphere(grid, support, xi);
        return u.dot(xi) / h;
      };
      best[i] = refine_maximum(objective, grid.nodes.col(arg[i]), best[i], grid.spacing).value;
    });
  }
  std::vector<double> radial(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(best[i] > 0)) throw std::invalid_argument("support_to_radial: empty positive cone");
    radial[i] = 1.0 / best[i];
  }
  return radial;
}

// ---------------------------------------------------------------------------

ConvexBody random_body(std::uint64_t seed, const RandomBodySpec& spec, std::shared_ptr<const SphericalRule> grid) {
  const int n = spec.n;
  if (n < 2 || n > 5) throw std::invalid_argument("random_body: n must be in [2, 5]");
  if (grid && grid->dim != n) throw std::invalid_argument("random_body: grid dimension mismatch");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto gaussian_vector = [&] {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
  };

  if (spec.kind == "halfspace") {
    if (spec.count < 0) throw std::invalid_argument("random_body: count must be non-negative");
    Matrix normals(n, spec.count + 2 * n);
    for (int j = 0; j < spec.count; ++j) {
      const double inverse_distance = 0.5 + uniform(rng);
      normals.col(j) = gaussian_vector().normalized() * inverse_distance;
    }
    normals.rightCols(2 * n) << Matrix::Identity(n, n), -Matrix::Identity(n, n);
    return ConvexBody::halfspaces(normals, std::move(grid));
  }
  if (spec.kind == "hull") {
    if (spec.count < n) throw std::invalid_argument("random_body: hull needs at least n generators");
    Matrix gens(n, spec.count);
    for (int j = 0; j < spec.count; ++j) gens.col(j) = gaussian_vector();
    return ConvexBody::symmetric_hull(gens, std::move(grid));
  }
  if (spec.kind == "ellipsoid") {
    Matrix G(n, n);
    for (int j = 0; j < n; ++j) G.col(j) = gaussian_vector();
    const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ() * Matrix::Identity(n, n);
    Vector d(n);
    double log_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      d(i) = uniform(rng) - 0.5;
      log_sum += d(i);
    }
    for (int i = 0; i < n; ++i) d(i) = std::exp(d(i) - log_sum / n);
    return ConvexBody::ellipsoid(Q * d.asDiagonal(), std::move(grid));
  }
  throw std::invalid_argument("random_body: unknown kind '" + spec.kind + "'");
}

ConvexBody make_body(const BodySpec& spec, std::shared_ptr<const SphericalRule> grid) {
  const int n = spec.n;
  if (n < 2 || n > 5) throw std::invalid_argument("body: n must be in [2, 5]");
  if (!grid) grid = shared_sphere_rule(n, default_sphere_level(n));
  if (grid->dim != n) throw std::invalid_argument("body: grid dimension mismatch");
  const bool has_matrix = spec.matrix.size() > 0;
  if (has_matrix && (spec.matrix.rows() != n || spec.matrix.cols() != n)) {
    throw std::invalid_argument("body: matrix must be n x n");
  }
  const std::string& k = spec.kind;
  if (k == "ball") return ConvexBody::ball(n, spec.radius, grid);
  if (k == "cube") return ConvexBody::cube(n, spec.radius, grid);
  if (k == "cross-polytope") return ConvexBody::cross_polytope(n, spec.radius, grid);
  if (k == "lq-ball") return ConvexBody::lq_ball(spec.s, has_matrix ? spec.matrix : Matrix::Identity(n, n), grid);
  if (k == "ellipsoid" && has_matrix) return ConvexBody::ellipsoid(spec.matrix, grid);
  if (k == "ellipsoid" || k == "halfspace" || k == "hull") {
    if (!spec.seed) throw std::invalid_argument("body: random kind '" + k + "' needs a seed");
    RandomBodySpec r;
    r.kind = k;
    r.n = n;
    r.count = spec.count;
    return random_body(*spec.seed, r, grid);
  }
  throw std::invalid_argument("body: unknown kind '" + k + "'");
}

EllipsoidFit fit_ellipsoid(const ConvexBody& K) {
  const int n = K.dim();
  const SphericalRule& g = K.grid();
  const auto& r = K.radial_samples();
  Matrix S = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vector xi = g.node(i);
    S += g.weights[i] * std::pow(r[i], n + 2) * (xi * xi.transpose());
  }
  // int_{T B} x x^T dx = |det T| omega_n / (n + 2) T T^T
  S /= ball_volume(n);
  const double det_T = std::pow(S.determinant(), 1.0 / (n + 2));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S / det_T);
  EllipsoidFit fit;
  fit.T = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
  const Matrix T_inv = fit.T.inverse();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double fitted = 1.0 / (T_inv * g.node(i)).norm();
    fit.residual = std::max(fit.residual, std::abs(r[i] / fitted - 1.0));
  }
  return fit;
}

}  // namespace affineineq
