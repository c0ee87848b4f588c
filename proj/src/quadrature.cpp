#include "affineineq/quadrature.hpp"

#include "affineineq/constants.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>

namespace affineineq {

namespace {

constexpr double kPi = std::numbers::pi;

// 4-point Lagrange weights for a uniform stencil at offsets -1, 0, 1, 2.
constexpr int kStencil = 6;

// Lagrange weights for the points xs at x.
std::array<double, kStencil> lagrange_weights(double x, const std::array<double, kStencil>& xs) {
  std::array<double, kStencil> w{};
  for (int a = 0; a < kStencil; ++a) {
    double l = 1.0;
    for (int b = 0; b < kStencil; ++b) {
      if (b != a) l *= (x - xs[static_cast<std::size_t>(b)]) / (xs[static_cast<std::size_t>(a)] - xs[static_cast<std::size_t>(b)]);
    }
    w[static_cast<std::size_t>(a)] = l;
  }
  return w;
}

// Uniform stencil i0 - 2 .. i0 + 3 at fractional offset t in [0, 1).
std::array<double, kStencil> uniform_weights(double t) {
  std::array<double, kStencil> xs{};
  for (int a = 0; a < kStencil; ++a) xs[static_cast<std::size_t>(a)] = a - 2.0;
  return lagrange_weights(t, xs);
}

int wrap(int i, int m) {
  const int r = i % m;
  return r < 0 ? r + m : r;
}

// Root of x^{d+1} = x + 1, the generalized golden ratio.
double harmonious_ratio(int d) {
  double x = 2.0;
  for (int it = 0; it < 64; ++it) {
    const double f = std::pow(x, d + 1) - x - 1.0;
    const double df = (d + 1) * std::pow(x, d) - 1.0;
    x -= f / df;
  }
  return x;
}

SphericalRule circle_rule(int level) {
  SphericalRule rule;
  rule.dim = 2;
  rule.level = level;
  rule.layout = SphereLayout::Circle;
  const int count = 2 * level;
  rule.nodes.resize(2, count);
  rule.weights.assign(static_cast<std::size_t>(count), 2.0 * kPi / count);
  for (int k = 0; k < count; ++k) {
    const double th = kPi * k / level;
    rule.nodes(0, k) = std::cos(th);
    rule.nodes(1, k) = std::sin(th);
  }
  rule.spacing = 2.0 * kPi / count;
  return rule;
}

SphericalRule product_rule(int level) {
  SphericalRule rule;
  rule.dim = 3;
  rule.level = level;
  rule.layout = SphereLayout::Product;
  auto [t, w] = gauss_legendre(level);
  const int n_phi = 2 * level;
  rule.n_phi = n_phi;
  rule.cos_theta = t;
  rule.nodes.resize(3, static_cast<Eigen::Index>(level) * n_phi);
  rule.weights.resize(static_cast<std::size_t>(level) * n_phi);
  const double dphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < level; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
    for (int j = 0; j < n_phi; ++j) {
      const Eigen::Index k = static_cast<Eigen::Index>(i) * n_phi + j;
      const double phi = dphi * j;
      rule.nodes(0, k) = s * std::cos(phi);
      rule.nodes(1, k) = s * std::sin(phi);
      rule.nodes(2, k) = t[i];
      rule.weights[static_cast<std::size_t>(k)] = w[i] * dphi;
    }
  }
  rule.spacing = kPi / level;
  return rule;
}

SphericalRule scattered_rule(int n, int level) {
  if (level > 24) throw std::invalid_argument("sphere_rule: level too large for scattered rule");
  SphericalRule rule;
  rule.dim = n;
  rule.level = level;
  rule.layout = SphereLayout::Scattered;
  const std::size_t total = std::size_t{1} << level;
  const std::size_t half = total / 2;
  const double g = harmonious_ratio(n);
  std::vector<double> alpha(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) alpha[static_cast<std::size_t>(i)] = std::pow(1.0 / g, i + 1);

  rule.nodes.resize(n, static_cast<Eigen::Index>(total));
  for (std::size_t k = 0; k < half; ++k) {
    Vector z(n);
    for (int i = 0; i < n; ++i) {
      double x = 0.5 + alpha[static_cast<std::size_t>(i)] * static_cast<double>(k + 1);
      x -= std::floor(x);
      x = std::clamp(x, 1e-12, 1.0 - 1e-12);
      z(i) = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * x - 1.0);
    }
    z.normalize();
    rule.nodes.col(static_cast<Eigen::Index>(k)) = z;
    rule.nodes.col(static_cast<Eigen::Index>(k + half)) = -z;
  }
  const double area = n * ball_volume(n);
  rule.weights.assign(total, area / static_cast<double>(total));
  rule.spacing = std::pow(area / static_cast<double>(total), 1.0 / (n - 1));
  return rule;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count) {
  if (count < 1) throw std::invalid_argument("gauss_legendre: count must be >= 1");
  std::vector<double> x(static_cast<std::size_t>(count));
  std::vector<double> w(static_cast<std::size_t>(count));
  const int m = (count + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = count * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = 0.0;
    for (int j = 0; j < count; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
    }
    dp = count * (z * p0 - p1) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(count - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(count - 1 - i)] = wi;
  }
  if (count % 2 == 1) x[static_cast<std::size_t>(count / 2)] = 0.0;
  return {x, w};
}

SphericalRule sphere_rule(int n, int level) {
  if (level < 1) throw std::invalid_argument("sphere_rule: level must be >= 1");
  switch (n) {
    case 2:
      return circle_rule(level);
    case 3:
      return product_rule(level);
    case 4:
    case 5:
      return scattered_rule(n, std::max(level, 2));
    default:
      throw std::invalid_argument("sphere_rule: unsupported dimension " + std::to_string(n));
  }
}

int default_sphere_level(int n) {
  if (n == 2) return 256;
  if (n == 3) return 48;
  return 14;
}

double integrate_sphere_values(const SphericalRule& rule, std::span<const double> values) {
  if (values.size() != rule.size()) throw std::invalid_argument("integrate_sphere_values: size mismatch");
  CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NonFiniteIntegrand("integrate_sphere_values: non-finite value at node " + std::to_string(i));
    }
    acc.add(rule.weights[i] * values[i]);
  }
  return acc.value();
}

std::size_t nearest_node(const SphericalRule& rule, const Vector& u) {
  Eigen::Index best = 0;
  (rule.nodes.transpose() * u).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

double interpolate_on_sphere(const SphericalRule& rule, std::span<const double> values, const Vector& u) {
  if (values.size() != rule.size()) throw std::invalid_argument("interpolate_on_sphere: size mismatch");
  if (rule.layout == SphereLayout::Circle && rule.size() >= kStencil) {
    const int count = static_cast<int>(rule.size());
    double th = std::atan2(u(1), u(0));
    if (th < 0) th += 2.0 * kPi;
    const double s = th / (2.0 * kPi / count);
    const int i0 = static_cast<int>(std::floor(s));
    const auto w = uniform_weights(s - i0);
    double v = 0.0;
    for (int a = 0; a < kStencil; ++a) {
      v += w[static_cast<std::size_t>(a)] * values[static_cast<std::size_t>(wrap(i0 - 2 + a, count))];
    }
    return v;
  }
  if (rule.layout == SphereLayout::Product && rule.level >= kStencil && rule.n_phi % 2 == 0) {
    // Lagrange in the polar angle psi (smooth across the poles, unlike
    // cos(theta)); rings past a pole are mirrored with phi + pi.
    const Vector un = u.normalized();
    const double t = std::clamp(un(2), -1.0, 1.0);
    const double psi = std::acos(t);
    const auto& ct = rule.cos_theta;
    const int L = rule.level;
    const int half = rule.n_phi / 2;
    std::array<double, kStencil> pa{};
    std::array<int, kStencil> ring{};
    std::array<int, kStencil> shift{};
    const int upper = static_cast<int>(std::lower_bound(ct.begin(), ct.end(), t) - ct.begin());
    for (int a = 0; a < kStencil; ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const int k = upper - kStencil / 2 + a;
      if (k < 0) {
        ring[ia] = -1 - k;
        shift[ia] = half;
        pa[ia] = 2.0 * kPi - std::acos(ct[static_cast<std::size_t>(ring[ia])]);
      } else if (k >= L) {
        ring[ia] = 2 * L - 1 - k;
        shift[ia] = half;
        pa[ia] = -std::acos(ct[static_cast<std::size_t>(ring[ia])]);
      } else {
        ring[ia] = k;
        shift[ia] = 0;
        pa[ia] = std::acos(ct[static_cast<std::size_t>(k)]);
      }
    }
    const auto wt = lagrange_weights(psi, pa);
    double phi = std::atan2(un(1), un(0));
    if (phi < 0) phi += 2.0 * kPi;
    const double s = phi / (2.0 * kPi / rule.n_phi);
    const int j0 = static_cast<int>(std::floor(s));
    const auto wp = uniform_weights(s - j0);
    double v = 0.0;
    for (int a = 0; a < kStencil; ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const std::size_t row = static_cast<std::size_t>(ring[ia]) * static_cast<std::size_t>(rule.n_phi);
      double inner = 0.0;
      for (int b = 0; b < kStencil; ++b) {
        inner += wp[static_cast<std::size_t>(b)] *
                 values[row + static_cast<std::size_t>(wrap(j0 - 2 + b + shift[ia], rule.n_phi))];
      }
      v += wt[ia] * inner;
    }
    return v;
  }
  return values[nearest_node(rule, u)];
}

QuadratureLevels QuadratureLevels::resolved(int n) const {
  QuadratureLevels r = *this;
  if (r.sphere_level <= 0) r.sphere_level = default_sphere_level(n);
  if (n == 2) {
    if (r.space_angular_level <= 0) r.space_angular_level = 256;
    if (r.radial_nodes <= 0) r.radial_nodes = 64;
    if (r.box_nodes <= 0) r.box_nodes = 128;
  } else if (n == 3) {
    if (r.space_angular_level <= 0) r.space_angular_level = 16;
    if (r.radial_nodes <= 0) r.radial_nodes = 40;
    if (r.box_nodes <= 0) r.box_nodes = 40;
  } else {
    if (r.space_angular_level <= 0) r.space_angular_level = 10;
    if (r.radial_nodes <= 0) r.radial_nodes = 24;
    if (r.box_nodes <= 0) r.box_nodes = 12;
  }
  return r;
}

QuadratureLevels QuadratureLevels::coarsened(int n) const {
  QuadratureLevels r = resolved(n);
  if (n <= 3) {
    r.sphere_level = std::max(4, r.sphere_level / 2);
    r.space_angular_level = std::max(4, r.space_angular_level / 2);
  } else {
    r.sphere_level = std::max(4, r.sphere_level - 1);
    r.space_angular_level = std::max(4, r.space_angular_level - 1);
  }
  r.radial_nodes = std::max(8, r.radial_nodes / 2);
  r.box_nodes = std::max(8, r.box_nodes / 2);
  return r;
}

SpaceRule polar_space_rule(int n, double radius, int radial_nodes, const SphericalRule& angular) {
  if (!(radius > 0.0)) throw std::invalid_argument("polar_space_rule: radius must be positive");
  if (angular.dim != n) throw std::invalid_argument("polar_space_rule: angular rule dimension mismatch");
  auto [x, w] = gauss_legendre(radial_nodes);
  SpaceRule rule;
  rule.dim = n;
  rule.mode = SpaceMode::PolarProduct;
  rule.radius = radius;
  const std::size_t na = angular.size();
  rule.nodes.resize(n, static_cast<Eigen::Index>(na * x.size()));
  rule.weights.resize(na * x.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = 0.5 * radius * (1.0 + x[i]);
    const double wr = 0.5 * radius * w[i] * std::pow(r, n - 1);
    for (std::size_t j = 0; j < na; ++j, ++k) {
      rule.nodes.col(static_cast<Eigen::Index>(k)) = r * angular.node(j);
      rule.weights[k] = wr * angular.weights[j];
    }
  }
  return rule;
}

SpaceRule polar_space_rule_unbounded(int n, double scale, int radial_nodes, const SphericalRule& angular) {
  if (!(scale > 0.0)) throw std::invalid_argument("polar_space_rule_unbounded: scale must be positive");
  if (angular.dim != n) throw std::invalid_argument("polar_space_rule_unbounded: angular rule dimension mismatch");
  auto [x, w] = gauss_legendre(radial_nodes);
  SpaceRule rule;
  rule.dim = n;
  rule.mode = SpaceMode::PolarProduct;
  rule.radius = std::numeric_limits<double>::infinity();
  const std::size_t na = angular.size();
  rule.nodes.resize(n, static_cast<Eigen::Index>(na * x.size()));
  rule.weights.resize(na * x.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = 0.5 * (1.0 + x[i]);
    const double r = scale * t / (1.0 - t);
    const double wr = 0.5 * w[i] * scale / ((1.0 - t) * (1.0 - t)) * std::pow(r, n - 1);
    for (std::size_t j = 0; j < na; ++j, ++k) {
      rule.nodes.col(static_cast<Eigen::Index>(k)) = r * angular.node(j);
      rule.weights[k] = wr * angular.weights[j];
    }
  }
  return rule;
}

SpaceRule box_space_rule(int n, double half_width, int nodes_per_axis) {
  if (!(half_width > 0.0)) throw std::invalid_argument("box_space_rule: half width must be positive");
  constexpr int kPanels = 4;
  const int per_panel = std::max(1, (nodes_per_axis + kPanels - 1) / kPanels);
  auto [x, w] = gauss_legendre(per_panel);
  std::vector<double> ax;
  std::vector<double> aw;
  const double panel = 2.0 * half_width / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = -half_width + p * panel;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ax.push_back(lo + 0.5 * panel * (1.0 + x[i]));
      aw.push_back(0.5 * panel * w[i]);
    }
  }
  const std::size_t m = ax.size();
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= m;
  SpaceRule rule;
  rule.dim = n;
  rule.mode = SpaceMode::BoxProduct;
  rule.radius = half_width * std::sqrt(static_cast<double>(n));
  rule.nodes.resize(n, static_cast<Eigen::Index>(total));
  rule.weights.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    double wk = 1.0;
    for (int d = 0; d < n; ++d) {
      const std::size_t idx = rem % m;
      rem /= m;
      rule.nodes(d, static_cast<Eigen::Index>(k)) = ax[idx];
      wk *= aw[idx];
    }
    rule.weights[k] = wk;
  }
  return rule;
}

SpaceRule transform_rule(SpaceRule rule, const Vector& center, const Matrix& inverse_frame) {
  const double jac = std::abs(inverse_frame.determinant());
  rule.nodes = (inverse_frame * rule.nodes).colwise() + center;
  for (double& w : rule.weights) w *= jac;
  rule.tail_bound *= jac;
  return rule;
}

namespace {

// Upper bound for the upper incomplete gamma function Gamma(a, x).
double upper_gamma_bound(double a, double x) {
  const double full = gamma(a);
  const double shift = std::max(a - 1.0, 0.0);
  if (x <= shift + 1.0) return full;
  const double b = std::exp((a - 1.0) * std::log(x) - x) / (1.0 - shift / x);
  return std::min(full, b);
}

}  // namespace

double stretched_tail_bound(const DecayModel& decay, int n, double p, double radius) {
  const double s = decay.exponent;
  const double c = p * decay.rate;
  const double amp = decay.amplitude;
  const double m = (n - 1) + std::max(p * std::max(s - 1.0, 0.0), s);
  const double frame_norm = decay.frame.size() > 0 ? decay.frame.norm() : 1.0;
  const double prefactor = std::pow(amp, p) *
                           (1.0 + std::pow(decay.rate * s * frame_norm, p) + std::abs(p * std::log(amp)) + c);
  const double a = (m + 1.0) / s;
  const double radial = upper_gamma_bound(a, c * std::pow(radius, s)) / s * std::pow(c, -a);
  return n * ball_volume(n) * prefactor * radial;
}

namespace {

RadialRule gauss_radial(int n, double radius, int count) {
  auto [x, w] = gauss_legendre(count);
  RadialRule rule;
  rule.radius = radius;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = 0.5 * radius * (1.0 + x[i]);
    rule.nodes.push_back(r);
    rule.weights.push_back(0.5 * radius * w[i] * std::pow(r, n - 1));
  }
  return rule;
}

RadialRule algebraic_radial(int n, double scale, int count) {
  auto [x, w] = gauss_legendre(count);
  RadialRule rule;
  rule.radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = 0.5 * (1.0 + x[i]);
    const double r = scale * t / (1.0 - t);
    rule.nodes.push_back(r);
    rule.weights.push_back(0.5 * w[i] * scale / ((1.0 - t) * (1.0 - t)) * std::pow(r, n - 1));
  }
  return rule;
}

SpaceRule polar_from_radial(int n, const RadialRule& radial, const SphericalRule& angular) {
  SpaceRule rule;
  rule.dim = n;
  rule.mode = SpaceMode::PolarProduct;
  rule.radius = radial.radius;
  rule.tail_bound = radial.tail_bound;
  const std::size_t na = angular.size();
  const std::size_t nr = radial.nodes.size();
  rule.nodes.resize(n, static_cast<Eigen::Index>(na * nr));
  rule.weights.resize(na * nr);
  std::size_t k = 0;
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < na; ++j, ++k) {
      rule.nodes.col(static_cast<Eigen::Index>(k)) = radial.nodes[i] * angular.node(j);
      rule.weights[k] = radial.weights[i] * angular.weights[j];
    }
  }
  return rule;
}

}  // namespace

RadialRule radial_rule_for(const DecayModel& decay, int n, double p, double tol, const QuadratureLevels& levels) {
  const QuadratureLevels lv = levels.resolved(n);
  switch (decay.kind) {
    case DecayModel::Kind::Compact:
      if (!(decay.support_radius > 0.0)) throw std::invalid_argument("radial_rule_for: support radius must be positive");
      return gauss_radial(n, decay.support_radius, lv.radial_nodes);
    case DecayModel::Kind::Polynomial:
      if (!(decay.scale > 0.0)) throw std::invalid_argument("radial_rule_for: scale must be positive");
      return algebraic_radial(n, decay.scale, lv.radial_nodes);
    case DecayModel::Kind::StretchedExponential: {
      if (!(decay.rate > 0.0) || !(decay.exponent > 0.0)) {
        throw std::invalid_argument("radial_rule_for: stretched exponential needs positive rate and exponent");
      }
      const Matrix frame = decay.frame.rows() == n ? decay.frame : Matrix::Identity(n, n);
      const double jac = 1.0 / std::abs(frame.determinant());
      auto tail = [&](double r) { return jac * stretched_tail_bound(decay, n, p, r); };
      double hi = std::max(decay.scale, 1e-300);
      while (tail(hi) >= tol) {
        hi *= 2.0;
        if (hi > 1e8) throw std::runtime_error("radial_rule_for: could not bound the tail");
      }
      double lo = 0.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) < tol) hi = mid; else lo = mid;
      }
      RadialRule rule = gauss_radial(n, hi, lv.radial_nodes);
      rule.tail_bound = tail(hi) / jac;
      return rule;
    }
    default:
      throw std::invalid_argument("radial_rule_for: decay model has no radial rule");
  }
}

SpaceRule space_rule_for(const DecayModel& decay, int n, double p, double tol, const QuadratureLevels& levels) {
  const QuadratureLevels lv = levels.resolved(n);
  const Vector center = decay.center.size() == n ? decay.center : Vector::Zero(n);
  const Matrix frame = decay.frame.rows() == n ? decay.frame : Matrix::Identity(n, n);
  const Matrix inverse = frame.inverse();

  switch (decay.kind) {
    case DecayModel::Kind::None:
      throw std::invalid_argument("space_rule_for: function has no decay metadata and no compact support");
    case DecayModel::Kind::AnalyticOnly: {
      SpaceRule rule;
      rule.dim = n;
      rule.mode = SpaceMode::AnalyticOnly;
      return rule;
    }
    case DecayModel::Kind::CompactBox:
      return transform_rule(box_space_rule(n, decay.support_radius, lv.box_nodes), center, inverse);
    default: {
      const RadialRule radial = radial_rule_for(decay, n, p, tol, levels);
      const auto angular = sphere_rule(n, lv.space_angular_level);
      return transform_rule(polar_from_radial(n, radial, angular), center, inverse);
    }
  }
}

}  // namespace affineineq
