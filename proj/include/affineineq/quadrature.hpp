#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace affineineq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an integrand returns a non-finite value at a node.
class NonFiniteIntegrand : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier-compensated running sum; the summation order is the call order.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count);

enum class SphereLayout { Circle, Product, Scattered };

/// Quadrature on S^{n-1} against the UNNORMALIZED surface measure, so the
/// weights sum to n * omega_n. Every node's antipode is also a node with the
/// same weight.
struct SphericalRule {
  int dim = 0;
  int level = 0;
  SphereLayout layout = SphereLayout::Circle;
  Matrix nodes;  // dim x size, unit columns
  std::vector<double> weights;
  double spacing = 0.0;  // typical distance between neighbouring nodes

  // Product layout only: node index = i_theta * n_phi + j_phi.
  std::vector<double> cos_theta;
  int n_phi = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
  [[nodiscard]] auto node(std::size_t i) const { return nodes.col(static_cast<Eigen::Index>(i)); }
};

/// n = 2: 2*level equally spaced angles (trapezoid). n = 3: level
/// Gauss-Legendre nodes in cos(theta) times 2*level azimuths. n = 4, 5:
/// 2^level antipodally symmetrized low-discrepancy points with equal weights.
SphericalRule sphere_rule(int n, int level);

/// Default direction-grid level: 256 (n = 2), 48 (n = 3), 14 (n >= 4).
int default_sphere_level(int n);

/// Sum of w_i g(xi_i) in node order, compensated. Throws NonFiniteIntegrand.
template <typename F>
double integrate_sphere(const SphericalRule& rule, F&& g) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = g(rule.node(i));
    if (!std::isfinite(v)) {
      throw NonFiniteIntegrand("integrate_sphere: non-finite integrand at node " + std::to_string(i));
    }
    acc.add(rule.weights[i] * v);
  }
  return acc.value();
}

/// Weighted sum of precomputed node values.
double integrate_sphere_values(const SphericalRule& rule, std::span<const double> values);

/// Evaluates node samples at an arbitrary unit direction: periodic 6-point
/// Lagrange interpolation (Circle), tensor 6-point Lagrange in (polar angle,
/// phi) (Product), or nearest node (Scattered).
double interpolate_on_sphere(const SphericalRule& rule, std::span<const double> values, const Vector& u);

/// Index of the node closest to u.
std::size_t nearest_node(const SphericalRule& rule, const Vector& u);

/// How a test function decays away from its center; drives the choice of
/// the space quadrature. rho = |frame (x - center)| is the rule coordinate.
struct DecayModel {
  enum class Kind { None, Compact, CompactBox, StretchedExponential, Polynomial, AnalyticOnly };
  Kind kind = Kind::None;
  double support_radius = 0.0;  // Compact: support in rho <= radius; CompactBox: |y_i| <= radius
  double amplitude = 1.0;       // |f| <= amplitude * profile
  double rate = 0.0;            // StretchedExponential: exp(-rate rho^exponent)
  double exponent = 1.0;
  double poly_decay = 0.0;      // Polynomial: |f| ~ rho^{-poly_decay}
  double scale = 1.0;           // characteristic length in rule coordinates
  Vector center;
  Matrix frame;                 // invertible
};

enum class SpaceMode { PolarProduct, BoxProduct, AnalyticOnly };

/// Nodes and weights on R^n (weights already include the Jacobian of the
/// frame change and of the polar map).
struct SpaceRule {
  int dim = 0;
  SpaceMode mode = SpaceMode::PolarProduct;
  double radius = 0.0;      // truncation radius in rule coordinates (inf for the algebraic map)
  double tail_bound = 0.0;  // estimated mass outside the rule
  Matrix nodes;             // dim x size
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
  [[nodiscard]] bool analytic_only() const { return mode == SpaceMode::AnalyticOnly; }
  [[nodiscard]] auto node(std::size_t i) const { return nodes.col(static_cast<Eigen::Index>(i)); }
};

/// Resolution knobs; zero selects the per-dimension default.
struct QuadratureLevels {
  int sphere_level = 0;         // direction grid
  int space_angular_level = 0;  // angular part of polar space rules
  int radial_nodes = 0;
  int box_nodes = 0;            // per axis

  [[nodiscard]] QuadratureLevels resolved(int n) const;
  /// Half of every resolved level (used for refinement deltas).
  [[nodiscard]] QuadratureLevels coarsened(int n) const;
};

/// Polar product rule on the ball of radius R (Gauss-Legendre in r).
SpaceRule polar_space_rule(int n, double radius, int radial_nodes, const SphericalRule& angular);

/// Polar product rule on all of R^n through r = scale * t / (1 - t).
SpaceRule polar_space_rule_unbounded(int n, double scale, int radial_nodes, const SphericalRule& angular);

/// Tensor Gauss-Legendre rule on [-h, h]^n (composite, 4 panels per axis).
SpaceRule box_space_rule(int n, double half_width, int nodes_per_axis);

/// Maps a rule from y coordinates to x = center + inverse_frame * y.
SpaceRule transform_rule(SpaceRule rule, const Vector& center, const Matrix& inverse_frame);

/// Tail estimate for a stretched exponential decay truncated at rule radius R
/// (bound on each of int |f|^p, int |grad f|^p, int |f|^p |log |f|^p|).
double stretched_tail_bound(const DecayModel& decay, int n, double p, double radius);

/// Radial factor of a polar space rule, in rule coordinates: the weights
/// include rho^{n-1}, so sum w_k g(rho_k) approximates int_0^R g(rho) rho^{n-1} d rho.
struct RadialRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double radius = 0.0;
  double tail_bound = 0.0;
};

/// Radial rule for Compact, StretchedExponential and Polynomial decay (same
/// choices as space_rule_for). Throws std::invalid_argument otherwise.
RadialRule radial_rule_for(const DecayModel& decay, int n, double p, double tol, const QuadratureLevels& levels);

/// Picks the rule from the decay model: exact support radius for compact
/// profiles, a tail-bounded radius for stretched exponentials, the algebraic
/// map for polynomial decay. Throws std::invalid_argument for Kind::None.
SpaceRule space_rule_for(const DecayModel& decay, int n, double p, double tol, const QuadratureLevels& levels);

/// Compensated weighted sum over the space rule. Throws NonFiniteIntegrand.
template <typename F>
double integrate_space(const SpaceRule& rule, F&& g) {
  if (rule.analytic_only()) throw std::logic_error("integrate_space: rule is analytic-only");
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = g(rule.node(i));
    if (!std::isfinite(v)) {
      throw NonFiniteIntegrand("integrate_space: non-finite integrand at node " + std::to_string(i));
    }
    acc.add(rule.weights[i] * v);
  }
  return acc.value();
}

}  // namespace affineineq
