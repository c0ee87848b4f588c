#pragma once

#include "affineineq/bodies.hpp"
#include "affineineq/functions.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace affineineq {

/// How the directional norms ||grad_xi f||_p are obtained.
///   Tensor: gradients cached at every space node, contracted against every
///           grid direction.
///   Factorized: for f = a g(|F(x - x0)|) the space integral separates into a
///           radial 1-D quadrature times int_S |<theta, F xi>|^p d theta,
///           whose closed form is |F xi|^p 2 pi^{(n-1)/2} Gamma((p+1)/2) / Gamma((n+p)/2).
///   Auto: Factorized for radial profiles, Tensor otherwise.
enum class DirectionalMode { Auto, Tensor, Factorized };

struct FunctionalOptions {
  QuadratureLevels levels;
  double tail_tol = 1e-11;
  DirectionalMode mode = DirectionalMode::Auto;
};

/// f and grad f at the nodes of f's space rule.
struct GradientCache {
  SpaceRule rule;
  std::vector<double> values;
  Matrix gradients;  // n x size
};
GradientCache gradient_cache(const TestFunction& f, const FunctionalOptions& options = {});

/// Z_p, E_p and the per-node directional norms on the direction grid.
struct AffineEnergy {
  int n = 0;
  double p = 0.0;  // infinity for E_infinity
  double Z_p = 0.0;
  double E_p = 0.0;
  std::shared_ptr<const SphericalRule> grid;
  std::vector<double> norms;
  std::vector<double> cstar_weights;  // w_i norms_i^{-n-p}
  DirectionalMode mode = DirectionalMode::Auto;
};

/// Directional norms at the grid nodes. p may be infinity (Lipschitz
/// families only). Throws std::domain_error when a norm vanishes.
std::vector<double> directional_norms(const TestFunction& f, double p, const SphericalRule& grid,
                                      const FunctionalOptions& options = {}, DirectionalMode* used = nullptr);

/// ||grad_xi f||_p for one unit direction.
double directional_norm(const TestFunction& f, const Vector& xi, double p, const FunctionalOptions& options = {});

AffineEnergy affine_energy(const TestFunction& f, double p, const FunctionalOptions& options = {});

/// C_f^*(x) = int ||grad_xi f||_p^{-n-p} |<x, xi>|^p d xi on the grid.
double cstar(const AffineEnergy& energy, const Vector& x);

/// C_f^* at the columns of X.
std::vector<double> cstar_many(const AffineEnergy& energy, const Matrix& X);

/// L_f = {xi : ||grad_xi f||_p <= 1}, i.e. radial samples 1/||grad_xi f||_p.
ConvexBody body_L(const AffineEnergy& energy);

enum class KRoute { PolarCstar, CentroidScaling };

struct FunctionBodies {
  ConvexBody L_f;
  ConvexBody K_f;
  ConvexBody K_f_polar;
  KRoute route = KRoute::PolarCstar;
  /// The other route's K_f and the largest relative radial difference, when
  /// both routes were requested.
  std::optional<ConvexBody> K_f_other;
  double route_gap = 0.0;
};

/// K_f through r_{K_f polar} = (ell_q / C_f^*)^{1/p} (PolarCstar route) or as
/// ((n+p) vol(L_f) a_1 / ell_q)^{1/p} Gamma_p L_f (CentroidScaling route).
FunctionBodies body_K(const AffineEnergy& energy, KRoute route = KRoute::PolarCstar, bool both_routes = false);

/// Conjugate of a p-homogeneous function known on the grid through phi:
/// C(y) = max_u (1/q) <y, u>_+^q (p phi(u))^{1-q}. The inner maximization
/// over the ray is exact; the outer one is a grid search followed by local
/// refinement against `phi_eval` (interpolation of phi when empty).
double conjugate_qhom(const SphericalRule& grid, std::span<const double> phi, double p, const Vector& y,
                      const DirectionFn& phi_eval = {});

struct IdentityOptions {
  int centroid_samples = 50;
  std::uint64_t seed = 1;
  bool exp_identity = false;
  int exp_radial_nodes = 64;
};

/// Both sides of the integral identities, computed independently:
///   int C_f^*(grad f) = n vol(L_f) = Z_p(f)^{-n};
///   C_f^*(v) = (n+p) a_1 vol(L_f) h^p_{Gamma_p L_f}(v) at random v;
///   int e^{-C_f} = Gamma(n/q + 1) vol(K_f) (optional, C_f by conjugate_qhom).
struct IdentityReport {
  double cstar_integral = 0.0;   // int C_f^*(grad f)
  double n_vol_L = 0.0;          // n vol(L_f)
  double Z_pow = 0.0;            // Z_p(f)^{-n}
  double gradient_identity_gap = 0.0;      // relative
  double centroid_identity_gap = 0.0;  // relative, over random directions
  std::optional<double> exp_integral;  // int e^{-C_f}
  std::optional<double> gamma_vol_K;   // Gamma(n/q + 1) vol(K_f)
  std::optional<double> exp_identity_gap;
};

IdentityReport integral_identities(const TestFunction& f, double p, const FunctionalOptions& options = {},
                                const IdentityOptions& identity = {});

/// int C_f^*(grad f(x)) dx on f's space rule.
double cstar_gradient_integral(const TestFunction& f, const AffineEnergy& energy, const FunctionalOptions& options = {});

}  // namespace affineineq
