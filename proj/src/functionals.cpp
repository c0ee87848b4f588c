#include "affineineq/functionals.hpp"

#include "affineineq/constants.hpp"
#include "affineineq/parallel.hpp"
#include "affineineq/sphere_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace affineineq {

namespace {

constexpr std::size_t kDirBlock = 32;
constexpr std::size_t kPointBlock = 64;

inline double pow_abs(double t, double p) {
  const double a = std::abs(t);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  if (p == 4.0) {
    const double s = a * a;
    return s * s;
  }
  if (p == 1.5) return a * std::sqrt(a);
  return std::pow(a, p);
}

bool use_factorized(const TestFunction& f, double p, DirectionalMode mode) {
  if (mode == DirectionalMode::Tensor) return false;
  const bool radial = f.radial_profile();
  if (mode == DirectionalMode::Factorized && !radial) {
    throw std::invalid_argument("directional_norms: factorized mode needs a radial profile");
  }
  if (!radial) return false;
  if (std::isinf(p)) return true;
  return f.profile() != TestFunction::Profile::Cone;
}

// |amp| (R_p B_p / |det F|)^{1/p}, so that ||grad_xi f||_p = factor * |F xi|.
double factorized_factor(const TestFunction& f, double p, const FunctionalOptions& options) {
  const int n = f.dim();
  const double amp = std::abs(f.amplitude());
  if (std::isinf(p)) return amp * f.profile_lipschitz();
  const RadialRule radial = radial_rule_for(f.decay(), n, p, options.tail_tol, options.levels);
  CompensatedSum acc;
  for (std::size_t k = 0; k < radial.nodes.size(); ++k) {
    acc.add(radial.weights[k] * pow_abs(f.profile_derivative(radial.nodes[k]), p));
  }
  const double Bp = 2.0 * std::pow(std::numbers::pi, 0.5 * (n - 1)) *
                    std::exp(log_gamma(0.5 * (p + 1.0)) - log_gamma(0.5 * (n + p)));
  const double det = std::abs(f.frame().determinant());
  return amp * std::pow(acc.value() * Bp / det, 1.0 / p);
}

void check_norms(const std::vector<double>& norms) {
  for (double v : norms) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw std::domain_error("directional norm vanishes or is not finite; f is not a valid input");
    }
  }
}

}  // namespace

GradientCache gradient_cache(const TestFunction& f, const FunctionalOptions& options) {
  GradientCache cache;
  cache.rule = space_rule(f, options.levels, options.tail_tol);
  if (cache.rule.analytic_only()) throw std::invalid_argument("gradient_cache: family has no space rule");
  f.evaluate(cache.rule.nodes, cache.values, cache.gradients);
  return cache;
}

std::vector<double> directional_norms(const TestFunction& f, double p, const SphericalRule& grid,
                                      const FunctionalOptions& options, DirectionalMode* used) {
  if (grid.dim != f.dim()) throw std::invalid_argument("directional_norms: grid dimension mismatch");
  if (!(p > 1.0)) throw std::invalid_argument("directional_norms: p must exceed 1");
  const std::size_t N = grid.size();
  std::vector<double> norms(N, 0.0);

  if (use_factorized(f, p, options.mode)) {
    if (used) *used = DirectionalMode::Factorized;
    const double factor = factorized_factor(f, p, options);
    const Matrix FX = f.frame() * grid.nodes;
    for (std::size_t i = 0; i < N; ++i) norms[i] = factor * FX.col(static_cast<Eigen::Index>(i)).norm();
    check_norms(norms);
    return norms;
  }
  if (used) *used = DirectionalMode::Tensor;
  if (f.profile() == TestFunction::Profile::Cone) {
    throw std::invalid_argument("directional_norms: cone gradients are only bounded, use p = infinity");
  }
  const GradientCache cache = gradient_cache(f, options);
  const Matrix Gt = cache.gradients.transpose();
  const std::size_t M = cache.rule.size();
  const bool sup = std::isinf(p);
  parallel_chunks(N, kDirBlock, [&](std::size_t begin, std::size_t end) {
    const auto cols = static_cast<Eigen::Index>(end - begin);
    const Matrix D = Gt * grid.nodes.middleCols(static_cast<Eigen::Index>(begin), cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (sup) {
        norms[begin + static_cast<std::size_t>(j)] = D.col(j).cwiseAbs().maxCoeff();
        continue;
      }
      CompensatedSum acc;
      for (std::size_t k = 0; k < M; ++k) acc.add(cache.rule.weights[k] * pow_abs(D(static_cast<Eigen::Index>(k), j), p));
      norms[begin + static_cast<std::size_t>(j)] = std::pow(acc.value(), 1.0 / p);
    }
  });
  check_norms(norms);
  return norms;
}

double directional_norm(const TestFunction& f, const Vector& xi, double p, const FunctionalOptions& options) {
  SphericalRule one;
  one.dim = f.dim();
  one.nodes = xi.normalized();
  one.weights = {1.0};
  return directional_norms(f, p, one, options).front();
}

AffineEnergy affine_energy(const TestFunction& f, double p, const FunctionalOptions& options) {
  const int n = f.dim();
  AffineEnergy e;
  e.n = n;
  e.p = p;
  e.grid = shared_sphere_rule(n, options.levels.resolved(n).sphere_level);
  e.norms = directional_norms(f, p, *e.grid, options, &e.mode);
  const SphericalRule& g = *e.grid;
  CompensatedSum acc;
  for (std::size_t i = 0; i < g.size(); ++i) acc.add(g.weights[i] * std::pow(e.norms[i], -n));
  e.Z_p = std::pow(acc.value(), -1.0 / n);
  if (std::isinf(p)) {
    e.E_p = std::pow(n * ball_volume(n), 1.0 / n) * e.Z_p;
  } else {
    e.E_p = constants_for(n, p).c_np * e.Z_p;
    e.cstar_weights.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) e.cstar_weights[i] = g.weights[i] * std::pow(e.norms[i], -n - p);
  }
  return e;
}

double cstar(const AffineEnergy& energy, const Vector& x) {
  if (energy.cstar_weights.empty()) throw std::invalid_argument("cstar: needs a finite exponent");
  const Vector dots = energy.grid->nodes.transpose() * x;
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < dots.size(); ++i) {
    acc.add(energy.cstar_weights[static_cast<std::size_t>(i)] * pow_abs(dots(i), energy.p));
  }
  return acc.value();
}

std::vector<double> cstar_many(const AffineEnergy& energy, const Matrix& X) {
  if (energy.cstar_weights.empty()) throw std::invalid_argument("cstar: needs a finite exponent");
  const std::size_t M = static_cast<std::size_t>(X.cols());
  std::vector<double> out(M, 0.0);
  const Matrix& nodes = energy.grid->nodes;
  const double p = energy.p;
  parallel_chunks(M, kPointBlock, [&](std::size_t begin, std::size_t end) {
    const auto rows = static_cast<Eigen::Index>(end - begin);
    const Matrix D = X.middleCols(static_cast<Eigen::Index>(begin), rows).transpose() * nodes;
    for (Eigen::Index k = 0; k < rows; ++k) {
      CompensatedSum acc;
      for (Eigen::Index i = 0; i < D.cols(); ++i) {
        acc.add(energy.cstar_weights[static_cast<std::size_t>(i)] * pow_abs(D(k, i), p));
      }
      out[begin + static_cast<std::size_t>(k)] = acc.value();
    }
  });
  return out;
}

ConvexBody body_L(const AffineEnergy& energy) {
  RadialSamples s;
  s.radial.resize(energy.norms.size());
  for (std::size_t i = 0; i < energy.norms.size(); ++i) s.radial[i] = 1.0 / energy.norms[i];
  return ConvexBody::from_samples(std::move(s), energy.grid);
}

namespace {

ConvexBody k_by_polar_cstar(const AffineEnergy& energy, ConvexBody* polar_out) {
  const ConstantSet cs = constants_for(energy.n, energy.p);
  const double p = energy.p;
  const double ell = cs.ell_q;
  const std::vector<double> c = cstar_many(energy, energy.grid->nodes);
  RadialSamples s;
  s.radial.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) s.radial[i] = std::pow(ell / c[i], 1.0 / p);
  auto shared = std::make_shared<const AffineEnergy>(energy);
  s.radial_fn = [shared, ell, p](const Vector& u) { return std::pow(ell / cstar(*shared, u), 1.0 / p); };
  ConvexBody Kpolar = ConvexBody::from_samples(std::move(s), energy.grid);
  *polar_out = Kpolar;
  return polar(Kpolar);
}

ConvexBody k_by_centroid(const AffineEnergy& energy, const ConvexBody& L, ConvexBody* polar_out) {
  const ConstantSet cs = constants_for(energy.n, energy.p);
  const double p = energy.p;
  CentroidOptions opt;
  opt.integration = CentroidOptions::Integration::Grid;
  const ConvexBody G = centroid_body(L, p, opt);
  const double lambda = std::pow((energy.n + p) * volume_by_quadrature(L) * cs.a1 / cs.ell_q, 1.0 / p);
  ConvexBody K = dilate(G, lambda);
  *polar_out = polar(K);
  return K;
}

}  // namespace

FunctionBodies body_K(const AffineEnergy& energy, KRoute route, bool both_routes) {
  if (energy.cstar_weights.empty()) throw std::invalid_argument("body_K: needs a finite exponent");
  const ConvexBody L = body_L(energy);
  ConvexBody Kp = L;
  ConvexBody K = route == KRoute::PolarCstar ? k_by_polar_cstar(energy, &Kp) : k_by_centroid(energy, L, &Kp);
  FunctionBodies out{L, K, Kp, route, std::nullopt, 0.0};
  if (both_routes) {
    ConvexBody other_polar = L;
    ConvexBody other =
        route == KRoute::PolarCstar ? k_by_centroid(energy, L, &other_polar) : k_by_polar_cstar(energy, &other_polar);
    const auto& a = K.radial_samples();
    const auto& b = other.radial_samples();
    for (std::size_t i = 0; i < a.size(); ++i) out.route_gap = std::max(out.route_gap, std::abs(a[i] / b[i] - 1.0));
    out.K_f_other = other;
  }
  return out;
}

double conjugate_qhom(const SphericalRule& grid, std::span<const double> phi, double p, const Vector& y,
                      const DirectionFn& phi_eval) {
  if (phi.size() != grid.size()) throw std::invalid_argument("conjugate_qhom: sample count does not match the grid");
  const double q = p / (p - 1.0);
  const auto value = [&](double dot, double ph) {
    if (!(dot > 0)) return 0.0;
    if (!(ph > 0)) throw std::domain_error("conjugate_qhom: phi must be positive");
    return std::pow(dot, q) * std::pow(p * ph, 1.0 - q) / q;
  };
  const Vector dots = grid.nodes.transpose() * y;
  double best = 0.0;
  Eigen::Index arg = -1;
  for (Eigen::Index i = 0; i < dots.size(); ++i) {
    const double v = value(dots(i), phi[static_cast<std::size_t>(i)]);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  if (arg < 0) return 0.0;
  const auto objective = [&](const Vector& u) {
    const double ph = phi_eval ? phi_eval(u) : interpolate_on_sphere(grid, phi, u);
    return value(y.dot(u), ph);
  };
  return refine_maximum(objective, grid.nodes.col(arg), best, grid.spacing).value;
}

double cstar_gradient_integral(const TestFunction& f, const AffineEnergy& energy, const FunctionalOptions& options) {
  const GradientCache cache = gradient_cache(f, options);
  const std::vector<double> c = cstar_many(energy, cache.gradients);
  CompensatedSum acc;
  for (std::size_t k = 0; k < c.size(); ++k) acc.add(cache.rule.weights[k] * c[k]);
  return acc.value();
}

IdentityReport integral_identities(const TestFunction& f, double p, const FunctionalOptions& options,
                                const IdentityOptions& identity) {
  const int n = f.dim();
  const AffineEnergy energy = affine_energy(f, p, options);
  const ConstantSet cs = constants_for(n, p);
  IdentityReport rep;
  const ConvexBody L = body_L(energy);
  const double vol_L = volume_by_quadrature(L);
  rep.cstar_integral = cstar_gradient_integral(f, energy, options);
  rep.n_vol_L = n * vol_L;
  rep.Z_pow = std::pow(energy.Z_p, -n);
  rep.gradient_identity_gap = std::abs(rep.cstar_integral - rep.Z_pow) / rep.Z_pow;

  std::mt19937_64 rng(identity.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < identity.centroid_samples; ++s) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    v.normalize();
    const double lhs = cstar(energy, v);
    const double h = centroid_support(L, p, v, CentroidOptions::Integration::Grid);
    const double rhs = (n + p) * cs.a1 * vol_L * std::pow(h, p);
    rep.centroid_identity_gap = std::max(rep.centroid_identity_gap, std::abs(lhs - rhs) / lhs);
  }

  if (identity.exp_identity) {
    const FunctionBodies bodies = body_K(energy);
    const SphericalRule& g = *energy.grid;
    const std::vector<double> phi = cstar_many(energy, g.nodes);
    auto shared = std::make_shared<const AffineEnergy>(energy);
    const DirectionFn eval = [shared](const Vector& u) { return cstar(*shared, u); };
    const double q = cs.q;
    // C is q-homogeneous, so C(t xi) = t^q C(xi); the radial integral is
    // still done by quadrature.
    std::vector<double> c_dir(g.size());
    parallel_for(g.size(), [&](std::size_t i) { c_dir[i] = conjugate_qhom(g, phi, p, g.node(i), eval); });
    const auto [x, w] = gauss_legendre(identity.exp_radial_nodes);
    CompensatedSum acc;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(c_dir[i] > 0)) throw std::domain_error("exp identity: conjugate vanishes");
      const double R = std::pow(40.0 / c_dir[i], 1.0 / q);
      double radial = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double t = 0.5 * R * (1.0 + x[k]);
        radial += 0.5 * R * w[k] * std::exp(-std::pow(t, q) * c_dir[i]) * std::pow(t, n - 1);
      }
      acc.add(g.weights[i] * radial);
    }
    rep.exp_integral = acc.value();
    rep.gamma_vol_K = gamma(n / q + 1.0) * volume_by_quadrature(bodies.K_f);
    rep.exp_identity_gap = std::abs(*rep.exp_integral - *rep.gamma_vol_K) / *rep.gamma_vol_K;
  }
  return rep;
}

}  // namespace affineineq
