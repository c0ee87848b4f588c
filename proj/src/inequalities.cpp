#include "affineineq/inequalities.hpp"

#include "affineineq/constants.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace affineineq {

namespace {

using Core = std::function<DeficitReport(const EvalOptions&)>;

DeficitReport start(const std::string& id, int n, double p, const EvalOptions& options) {
  DeficitReport r;
  r.id = id;
  r.n = n;
  r.p = p;
  r.levels = options.functional.levels.resolved(n);
  return r;
}

void finish(DeficitReport& r, ToleranceKind kind, double default_tol, const EvalOptions& options, double volume = 1.0) {
  r.deficit = r.rhs - r.lhs;
  r.tolerance = options.tolerance.value_or(default_tol);
  r.tolerance_kind = kind;
  switch (kind) {
    case ToleranceKind::Absolute: r.tolerance_scale = 1.0; break;
    case ToleranceKind::Relative: r.tolerance_scale = std::abs(r.rhs); break;
    case ToleranceKind::Volume: r.tolerance_scale = volume; break;
  }
  r.pass = std::isfinite(r.deficit) && r.deficit >= -r.tolerance * r.tolerance_scale;
}

// Runs `core` and, when requested, again at coarsened levels.
DeficitReport with_refinement(const Core& core, int n, const EvalOptions& options) {
  DeficitReport r = core(options);
  if (options.refinement) {
    EvalOptions coarse = options;
    coarse.refinement = false;
    coarse.functional.levels = options.functional.levels.coarsened(n);
    r.refinement_delta = core(coarse).deficit - r.deficit;
  }
  return r;
}

TestFunction build(const FunctionSpec& spec) { return TestFunction::make(spec); }

double gradient_power(const TestFunction& f, double p, const EvalOptions& options) {
  return std::pow(gradient_norm(f, p, options.functional.levels), p);
}

double normalized_entropy(const TestFunction& f, double p, const EvalOptions& options) {
  // throws when int |f|^p differs from 1 by more than 1e-6
  return entropy(f, p, options.functional.levels, false);
}

}  // namespace

const std::vector<std::string>& inequality_ids() {
  static const std::vector<std::string> ids = {
      "euclid-log-sobolev", "affine-log-sobolev", "gentil",           "main",
      "affine-sobolev",     "euclid-sobolev",     "affine-gn",        "linf-log-sobolev",
      "euclid-linf-log-sobolev", "bp-centroid"};
  return ids;
}

DeficitReport euclid_log_sobolev(const FunctionSpec& spec, const EvalOptions& options) {
  const TestFunction f = build(spec);
  const int n = f.dim();
  const double p = f.p();
  const Core core = [&](const EvalOptions& o) {
    DeficitReport r = start("euclid-log-sobolev", n, p, o);
    const ConstantSet cs = constants_for(n, p);
    r.lhs = normalized_entropy(f, p, o);
    const double G = gradient_power(f, p, o);
    r.rhs = n / p * std::log(cs.L_np * G);
    r.diagnostics["grad_norm"] = std::pow(G, 1.0 / p);
    finish(r, ToleranceKind::Absolute, o.tolerances.entropy, o);
    return r;
  };
  DeficitReport r = with_refinement(core, n, options);
  r.function = spec;
  return r;
}

DeficitReport affine_log_sobolev(const FunctionSpec& spec, const EvalOptions& options) {
  const TestFunction f = build(spec);
  const int n = f.dim();
  const double p = f.p();
  const Core core = [&](const EvalOptions& o) {
    DeficitReport r = start("affine-log-sobolev", n, p, o);
    const ConstantSet cs = constants_for(n, p);
    r.lhs = normalized_entropy(f, p, o);
    const AffineEnergy e = affine_energy(f, p, o.functional);
    r.rhs = n / p * std::log(cs.L_np * std::pow(e.E_p, p));
    const double G = gradient_power(f, p, o);
    const double euclid_rhs = n / p * std::log(cs.L_np * G);
    r.diagnostics["E_p"] = e.E_p;
    r.diagnostics["grad_norm"] = std::pow(G, 1.0 / p);
    r.diagnostics["euclid_rhs"] = euclid_rhs;
    r.diagnostics["euclid_deficit"] = euclid_rhs - r.lhs;
    finish(r, ToleranceKind::Absolute, o.tolerances.entropy, o);
    return r;
  };
  DeficitReport r = with_refinement(core, n, options);
  r.function = spec;
  return r;
}

DeficitReport gentil_log_sobolev(const FunctionSpec& spec, const EvalOptions& options) {
  const TestFunction f = build(spec);
  const int n = f.dim();
  const double p = f.p();
  const double q = p / (p - 1.0);
  const Matrix M = options.cost_matrix.size() > 0 ? options.cost_matrix : f.frame();
  if (M.rows() != n || M.cols() != n) throw std::invalid_argument("gentil: cost matrix must be n x n");
  const double detM = std::abs(M.determinant());
  if (!(detM > 0)) throw std::invalid_argument("gentil: cost matrix is singular");
  const Matrix Minv_t = M.inverse().transpose();
  // int exp(-|M x|^q / q) dx
  const double exp_integral = ball_volume(n) * gamma(n / q + 1.0) * std::pow(q, n / q) / detM;
  const Core core = [&](const EvalOptions& o) {
    DeficitReport r = start("gentil", n, p, o);
    r.lhs = normalized_entropy(f, p, o);
    const SpaceRule rule = space_rule(f, o.functional.levels, o.functional.tail_tol);
    const double I = integrate_space(rule, [&](const auto& x) {
      return std::pow((Minv_t * f.gradient(x)).norm(), p) / p;
    });
    const double LC = gentil_constant(n, p, exp_integral);
    r.rhs = n / p * std::log(LC * I);
    r.diagnostics["cost_exp_integral"] = exp_integral;
    r.diagnostics["cstar_integral"] = I;
    finish(r, ToleranceKind::Absolute, o.tolerances.entropy, o);
    return r;
  };
  DeficitReport r = with_refinement(core, n, options);
  r.function = spec;
  return r;
}

DeficitReport main_inequality(const FunctionSpec& spec, const EvalOptions& options) {
  const TestFunction f = build(spec);
  const int n = f.dim();
  const double p = f.p();
  const Core core = [&](const EvalOptions& o) {
    DeficitReport r = start("main", n, p, o);
    const ConstantSet cs = constants_for(n, p);
    const AffineEnergy e = affine_energy(f, p, o.functional);
    const FunctionBodies bodies = body_K(e);
    const double vol_K = volume_by_quadrature(bodies.K_f);
    const double I = cstar_gradient_integral(f, e, o.functional);
    r.lhs = std::pow(vol_K, -p / n) * I;
    r.rhs = cs.a2 * std::pow(e.Z_p, p);
    const double gap = (r.rhs - r.lhs) / r.rhs;
    r.diagnostics["vol_K"] = vol_K;
    r.diagnostics["vol_L"] = volume_by_quadrature(bodies.L_f);
    r.diagnostics["cstar_integral"] = I;
    r.diagnostics["Z_pow"] = std::pow(e.Z_p, -n);
    r.diagnostics["rel_gap"] = gap;
    if (std::abs(gap) < 1e-3) {
      // near equality: K_f should be an ellipsoid T B and f(M^{-1} x) radial
      const EllipsoidFit fit = fit_ellipsoid(bodies.K_f);
      r.diagnostics["fit_residual"] = fit.residual;
      const Matrix Mm = std::pow(cs.q, 1.0 / cs.q) * fit.T.inverse();
      const TestFunction g = f.composed(Mm.inverse(), Vector::Zero(n));
      const double lhs_eq = std::pow(e.E_p, p);
      const double rhs_eq = std::pow(std::abs(Mm.determinant()), (p - n) / n) * gradient_power(g, p, o);
      r.diagnostics["equality_gap"] = std::abs(lhs_eq - rhs_eq) / lhs_eq;
    }
    finish(r, ToleranceKind::Relative, o.tolerances.bodies, o);
    return r;
  };
  DeficitReport r = with_refinement(core, n, options);
  r.function = spec;
  return r;
}

namespace {

DeficitReport sobolev(const FunctionSpec& spec, const EvalOptions& options, bool affine) {
  const TestFunction f = build(spec);
  const int n = f.dim();
  const double p = f.p();
  if (!(p < n)) throw std::invalid_argument("sobolev: requires p < n");
  const Core core = [&](const EvalOptions& o) {
    DeficitReport r = start(affine ? "affine-sobolev" : "euclid-sobolev", n, p, o);
    const ConstantSet cs = constants_for(n, p);
    r.lhs = lp_norm(f, n * p / (n - p), o.functional.levels);
    const double grad = gradient_norm(f, p, o.functional.levels);
    const double euclid_rhs = *cs.S_np * grad;
    if (affine) {
      const AffineEnergy e = affine_energy(f, p, o.functional);
      r.rhs = *cs.S_np * e.E_p;
      r.diagnostics["E_p"] = e.E_p;
      r.diagnostics["euclid_rhs"] = euclid_rhs;
    } else {
      r.rhs = euclid_rhs;
    }
    r.diagnostics["grad_norm"] = grad;
    r.ratio = r.lhs / r.rhs;
    finish(r, ToleranceKind::Relative, o.tolerances.ratio, o);
    return r;
  };
  DeficitReport r = with_refinement(core, n, options);
  r.function = spec;
  return r;
}

}  // namespace

DeficitReport affine_sobolev(const FunctionSpec& spec, const EvalOptions& options) { return sobolev(spec, options, true); }

DeficitReport euclid_sobolev(const FunctionSpec& spec, const EvalOptions& options) { return sobolev(spec, options, false); }

DeficitReport affine_gn(const FunctionSpec& spec, const EvalOptions& options) {
  const TestFunction f = build(spec);
  const int n = f.dim();
  const double p = f.p();
  const double alpha = spec.alpha;
  const GNConstantSet gc = gn_constants_for(n, p, alpha);
  const Core core = [&](const EvalOptions& o) {
    DeficitReport r = start("affine-gn", n, p, o);
    r.alpha = alpha;
    r.lhs = lp_norm(f, gc.r, o.functional.levels);
    const AffineEnergy e = affine_energy(f, p, o.functional);
    const double m_norm = lp_norm(f, gc.m, o.functional.levels);
    r.rhs = gc.G_npa * std::pow(e.E_p, gc.theta) * std::pow(m_norm, 1.0 - gc.theta);
    const double grad = gradient_norm(f, p, o.functional.levels);
    r.diagnostics["E_p"] = e.E_p;
    r.diagnostics["grad_norm"] = grad;
    r.diagnostics["theta"] = gc.theta;
    r.diagnostics["euclid_rhs"] = gc.G_npa * std::pow(grad, gc.theta) * std::pow(m_norm, 1.0 - gc.theta);
    r.ratio = r.lhs / r.rhs;
    finish(r, ToleranceKind::Relative, o.tolerances.ratio, o);
    return r;
  };
  DeficitReport r = with_refinement(core, n, options);
  r.function = spec;
  return r;
}

DeficitReport linf_log_sobolev(const FunctionSpec& spec, bool affine, const EvalOptions& options) {
  if (spec.family != "cone") throw std::invalid_argument("linf-log-sobolev: only cone inputs have int e^{beta f} < inf");
  const double beta = spec.beta;
  TestFunction f = build(spec);
  const int n = f.dim();
  bool renormalized = false;
  if (std::abs(cone_exp_integral(f, beta) - 1.0) > 1e-12) {
    FunctionSpec fixed = spec;
    fixed.normalize = true;
    f = build(fixed);
    renormalized = true;
  }
  // analytic on both sides; nothing to refine
  DeficitReport r = start(affine ? "linf-log-sobolev" : "euclid-linf-log-sobolev", n, spec.p, options);
  r.beta = beta;
  const ConstantSet cs = constants_for(n, 2.0);
  r.lhs = entropy_exp(f, beta);
  const double b = f.cone_slope();
  const double E_inf = b * std::pow(std::abs(f.frame().determinant()), 1.0 / n);
  const double grad_inf = gradient_norm(f, std::numeric_limits<double>::infinity());
  const double affine_rhs = n * std::log(beta * cs.k_n * E_inf / std::numbers::e);
  const double euclid_rhs = n * std::log(beta * cs.k_n * grad_inf / std::numbers::e);
  r.rhs = affine ? affine_rhs : euclid_rhs;
  r.diagnostics["E_inf"] = E_inf;
  r.diagnostics["grad_norm_inf"] = grad_inf;
  r.diagnostics["affine_rhs"] = affine_rhs;
  r.diagnostics["euclid_rhs"] = euclid_rhs;
  r.diagnostics["renormalized"] = renormalized ? 1.0 : 0.0;
  if (n >= 2) {
    FunctionalOptions fo = options.functional;
    r.diagnostics["E_inf_quadrature"] = affine_energy(f, std::numeric_limits<double>::infinity(), fo).E_p;
  }
  finish(r, ToleranceKind::Absolute, options.tolerances.entropy, options);
  r.refinement_delta = 0.0;
  r.function = spec;
  return r;
}

DeficitReport bp_centroid(const BodySpec& spec, double p, const EvalOptions& options) {
  const int n = spec.n;
  const Core core = [&](const EvalOptions& o) {
    DeficitReport r = start("bp-centroid", n, p, o);
    const ConvexBody K = make_body(spec, shared_sphere_rule(n, r.levels.sphere_level));
    const ConvexBody G = centroid_body(K, p);
    r.lhs = volume(K);
    r.rhs = volume_by_quadrature(G);
    r.diagnostics["vol_K_quadrature"] = volume_by_quadrature(K);
    finish(r, ToleranceKind::Volume, o.tolerances.bodies, o, r.lhs);
    return r;
  };
  DeficitReport r = with_refinement(core, n, options);
  r.body = spec;
  return r;
}

DeficitReport evaluate(const std::string& id, const std::optional<FunctionSpec>& function,
                       const std::optional<BodySpec>& body, double p, const EvalOptions& options) {
  if (id == "bp-centroid") {
    if (!body) throw std::invalid_argument("bp-centroid needs a body");
    return bp_centroid(*body, p, options);
  }
  if (!function) throw std::invalid_argument(id + " needs a function");
  const FunctionSpec& f = *function;
  if (id == "euclid-log-sobolev") return euclid_log_sobolev(f, options);
  if (id == "affine-log-sobolev") return affine_log_sobolev(f, options);
  if (id == "gentil") return gentil_log_sobolev(f, options);
  if (id == "main") return main_inequality(f, options);
  if (id == "affine-sobolev") return affine_sobolev(f, options);
  if (id == "euclid-sobolev") return euclid_sobolev(f, options);
  if (id == "affine-gn") return affine_gn(f, options);
  if (id == "linf-log-sobolev") return linf_log_sobolev(f, true, options);
  if (id == "euclid-linf-log-sobolev") return linf_log_sobolev(f, false, options);
  throw std::invalid_argument("unknown inequality '" + id + "'");
}

}  // namespace affineineq
