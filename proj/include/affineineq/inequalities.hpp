#pragma once

#include "affineineq/bodies.hpp"
#include "affineineq/functionals.hpp"
#include "affineineq/functions.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace affineineq {

/// How the tolerance is applied: pass iff deficit >= -tolerance * scale,
/// with scale 1 (absolute), |rhs| (relative) or vol(K) (volume).
enum class ToleranceKind { Absolute, Relative, Volume };

/// Defaults: entropy inequalities 1e-4 absolute, ratio inequalities 1e-3
/// relative, body inequalities 1e-6 relative to vol(K).
struct Tolerances {
  double entropy = 1e-4;
  double ratio = 1e-3;
  double bodies = 1e-6;
};

struct DeficitReport {
  std::string id;
  int n = 0;
  double p = 0.0;
  std::optional<double> alpha;
  std::optional<double> beta;

  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;  // rhs - lhs
  std::optional<double> ratio;  // lhs / rhs for ratio-scale inequalities

  double tolerance = 0.0;
  ToleranceKind tolerance_kind = ToleranceKind::Absolute;
  double tolerance_scale = 1.0;
  bool pass = false;

  std::optional<FunctionSpec> function;
  std::optional<BodySpec> body;
  QuadratureLevels levels;  // resolved
  /// Deficit at coarsened levels minus the reported deficit (NaN when not computed).
  double refinement_delta = std::numeric_limits<double>::quiet_NaN();

  /// Named side quantities (Euclidean counterparts, fit residuals, ...).
  std::map<std::string, double> diagnostics;
};

struct EvalOptions {
  FunctionalOptions functional;
  Tolerances tolerances;
  /// Overrides the per-kind default when set.
  std::optional<double> tolerance;
  bool refinement = true;
  /// Gentil inequality cost C(x) = |M x|^q / q (q = p/(p-1)); the function's
  /// frame when empty.
  Matrix cost_matrix;
  double beta = 1.0;
};

/// Inequality identifiers accepted by evaluate().
const std::vector<std::string>& inequality_ids();

/// Ent(|f|^p) <= (n/p) log(L_{n,p} int |grad f|^p).
DeficitReport euclid_log_sobolev(const FunctionSpec& spec, const EvalOptions& options = {});
/// Ent(|f|^p) <= (n/p) log(L_{n,p} E_p(f)^p).
DeficitReport affine_log_sobolev(const FunctionSpec& spec, const EvalOptions& options = {});
/// Ent(|f|^p) <= (n/p) log(L_C int C^*(grad f)) for C = |M x|^q / q.
DeficitReport gentil_log_sobolev(const FunctionSpec& spec, const EvalOptions& options = {});
/// vol(K_f)^{-p/n} int C_f^*(grad f) <= a_2 Z_p(f)^p.
DeficitReport main_inequality(const FunctionSpec& spec, const EvalOptions& options = {});
/// ||f||_{np/(n-p)} <= S_{n,p} E_p(f)  (p < n).
DeficitReport affine_sobolev(const FunctionSpec& spec, const EvalOptions& options = {});
/// ||f||_{np/(n-p)} <= S_{n,p} ||grad f||_p.
DeficitReport euclid_sobolev(const FunctionSpec& spec, const EvalOptions& options = {});
/// ||f||_r <= G_{n,p,alpha} E_p(f)^theta ||f||_m^{1-theta}.
DeficitReport affine_gn(const FunctionSpec& spec, const EvalOptions& options = {});
/// Ent(e^{beta f}) <= n log((beta k_n / e) E_inf(f)) (affine) or with
/// ||grad f||_inf (Euclidean).
DeficitReport linf_log_sobolev(const FunctionSpec& spec, bool affine, const EvalOptions& options = {});
/// vol(K) <= vol(Gamma_p K).
DeficitReport bp_centroid(const BodySpec& spec, double p, const EvalOptions& options = {});

/// Dispatch by id; bodies use `body`, functions use `function`.
DeficitReport evaluate(const std::string& id, const std::optional<FunctionSpec>& function,
                       const std::optional<BodySpec>& body, double p, const EvalOptions& options = {});

}  // namespace affineineq
