#pragma once

#include <optional>
#include <stdexcept>

namespace affineineq {

/// Gamma function for x > 0 (Lanczos, g = 7, nine terms).
/// Throws std::domain_error for x <= 0 or non-finite x.
double gamma(double x);

/// log Gamma(x) for x > 0; usable where gamma() would overflow.
double log_gamma(double x);

/// Volume of the unit ball of (possibly fractional) dimension s >= 0:
/// pi^{s/2} / Gamma(s/2 + 1).
double ball_volume(double s);

/// Every scalar constant attached to a dimension n and exponent p.
struct ConstantSet {
  int n = 0;
  double p = 0;
  double q = 0;  // conjugate exponent, 1/p + 1/q = 1

  double omega_n = 0;     // omega_n
  double omega_2 = 0;     // omega_2 = pi
  double omega_pm1 = 0;   // omega_{p-1}
  double omega_npp = 0;   // omega_{n+p}
  double omega_npm2 = 0;  // omega_{n+p-2}

  double a1 = 0;     // L_p centroid body normalization (Gamma_p B = B)
  double a2 = 0;     // constant of the centroid-body functional inequality
  double ell_q = 0;  // max_{t>=0} (t^{1/q} - t)
  double c_np = 0;   // affine energy normalization
  double L_np = 0;   // sharp L_p log-Sobolev constant
  double k_n = 0;    // sharp L_infinity log-Sobolev constant
  double c_n_inf = 0;
  std::optional<double> S_np;  // sharp Sobolev constant, only for p < n

  /// omega_s for any real s >= 0.
  [[nodiscard]] double omega(double s) const { return ball_volume(s); }

  /// c_np^p a2^{-1} omega_n^{-p/n} ell_q, which equals 1.
  [[nodiscard]] double closing_identity() const;
};

/// Throws std::invalid_argument unless n >= 1 and p > 1.
ConstantSet constants_for(int n, double p);

/// Constants of the sharp Gagliardo-Nirenberg family r = alpha p,
/// m = alpha (p - 1) + 1.
struct GNConstantSet {
  int n = 0;
  double p = 0;
  double alpha = 0;
  double m = 0;
  double r = 0;
  double theta = 0;
  /// sigma_{alpha,p} for the Euclidean cost C(x) = |x|^q / q.
  double sigma_alpha_p = 0;
  double c1 = 0;
  double c2 = 0;
  double G_npa = 0;
};

/// Requires 1 < p < n and 1 < alpha < n/(n - p); throws std::invalid_argument otherwise.
GNConstantSet gn_constants_for(int n, double p, double alpha);

/// theta = np(r - m) / (r (m (p - n) + np)).
double gn_theta(int n, double p, double alpha);

/// sigma_{alpha,p} for a cost whose unit sublevel set {C <= 1} has volume
/// `unit_level_volume`; the extremal (sigma + (alpha-1) C)^{1/(1-alpha)}
/// then has unit L^r norm.
double gn_sigma(int n, double p, double alpha, double unit_level_volume);

/// G_C^{-1} for the same cost, i.e. (int C*(grad h))^{theta/p} ||h||_m^{1-theta}
/// evaluated at the normalized extremal h.
double gn_inverse_cost_constant(int n, double p, double alpha, double unit_level_volume);

/// c2 directly from its closed form; G_npa = c2^theta.
double gn_c2(int n, double p, double alpha);

/// Sharp constant of the log-Sobolev inequality with cost C:
/// p^{p+1} / (n e^{p-1} (int e^{-C})^{p/n}).
double gentil_constant(int n, double p, double expC_integral);

}  // namespace affineineq
