#include "affineineq/constants.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace affineineq {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

void check_gamma_arg(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("gamma: argument must be positive and finite, got " + std::to_string(x));
  }
}

// Lanczos series A(x) and t = x + g - 1/2 for the shifted argument x - 1.
double lanczos_sum(double xm1) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm1 + static_cast<double>(i));
  return a;
}

}  // namespace

double gamma(double x) {
  check_gamma_arg(x);
  if (x < 0.5) return gamma(x + 1.0) / x;
  if (x > 140.0) return std::exp(log_gamma(x));
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, xm1 + 0.5) * std::exp(-t) * lanczos_sum(xm1);
}

double log_gamma(double x) {
  check_gamma_arg(x);
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1));
}

double ball_volume(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("ball_volume: dimension must be >= 0");
  return std::pow(kPi, s / 2.0) / gamma(s / 2.0 + 1.0);
}

double ConstantSet::closing_identity() const {
  return std::pow(c_np, p) / a2 * std::pow(omega_n, -p / n) * ell_q;
}

ConstantSet constants_for(int n, double p) {
  if (n < 1) throw std::invalid_argument("constants_for: n must be >= 1");
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("constants_for: p must be > 1");

  ConstantSet c;
  c.n = n;
  c.p = p;
  c.q = p / (p - 1.0);
  const double nd = n;

  c.omega_n = ball_volume(nd);
  c.omega_2 = ball_volume(2.0);
  c.omega_pm1 = ball_volume(p - 1.0);
  c.omega_npp = ball_volume(nd + p);
  c.omega_npm2 = ball_volume(nd + p - 2.0);

  c.a1 = c.omega_npp / (c.omega_2 * c.omega_n * c.omega_pm1);
  c.ell_q = std::pow(c.q, -p / c.q) / p;
  c.a2 = c.ell_q * std::pow(nd, (nd + p) / nd) / (c.a1 * (nd + p));
  c.c_np = std::pow(nd * c.omega_n, 1.0 / nd) *
           std::pow(nd * c.omega_n * c.omega_pm1 / (2.0 * c.omega_npm2), 1.0 / p);
  c.c_n_inf = std::pow(nd * c.omega_n, 1.0 / nd);
  c.k_n = std::pow(1.0 / (gamma(nd + 1.0) * c.omega_n), 1.0 / nd);

  c.L_np = (p / nd) * std::pow((p - 1.0) / std::numbers::e, p - 1.0) * std::pow(kPi, -p / 2.0) *
           std::pow(gamma(nd / 2.0 + 1.0) / gamma(nd * (p - 1.0) / p + 1.0), p / nd);

  if (p < nd) {
    const double ratio = gamma(nd / 2.0 + 1.0) * gamma(nd) / (gamma(nd - nd / p + 1.0) * gamma(nd / p));
    c.S_np = std::pow(kPi, -0.5) * std::pow(nd, -1.0 / p) *
             std::pow((p - 1.0) / (nd - p), 1.0 - 1.0 / p) * std::pow(ratio, 1.0 / nd);
  }
  return c;
}

namespace {

void check_gn_range(int n, double p, double alpha) {
  if (n < 2) throw std::invalid_argument("gn_constants_for: n must be > 1");
  if (!(p > 1.0 && p < n)) throw std::invalid_argument("gn_constants_for: need 1 < p < n");
  const double upper = n / (n - p);
  if (!(alpha > 1.0 && alpha < upper)) {
    throw std::invalid_argument("gn_constants_for: need 1 < alpha < n/(n-p) = " + std::to_string(upper));
  }
}

// log of G_C^{-1} as displayed, with the sublevel volume factor as a parameter.
double log_inverse_cost_constant(int n, double p, double a, double volume) {
  const double nd = n;
  const double th = gn_theta(n, p, a);
  const double s = p * a / (a - 1.0);              // p alpha / (alpha - 1)
  const double u = nd * (1.0 / p - 1.0) + s;       // n (1/p - 1) + p alpha/(alpha - 1)
  double v = -th * std::log(a - 1.0);
  v += (th / p) * std::log(nd / p);
  v += -(1.0 / (a * p)) * log_gamma(u);
  v += th * ((s - 1.0) / nd - 1.0) * log_gamma(s);
  v += (th + a * th * p / (nd - a * nd)) * log_gamma(s - 1.0);
  v += th * (s / nd + 1.0 / p - 1.0) * log_gamma(u - 1.0);
  v += (th / nd) * (std::log(volume) + log_gamma(-nd / p + nd + 1.0));
  return v;
}

}  // namespace

double gn_theta(int n, double p, double alpha) {
  const double r = alpha * p;
  const double m = alpha * (p - 1.0) + 1.0;
  return n * p * (r - m) / (r * (m * (p - n) + n * p));
}

double gn_sigma(int n, double p, double a, double volume) {
  check_gn_range(n, p, a);
  const double nd = n;
  const double q = p / (p - 1.0);
  const double s = p * a / (a - 1.0);
  const double log_base = std::log(q) + (nd / q) * std::log(a - 1.0) + log_gamma(s) -
                          std::log(nd) - std::log(volume) - log_gamma(nd / q) -
                          log_gamma((p * q * a / (a - 1.0) - nd) / q);
  const double expo = -(1.0 - a) * q / (a * nd - nd - a * p * q);
  return std::exp(expo * log_base);
}

double gn_inverse_cost_constant(int n, double p, double alpha, double volume) {
  check_gn_range(n, p, alpha);
  return std::exp(log_inverse_cost_constant(n, p, alpha, volume));
}

double gn_c2(int n, double p, double a) {
  check_gn_range(n, p, a);
  const double nd = n;
  const double q = p / (p - 1.0);
  const double s = a * p / (a - 1.0);
  double v = 2.0 * std::log(a - 1.0) + std::log(p) - std::log(q) / q - std::log(nd) / p;
  v += (a * nd - nd - a * p) / ((a - 1.0) * nd) * std::log(s - 1.0);
  v += (a * nd - nd + a * p * p) / ((a - 1.0) * nd * p) * std::log(nd * (1.0 / p - 1.0) + s - 1.0);
  v -= 0.5 * std::log(kPi);
  v -= std::log((p - 1.0) * (-a * nd + nd + a * p) + p);
  const double g = log_gamma(-nd / p + nd + 1.0) + log_gamma(nd * (1.0 / p - 1.0) + s) -
                   log_gamma(nd / 2.0 + 1.0) - log_gamma(s);
  v += -g / nd;
  return std::exp(v);
}

GNConstantSet gn_constants_for(int n, double p, double alpha) {
  check_gn_range(n, p, alpha);
  GNConstantSet g;
  g.n = n;
  g.p = p;
  g.alpha = alpha;
  g.m = alpha * (p - 1.0) + 1.0;
  g.r = alpha * p;
  g.theta = gn_theta(n, p, alpha);
  const double q = p / (p - 1.0);
  g.sigma_alpha_p = gn_sigma(n, p, alpha, ball_volume(n) * std::pow(q, n / q));
  // c1 is what remains of G_C^{-1} after factoring out vol({C <= 1})^{theta/n}.
  g.c1 = std::exp(log_inverse_cost_constant(n, p, alpha, 1.0) / g.theta);
  g.c2 = gn_c2(n, p, alpha);
  g.G_npa = std::pow(g.c2, g.theta);
  return g;
}

double gentil_constant(int n, double p, double expC_integral) {
  if (!(expC_integral > 0.0)) throw std::invalid_argument("gentil_constant: integral must be positive");
  return std::pow(p, p + 1.0) / (n * std::exp(p - 1.0)) * std::pow(expC_integral, -p / n);
}

}  // namespace affineineq
