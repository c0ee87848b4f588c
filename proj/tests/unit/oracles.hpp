#pragma once

// Reference computations that share no code with the library: Boost
// adaptive quadrature and plain std math.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// int_0^inf g.
inline double half_line(const std::function<double(double)>& g) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(g, 1e-14);
}

/// int_a^b g (adaptive Gauss-Kronrod).
inline double interval(const std::function<double(double)>& g, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 15, 1e-13);
}

/// Surface area of S^{m-1}.
inline double sphere_area(int m) { return 2.0 * std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0); }

/// int_{S^{n-1}} |xi_1|^p d xi by reduction to the polar angle.
inline double sphere_moment(int n, double p) {
  if (n == 2) {
    return 4.0 * interval([&](double t) { return std::pow(std::cos(t), p); }, 0.0, std::numbers::pi / 2.0);
  }
  const double inner = interval(
      [&](double t) { return std::pow(std::abs(std::cos(t)), p) * std::pow(std::sin(t), n - 2); }, 0.0,
      std::numbers::pi / 2.0);
  return 2.0 * inner * sphere_area(n - 1);
}

/// int_{S^{n-1}} |xi_1|^p in closed form (Beta reduction).
inline double sphere_moment_closed(int n, double p) {
  return 2.0 * std::pow(std::numbers::pi, (n - 1) / 2.0) * std::tgamma((p + 1) / 2.0) / std::tgamma((n + p) / 2.0);
}

/// int over [a0,b0] x [a1,b1] of g(x, y) by nested Gauss-Kronrod.
inline double rectangle(const std::function<double(double, double)>& g, double a0, double b0, double a1, double b1) {
  return interval([&](double x) { return interval([&](double y) { return g(x, y); }, a1, b1); }, a0, b0);
}

}  // namespace oracle
