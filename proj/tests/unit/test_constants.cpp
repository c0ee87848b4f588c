#include <doctest.h>

#include "affineineq/constants.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace affineineq;
using oracle::sphere_moment;

TEST_CASE("gamma agrees with the standard library") {
  for (double x : {0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.25, 40.0, 120.5}) {
    CHECK(affineineq::gamma(x) == doctest::Approx(std::tgamma(x)).epsilon(1e-13));
    CHECK(affineineq::log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  }
  CHECK(affineineq::log_gamma(500.0) == doctest::Approx(std::lgamma(500.0)).epsilon(1e-14));
  CHECK_THROWS_AS(affineineq::gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(affineineq::gamma(-1.5), std::domain_error);
  CHECK_THROWS_AS(affineineq::gamma(std::nan("")), std::domain_error);
}

TEST_CASE("ball volumes") {
  CHECK(ball_volume(0) == doctest::Approx(1.0));
  CHECK(ball_volume(1) == doctest::Approx(2.0));
  CHECK(ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(ball_volume(4) == doctest::Approx(std::numbers::pi * std::numbers::pi / 2.0));
}

TEST_CASE("closing identity holds to rounding") {
  for (int n = 1; n <= 5; ++n) {
    for (double p : {1.5, 2.0, 3.0, 4.0, 1.1, 7.5}) {
      CHECK(std::abs(constants_for(n, p).closing_identity() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("a1 normalizes the centroid body of the ball") {
  // h_{Gamma_p B}(e1)^p = int_S |xi_1|^p / (a1 omega_n (n+p)) must be 1
  for (int n = 2; n <= 5; ++n) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto c = constants_for(n, p);
      const double expected = sphere_moment(n, p) / (c.omega_n * (n + p));
      CHECK(c.a1 == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("ell_q is the maximum of t^{1/q} - t") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 6.0}) {
    const double q = p / (p - 1.0);
    double lo = 0.0, hi = 1.0;
    auto g = [&](double t) { return std::pow(t, 1.0 / q) - t; };
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (g(m1) < g(m2)) {
        lo = m1;
      } else {
        hi = m2;
      }
    }
    CHECK(constants_for(2, p).ell_q == doctest::Approx(g(0.5 * (lo + hi))).epsilon(1e-12));
  }
}

TEST_CASE("c_np makes the affine energy of a radial function its gradient norm") {
  // for radial f, ||grad_xi f||_p^p = ||grad f||_p^p int_S |xi_1|^p / (n omega_n)
  for (int n = 2; n <= 4; ++n) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto c = constants_for(n, p);
      const double area = n * c.omega_n;
      const double expected = std::pow(area, 1.0 / n) * std::pow(area / sphere_moment(n, p), 1.0 / p);
      CHECK(c.c_np == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("classical p = 2 constants") {
  const double pi = std::numbers::pi;
  for (int n = 1; n <= 5; ++n) {
    CHECK(constants_for(n, 2.0).L_np == doctest::Approx(2.0 / (n * pi * std::numbers::e)).epsilon(1e-13));
  }
  for (int n = 3; n <= 5; ++n) {
    const double aubin = 1.0 / std::sqrt(pi * n * (n - 2.0)) * std::pow(std::tgamma(n) / std::tgamma(n / 2.0), 1.0 / n);
    REQUIRE(constants_for(n, 2.0).S_np.has_value());
    CHECK(*constants_for(n, 2.0).S_np == doctest::Approx(aubin).epsilon(1e-12));
  }
  CHECK_FALSE(constants_for(2, 2.0).S_np.has_value());
  CHECK_FALSE(constants_for(2, 3.0).S_np.has_value());
}

TEST_CASE("k_n inverts the exponential cone integral") {
  // int e^{-|x|} dx = (n-1)! n omega_n
  for (int n = 1; n <= 5; ++n) {
    const auto c = constants_for(n, 2.0);
    const double integral = oracle::half_line([&](double r) { return r > 0 ? std::exp((n - 1) * std::log(r) - r) : (n == 1 ? 1.0 : 0.0); }) * n * c.omega_n;
    CHECK(std::pow(c.k_n, -n) == doctest::Approx(integral).epsilon(1e-10));
  }
}

TEST_CASE("constants reject invalid input") {
  CHECK_THROWS_AS(constants_for(0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(constants_for(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(constants_for(2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gn_constants_for(3, 2.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(gn_constants_for(3, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gn_constants_for(2, 2.0, 1.2), std::invalid_argument);
}

TEST_CASE("GN exponent balances dilations") {
  // ||f(l.)||_r = l^{-n/r}, ||grad f(l.)||_p = l^{1-n/p}, ||f(l.)||_m = l^{-n/m}
  for (double alpha : {1.1, 1.2, 1.4}) {
    const int n = 3;
    const double p = 2.0, r = alpha * p, m = alpha * (p - 1.0) + 1.0;
    const double theta = (n / m - n / r) / (1.0 - n / p + n / m);
    CHECK(gn_theta(n, p, alpha) == doctest::Approx(theta).epsilon(1e-13));
    CHECK(theta > 0.0);
    CHECK(theta < 1.0);
  }
}

TEST_CASE("GN sigma gives the extremal unit L^r norm") {
  for (double alpha : {1.1, 1.2, 1.4}) {
    const int n = 3;
    const double p = 2.0, q = 2.0;
    const auto g = gn_constants_for(n, p, alpha);
    // C(x) = |x|^q / q has unit sublevel volume omega_n q^{n/q}
    const double norm = oracle::half_line([&](double rho) {
      const double h = std::pow(g.sigma_alpha_p + (alpha - 1.0) * std::pow(rho, q) / q, 1.0 / (1.0 - alpha));
      return std::pow(h, g.r) * std::pow(rho, n - 1);
    }) * n * ball_volume(n);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("GN constant is c2^theta and approaches the Sobolev constant") {
  for (double alpha : {1.1, 1.2, 1.4}) {
    const auto g = gn_constants_for(3, 2.0, alpha);
    CHECK(g.G_npa == std::pow(g.c2, g.theta));
    CHECK(std::pow(g.c1, g.theta) * std::pow(ball_volume(3) * std::pow(2.0, 1.5), g.theta / 3.0) ==
          doctest::Approx(gn_inverse_cost_constant(3, 2.0, alpha, ball_volume(3) * std::pow(2.0, 1.5))).epsilon(1e-12));
  }
  const double S = *constants_for(3, 2.0).S_np;
  const auto near = gn_constants_for(3, 2.0, 3.0 - 1e-7);
  CHECK(std::abs(near.G_npa / S - 1.0) <= 1e-3);
  CHECK(near.theta == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("gentil constant reduces to L_{n,2} for the quadratic cost") {
  // C = |x|^2/2: int e^{-C} = (2 pi)^{n/2}, int C^*(grad f) = (1/2) int |grad f|^2
  for (int n = 1; n <= 4; ++n) {
    const double LC = gentil_constant(n, 2.0, std::pow(2.0 * std::numbers::pi, n / 2.0));
    CHECK(LC / 2.0 == doctest::Approx(constants_for(n, 2.0).L_np).epsilon(1e-13));
  }
}
