#include "affineineq/functions.hpp"

#include "affineineq/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace affineineq {

namespace {

double log_beta(double x, double y) { return log_gamma(x) + log_gamma(y) - log_gamma(x + y); }

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) G(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  // fix the sign convention so the factor is uniformly distributed
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  }
  return Q;
}

double t_log_t(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

}  // namespace

Matrix make_frame(const FunctionSpec& spec) {
  const int n = spec.n;
  if (spec.frame == "identity") return Matrix::Identity(n, n);
  if (spec.frame == "diag") {
    if (!(spec.anisotropy > 0)) throw std::invalid_argument("frame: anisotropy must be positive");
    Matrix A = Matrix::Identity(n, n) * std::pow(spec.anisotropy, -1.0 / n);
    A(0, 0) = std::pow(spec.anisotropy, (n - 1.0) / n);
    return A;
  }
  if (spec.frame == "explicit") {
    if (spec.matrix.rows() != n || spec.matrix.cols() != n) throw std::invalid_argument("frame: explicit matrix must be n x n");
    return spec.matrix;
  }
  if (spec.frame == "random-sl" || spec.frame == "random-gl") {
    if (!spec.seed) throw std::invalid_argument("frame: random frames need a seed");
    std::mt19937_64 rng(*spec.seed);
    std::uniform_real_distribution<double> uniform(-0.7, 0.7);
    const Matrix Q1 = random_orthogonal(rng, n);
    const Matrix Q2 = random_orthogonal(rng, n);
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = uniform(rng);
    d.array() -= d.mean();
    Matrix A = Q1 * d.array().exp().matrix().asDiagonal() * Q2.transpose();
    if (spec.frame == "random-gl") A *= std::exp(uniform(rng));
    return A;
  }
  throw std::invalid_argument("frame: unknown kind '" + spec.frame + "'");
}

TestFunction TestFunction::make(const FunctionSpec& spec) {
  TestFunction f;
  f.spec_ = spec;
  const int n = spec.n;
  const double p = spec.p;
  if (n < 1 || n > 5) throw std::invalid_argument("function: n must be in [1, 5]");
  if (!(p > 1.0)) throw std::invalid_argument("function: p must exceed 1");
  f.n_ = n;
  f.p_ = p;
  const double q = p / (p - 1.0);
  const std::string& fam = spec.family;

  if (fam == "grid") {
    if (static_cast<int>(spec.shape.size()) != n || spec.origin.size() != n || spec.spacing.size() != n) {
      throw std::invalid_argument("grid: shape, origin and spacing must have n entries");
    }
    std::size_t total = 1;
    for (int s : spec.shape) {
      if (s < 2) throw std::invalid_argument("grid: every axis needs at least two samples");
      total *= static_cast<std::size_t>(s);
    }
    if (spec.values.size() != total) throw std::invalid_argument("grid: value count does not match the shape");
    if ((spec.spacing.array() <= 0).any()) throw std::invalid_argument("grid: spacing must be positive");
    Vector half(n);
    for (int i = 0; i < n; ++i) half(i) = 0.5 * spec.spacing(i) * (spec.shape[static_cast<std::size_t>(i)] - 1);
    f.profile_ = Profile::Grid;
    f.center_ = spec.origin + half;
    f.frame_ = half.cwiseInverse().asDiagonal();
  } else {
    f.frame_ = make_frame(spec);
    f.center_ = spec.center.size() == n ? spec.center : Vector::Zero(n);
  }
  Eigen::FullPivLU<Matrix> lu(f.frame_);
  if (!lu.isInvertible()) throw std::invalid_argument("function: frame matrix is singular");
  f.frame_inv_ = lu.inverse();
  f.det_frame_ = std::abs(f.frame_.determinant());
  f.amplitude_ = spec.a;

  if (fam == "logsob-extremal") {
    if (!(spec.sigma > 0)) throw std::invalid_argument("logsob-extremal: sigma must be positive");
    f.profile_ = Profile::StretchedExp;
    f.rate_ = 1.0 / spec.sigma;
    f.exponent_ = q;
  } else if (fam == "gentil-extremal") {
    const double cq = spec.q > 0 ? spec.q : q;
    if (!(cq > 1.0)) throw std::invalid_argument("gentil-extremal: q must exceed 1");
    if (!(spec.b > 0)) throw std::invalid_argument("gentil-extremal: b must be positive");
    f.profile_ = Profile::StretchedExp;
    f.rate_ = spec.b / cq;
    f.exponent_ = cq;
  } else if (fam == "gaussian") {
    if (!(spec.b > 0)) throw std::invalid_argument("gaussian: b must be positive");
    f.profile_ = Profile::StretchedExp;
    f.rate_ = spec.b;
    f.exponent_ = 2.0;
  } else if (fam == "sobolev-extremal") {
    if (!(p < n)) throw std::invalid_argument("sobolev-extremal: requires p < n");
    if (!(spec.b > 0)) throw std::invalid_argument("sobolev-extremal: b must be positive");
    f.profile_ = Profile::Power;
    f.rate_ = spec.b;
    f.exponent_ = q;
    f.kappa_ = n / p - 1.0;
  } else if (fam == "gn-extremal") {
    if (!(p < n)) throw std::invalid_argument("gn-extremal: requires p < n");
    if (!(spec.alpha > 1.0 && spec.alpha < n / (n - p))) {
      throw std::invalid_argument("gn-extremal: alpha must lie in (1, n/(n-p))");
    }
    if (!(spec.b > 0)) throw std::invalid_argument("gn-extremal: b must be positive");
    f.profile_ = Profile::Power;
    f.rate_ = spec.b;
    f.exponent_ = q;
    f.kappa_ = 1.0 / (spec.alpha - 1.0);
  } else if (fam == "cone") {
    if (!(spec.b > 0)) throw std::invalid_argument("cone: b must be positive");
    f.profile_ = Profile::Cone;
    f.rate_ = spec.b;
    f.amplitude_ = 1.0;
    // f = c - b |A x - shift| = c - b |A (x - A^{-1} shift)|
    f.center_ = f.frame_inv_ * (spec.center.size() == n ? spec.center : Vector::Zero(n));
    f.height_ = spec.c;
    if (spec.normalize) {
      if (!(spec.beta > 0)) throw std::invalid_argument("cone: beta must be positive");
      const double beta = spec.beta;
      // e^{-beta c} = n! omega_n / (beta^n b^n |det A|)
      const double log_rhs = log_gamma(n + 1.0) + std::log(ball_volume(n)) - n * std::log(beta * spec.b) -
                             std::log(f.det_frame_);
      f.height_ = -log_rhs / beta;
    }
    return f;
  } else if (fam == "bump" || fam == "cube-bump") {
    if (!(spec.radius > 0)) throw std::invalid_argument("bump: radius must be positive");
    if (spec.smoothness < 1) throw std::invalid_argument("bump: smoothness must be >= 1");
    f.profile_ = fam == "bump" ? Profile::BallBump : Profile::CubeBump;
    f.radius_ = spec.radius;
    f.smooth_ = spec.smoothness;
  } else if (fam != "grid") {
    throw std::invalid_argument("function: unknown family '" + fam + "'");
  }

  if (spec.normalize) {
    if (auto I = f.closed_form_power_integral(p)) {
      f.amplitude_ /= std::pow(*I, 1.0 / p);
    } else if (f.profile_ == Profile::Grid) {
      f = normalize_lp(f, p);
    }
    // Power profiles outside L^p (e.g. Sobolev extremals) keep their amplitude.
  }
  return f;
}

bool TestFunction::radial_profile() const {
  return profile_ == Profile::StretchedExp || profile_ == Profile::Power || profile_ == Profile::BallBump ||
         profile_ == Profile::Cone;
}

double TestFunction::profile_value(double rho) const {
  switch (profile_) {
    case Profile::StretchedExp: return std::exp(-rate_ * std::pow(rho, exponent_));
    case Profile::Power: return std::pow(1.0 + rate_ * std::pow(rho, exponent_), -kappa_);
    case Profile::BallBump: {
      const double u = 1.0 - rho * rho / (radius_ * radius_);
      return u > 0 ? std::pow(u, smooth_) : 0.0;
    }
    case Profile::Cone: return -rate_ * rho;
    default: throw std::logic_error("profile_value: family has no radial profile");
  }
}

double TestFunction::profile_derivative(double rho) const {
  switch (profile_) {
    case Profile::StretchedExp:
      if (rho == 0.0) return 0.0;
      return -rate_ * exponent_ * std::pow(rho, exponent_ - 1.0) * profile_value(rho);
    case Profile::Power:
      if (rho == 0.0) return 0.0;
      return -kappa_ * rate_ * exponent_ * std::pow(rho, exponent_ - 1.0) *
             std::pow(1.0 + rate_ * std::pow(rho, exponent_), -kappa_ - 1.0);
    case Profile::BallBump: {
      const double u = 1.0 - rho * rho / (radius_ * radius_);
      return u > 0 ? -2.0 * smooth_ * rho / (radius_ * radius_) * std::pow(u, smooth_ - 1) : 0.0;
    }
    case Profile::Cone: return -rate_;
    default: throw std::logic_error("profile_derivative: family has no radial profile");
  }
}

double TestFunction::profile_lipschitz() const {
  switch (profile_) {
    case Profile::Cone: return rate_;
    case Profile::BallBump: {
      // max of 2k rho u^{k-1} / R^2 at rho^2 = R^2 / (2k - 1)
      const int k = smooth_;
      if (k == 1) return 2.0 / radius_;
      const double rho = radius_ / std::sqrt(2.0 * k - 1.0);
      return -profile_derivative(rho);
    }
    case Profile::StretchedExp: {
      // maximize lambda s rho^{s-1} exp(-lambda rho^s): rho^s = (s - 1)/(lambda s)
      const double s = exponent_;
      const double rho = std::pow((s - 1.0) / (rate_ * s), 1.0 / s);
      return -profile_derivative(rho);
    }
    case Profile::Power: {
      // t = b rho^s at the maximum of rho^{s-1} (1 + t)^{-kappa-1}
      const double s = exponent_;
      const double t = (s - 1.0) / (s * (kappa_ + 1.0) - (s - 1.0));
      if (!(t > 0)) return std::numeric_limits<double>::infinity();
      const double rho = std::pow(t / rate_, 1.0 / s);
      return -profile_derivative(rho);
    }
    default: return std::numeric_limits<double>::infinity();
  }
}

double TestFunction::cube_value(const Vector& y, Vector* grad) const {
  const double R2 = radius_ * radius_;
  double prod = 1.0;
  Vector factors(n_);
  for (int i = 0; i < n_; ++i) {
    const double u = 1.0 - y(i) * y(i) / R2;
    if (u <= 0.0) {
      if (grad) grad->setZero(n_);
      return 0.0;
    }
    factors(i) = u;
    prod *= std::pow(u, smooth_);
  }
  if (grad) {
    grad->resize(n_);
    for (int i = 0; i < n_; ++i) (*grad)(i) = prod * smooth_ * (-2.0 * y(i) / R2) / factors(i);
  }
  return prod;
}

double TestFunction::grid_value(const Vector& y, Vector* grad) const {
  // y in [-1, 1]^n maps onto the lattice
  const auto& shape = spec_.shape;
  std::vector<int> base(static_cast<std::size_t>(n_));
  std::vector<double> frac(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    const int m = shape[static_cast<std::size_t>(i)];
    const double s = 0.5 * (y(i) + 1.0) * (m - 1);
    if (s < 0.0 || s > m - 1) {
      if (grad) grad->setZero(n_);
      return 0.0;
    }
    const int b = std::min(static_cast<int>(std::floor(s)), m - 2);
    base[static_cast<std::size_t>(i)] = b;
    frac[static_cast<std::size_t>(i)] = s - b;
  }
  double v = 0.0;
  Vector g = Vector::Zero(n_);
  const int corners = 1 << n_;
  for (int c = 0; c < corners; ++c) {
    std::size_t index = 0;
    std::size_t stride = 1;
    double w = 1.0;
    for (int i = 0; i < n_; ++i) {
      const int bit = (c >> i) & 1;
      index += static_cast<std::size_t>(base[static_cast<std::size_t>(i)] + bit) * stride;
      stride *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
      w *= bit ? frac[static_cast<std::size_t>(i)] : 1.0 - frac[static_cast<std::size_t>(i)];
    }
    const double val = spec_.values[index];
    v += w * val;
    if (grad) {
      for (int i = 0; i < n_; ++i) {
        double wi = 1.0;
        for (int j = 0; j < n_; ++j) {
          if (j == i) continue;
          const int bit = (c >> j) & 1;
          wi *= bit ? frac[static_cast<std::size_t>(j)] : 1.0 - frac[static_cast<std::size_t>(j)];
        }
        const int bit = (c >> i) & 1;
        // d frac / d y = (m - 1) / 2
        g(i) += (bit ? 1.0 : -1.0) * wi * val * 0.5 * (shape[static_cast<std::size_t>(i)] - 1);
      }
    }
  }
  if (grad) *grad = g;
  return v;
}

double TestFunction::value(const Vector& x) const {
  const Vector y = frame_ * (x - center_);
  switch (profile_) {
    case Profile::CubeBump: return amplitude_ * cube_value(y, nullptr);
    case Profile::Grid: return amplitude_ * grid_value(y, nullptr);
    default: return height_ + amplitude_ * profile_value(y.norm());
  }
}

Vector TestFunction::gradient(const Vector& x) const {
  const Vector y = frame_ * (x - center_);
  Vector gy(n_);
  switch (profile_) {
    case Profile::CubeBump: (void)cube_value(y, &gy); break;
    case Profile::Grid: (void)grid_value(y, &gy); break;
    default: {
      const double rho = y.norm();
      if (rho == 0.0) return Vector::Zero(n_);
      gy = (profile_derivative(rho) / rho) * y;
    }
  }
  return amplitude_ * (frame_.transpose() * gy);
}

void TestFunction::evaluate(const Matrix& X, std::vector<double>& values, Matrix& gradients) const {
  const Eigen::Index N = X.cols();
  values.resize(static_cast<std::size_t>(N));
  gradients.resize(n_, N);
  const Matrix Y = frame_ * (X.colwise() - center_);
  Matrix GY(n_, N);
  Vector gy(n_);
  for (Eigen::Index k = 0; k < N; ++k) {
    const Vector y = Y.col(k);
    double v = 0.0;
    switch (profile_) {
      case Profile::CubeBump: v = cube_value(y, &gy); break;
      case Profile::Grid: v = grid_value(y, &gy); break;
      default: {
        const double rho = y.norm();
        v = profile_value(rho);
        if (rho == 0.0) {
          gy.setZero();
        } else {
          gy = (profile_derivative(rho) / rho) * y;
        }
      }
    }
    values[static_cast<std::size_t>(k)] = height_ + amplitude_ * v;
    GY.col(k) = gy;
  }
  gradients = amplitude_ * (frame_.transpose() * GY);
}

DecayModel TestFunction::decay() const {
  DecayModel d;
  d.center = center_;
  d.frame = frame_;
  d.amplitude = std::abs(amplitude_);
  switch (profile_) {
    case Profile::StretchedExp:
      d.kind = DecayModel::Kind::StretchedExponential;
      d.rate = rate_;
      d.exponent = exponent_;
      d.scale = std::pow(rate_, -1.0 / exponent_);
      break;
    case Profile::Power:
      d.kind = DecayModel::Kind::Polynomial;
      d.poly_decay = exponent_ * kappa_;
      d.scale = std::pow(rate_, -1.0 / exponent_);
      break;
    case Profile::BallBump:
      d.kind = DecayModel::Kind::Compact;
      d.support_radius = radius_;
      break;
    case Profile::CubeBump:
      d.kind = DecayModel::Kind::CompactBox;
      d.support_radius = radius_;
      break;
    case Profile::Grid:
      d.kind = DecayModel::Kind::CompactBox;
      d.support_radius = 1.0;
      break;
    case Profile::Cone:
      d.kind = DecayModel::Kind::AnalyticOnly;
      break;
  }
  return d;
}

std::optional<double> TestFunction::closed_form_power_integral(double r) const {
  const int n = n_;
  const double lead = std::pow(std::abs(amplitude_), r) / det_frame_;
  switch (profile_) {
    case Profile::StretchedExp: {
      const double s = exponent_;
      return lead * ball_volume(n) * gamma(n / s + 1.0) * std::pow(r * rate_, -n / s);
    }
    case Profile::Power: {
      const double s = exponent_;
      if (!(r * kappa_ > n / s)) return std::nullopt;
      return lead * n * ball_volume(n) / s * std::pow(rate_, -n / s) * std::exp(log_beta(n / s, r * kappa_ - n / s));
    }
    case Profile::BallBump:
      return lead * n * ball_volume(n) * std::pow(radius_, n) * 0.5 * std::exp(log_beta(0.5 * n, smooth_ * r + 1.0));
    case Profile::CubeBump:
      return lead * std::pow(radius_ * std::exp(log_beta(0.5, smooth_ * r + 1.0)), n);
    default: return std::nullopt;
  }
}

TestFunction TestFunction::scaled(double t) const {
  TestFunction g = *this;
  g.amplitude_ *= t;
  g.height_ *= t;
  return g;
}

TestFunction TestFunction::composed(const Matrix& M, const Vector& shift) const {
  if (M.rows() != n_ || M.cols() != n_ || shift.size() != n_) throw std::invalid_argument("composed: dimension mismatch");
  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) throw std::invalid_argument("composed: singular map");
  TestFunction g = *this;
  // F (M x + shift - x0) = (F M)(x - M^{-1}(x0 - shift))
  g.frame_ = frame_ * M;
  g.center_ = lu.solve(center_ - shift);
  g.frame_inv_ = lu.inverse() * frame_inv_;
  g.det_frame_ = det_frame_ * std::abs(M.determinant());
  return g;
}

TestFunction TestFunction::dilated(double lambda) const {
  if (!(lambda > 0)) throw std::invalid_argument("dilated: factor must be positive");
  return composed(lambda * Matrix::Identity(n_, n_), Vector::Zero(n_));
}

double c_sigma(int n, double p, double sigma) {
  if (!(sigma > 0) || !(p > 1)) throw std::invalid_argument("c_sigma: need sigma > 0 and p > 1");
  const double s = p * p / (p - 1.0);
  const double integral = n * ball_volume(n) * gamma(n / s) / s;
  return std::pow(sigma, -n * (p - 1.0) / p) * std::pow(integral, -1.0 / p);
}

double log_sobolev_normalizer(int n, double p, double sigma) {
  if (!(sigma > 0) || !(p > 1)) throw std::invalid_argument("log_sobolev_normalizer: need sigma > 0 and p > 1");
  const double q = p / (p - 1.0);
  const double integral = ball_volume(n) * gamma(n / q + 1.0) * std::pow(p / sigma, -n / q);
  return std::pow(integral, -1.0 / p);
}

SpaceRule space_rule(const TestFunction& f, const QuadratureLevels& levels, double tol) {
  return space_rule_for(f.decay(), f.dim(), f.p(), tol, levels);
}

double lp_norm_quadrature(const TestFunction& f, double r, const QuadratureLevels& levels) {
  if (!(r >= 1.0)) throw std::invalid_argument("lp_norm: exponent must be >= 1");
  const SpaceRule rule = space_rule(f, levels);
  if (rule.analytic_only()) throw std::invalid_argument("lp_norm: family is not integrable");
  const double I = integrate_space(rule, [&](const auto& x) { return std::pow(std::abs(f.value(x)), r); });
  return std::pow(I, 1.0 / r);
}

double lp_norm(const TestFunction& f, double r, const QuadratureLevels& levels) {
  if (!(r >= 1.0)) throw std::invalid_argument("lp_norm: exponent must be >= 1");
  if (auto I = f.closed_form_power_integral(r)) return std::pow(*I, 1.0 / r);
  return lp_norm_quadrature(f, r, levels);
}

TestFunction normalize_lp(const TestFunction& f, double p, const QuadratureLevels& levels) {
  const double norm = lp_norm(f, p, levels);
  if (!(norm > 0) || !std::isfinite(norm)) throw std::invalid_argument("normalize_lp: function is not normalizable");
  return f.scaled(1.0 / norm);
}

double gradient_norm(const TestFunction& f, double p, const QuadratureLevels& levels) {
  const int n = f.dim();
  if (std::isinf(p)) {
    if (f.radial_profile()) {
      const double top = Eigen::JacobiSVD<Matrix>(f.frame()).singularValues()(0);
      return std::abs(f.amplitude()) * f.profile_lipschitz() * top;
    }
    const SpaceRule rule = space_rule(f, levels);
    double best = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) best = std::max(best, f.gradient(rule.node(k)).norm());
    return best;
  }
  if (f.profile() == TestFunction::Profile::Cone) throw std::invalid_argument("gradient_norm: cone gradients are not p-integrable");
  const SpaceRule rule = space_rule(f, levels);
  std::vector<double> values;
  Matrix grads;
  f.evaluate(rule.nodes, values, grads);
  CompensatedSum acc;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    acc.add(rule.weights[k] * std::pow(grads.col(static_cast<Eigen::Index>(k)).norm(), p));
  }
  (void)n;
  return std::pow(acc.value(), 1.0 / p);
}

double entropy(const TestFunction& f, double p, const QuadratureLevels& levels, bool renormalize, bool* renormalized) {
  const SpaceRule rule = space_rule(f, levels);
  if (rule.analytic_only()) throw std::invalid_argument("entropy: family is not integrable");
  CompensatedSum mass;
  CompensatedSum ent;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double t = std::pow(std::abs(f.value(rule.node(k))), p);
    mass.add(rule.weights[k] * t);
    ent.add(rule.weights[k] * t_log_t(t));
  }
  const double m = mass.value();
  if (!(m > 0) || !std::isfinite(m)) throw std::invalid_argument("entropy: function is not normalizable");
  if (renormalized) *renormalized = false;
  if (std::abs(m - 1.0) <= 1e-6) return ent.value();
  if (!renormalize) throw std::invalid_argument("entropy: input is not normalized in L^p");
  if (renormalized) *renormalized = true;
  // Ent(g / m) = Ent(g) / m - log m for int g = m
  return ent.value() / m - std::log(m);
}

double cone_exp_integral(const TestFunction& f, double beta) {
  if (f.profile() != TestFunction::Profile::Cone) throw std::invalid_argument("cone_exp_integral: not a cone");
  const int n = f.dim();
  const double b = f.cone_slope();
  const double det = std::abs(f.frame().determinant());
  return std::exp(beta * f.height() + log_gamma(n + 1.0) + std::log(ball_volume(n)) - n * std::log(beta * b) -
                  std::log(det));
}

double entropy_exp(const TestFunction& f, double beta) {
  if (!(beta > 0)) throw std::invalid_argument("entropy_exp: beta must be positive");
  if (f.profile() != TestFunction::Profile::Cone) {
    throw std::invalid_argument("entropy_exp: e^{beta f} is integrable only for cone inputs");
  }
  const double mass = cone_exp_integral(f, beta);
  if (std::abs(mass - 1.0) > 1e-6) throw std::invalid_argument("entropy_exp: int e^{beta f} != 1");
  return beta * f.height() - f.dim();
}

}  // namespace affineineq
