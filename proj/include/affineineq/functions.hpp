#pragma once

#include "affineineq/quadrature.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace affineineq {

/// Parameters of a test-function family. Families:
///   logsob-extremal   c exp(-(1/sigma) |A(x - x0)|^{p/(p-1)})
///   sobolev-extremal  a (1 + b |A(x - x0)|^{p/(p-1)})^{1 - n/p}
///   gn-extremal       a (1 + b |A(x - x0)|^{p/(p-1)})^{-1/(alpha - 1)}
///   gentil-extremal   a exp(-b C(x - x0)), C(y) = |A y|^q / q
///   gaussian          a exp(-b |A(x - x0)|^2)
///   cone              c - b |A x - shift|
///   bump              a (1 - |A(x - x0)|^2 / R^2)_+^k
///   cube-bump         a prod_i (1 - (A(x - x0))_i^2 / R^2)_+^k
///   grid              multilinear interpolation of lattice values
struct FunctionSpec {
  std::string family = "gaussian";
  int n = 2;
  double p = 2.0;

  double a = 1.0;  // amplitude (ignored when normalized)
  double b = 1.0;
  double c = 0.0;  // cone height (ignored when normalized)
  double sigma = 1.0;
  double alpha = 1.2;
  double q = 0.0;  // gentil cost exponent; 0 means p/(p-1)
  double radius = 1.0;
  int smoothness = 3;
  double beta = 1.0;  // cone normalization int e^{beta f} = 1

  /// Frame: "identity", "diag" (det 1, axis ratio `anisotropy`),
  /// "random-sl", "random-gl", or "explicit" (uses `matrix`).
  std::string frame = "identity";
  double anisotropy = 1.0;
  Matrix matrix;
  Vector center;  // x0 (or the cone shift a, in which case f = c - b|Ax - a|)
  std::optional<std::uint64_t> seed;

  /// Rescale so that int |f|^p = 1 (cone: int e^{beta f} = 1).
  bool normalize = true;

  // grid family
  std::vector<int> shape;
  Vector origin;
  Vector spacing;
  std::vector<double> values;  // first axis fastest
};

/// Frame matrix for the spec (seeded for random kinds; throws
/// std::invalid_argument when a random kind has no seed).
Matrix make_frame(const FunctionSpec& spec);

/// Closed-form function y -> g(y) composed with y = F(x - x0), scaled by an
/// amplitude (plus an additive height for cones).
class TestFunction {
 public:
  enum class Profile { StretchedExp, Power, BallBump, CubeBump, Cone, Grid };

  /// Builds from the spec. Throws std::invalid_argument on invalid
  /// parameters (sigma <= 0, singular frame, alpha out of range, ...).
  static TestFunction make(const FunctionSpec& spec);

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] const FunctionSpec& spec() const { return spec_; }
  [[nodiscard]] Profile profile() const { return profile_; }
  [[nodiscard]] const Matrix& frame() const { return frame_; }
  [[nodiscard]] const Vector& center() const { return center_; }
  [[nodiscard]] double amplitude() const { return amplitude_; }
  [[nodiscard]] double height() const { return height_; }
  /// b for cones (including any amplitude scaling).
  [[nodiscard]] double cone_slope() const { return std::abs(amplitude_) * rate_; }

  [[nodiscard]] double value(const Vector& x) const;
  [[nodiscard]] Vector gradient(const Vector& x) const;
  /// Values and gradients at the columns of X (gradients as columns).
  void evaluate(const Matrix& X, std::vector<double>& values, Matrix& gradients) const;

  [[nodiscard]] DecayModel decay() const;

  /// True when f = amplitude * g(|F(x - x0)|) for a 1-D profile g (every
  /// family except cube bumps and grids). Cones are radial but Lipschitz only.
  [[nodiscard]] bool radial_profile() const;
  /// g and g' as functions of rho = |F(x - x0)| (before amplitude).
  [[nodiscard]] double profile_value(double rho) const;
  [[nodiscard]] double profile_derivative(double rho) const;
  /// sup |g'| (finite for Lipschitz families; infinity otherwise).
  [[nodiscard]] double profile_lipschitz() const;

  /// int |f|^r dx in closed form when the family admits one.
  [[nodiscard]] std::optional<double> closed_form_power_integral(double r) const;

  /// t f.
  [[nodiscard]] TestFunction scaled(double t) const;
  /// x -> f(M x + shift).
  [[nodiscard]] TestFunction composed(const Matrix& M, const Vector& shift) const;
  /// x -> f(lambda x).
  [[nodiscard]] TestFunction dilated(double lambda) const;

 private:
  FunctionSpec spec_;
  Profile profile_ = Profile::StretchedExp;
  int n_ = 0;
  double p_ = 2.0;
  double amplitude_ = 1.0;
  double height_ = 0.0;  // cone height c
  Vector center_;
  Matrix frame_;
  Matrix frame_inv_;
  double det_frame_ = 1.0;  // |det F|

  // profile parameters
  double rate_ = 1.0;      // StretchedExp lambda; Power b; Cone slope b
  double exponent_ = 2.0;  // StretchedExp / Power: power of rho
  double kappa_ = 1.0;     // Power: g = (1 + b rho^s)^{-kappa}
  double radius_ = 1.0;    // bumps
  int smooth_ = 3;

  [[nodiscard]] double grid_value(const Vector& y, Vector* grad) const;
  [[nodiscard]] double cube_value(const Vector& y, Vector* grad) const;
};

/// Literal normalizer of the log-Sobolev extremal display:
/// sigma^{-n(p-1)/p} (int e^{-|x|^{p^2/(p-1)}} dx)^{-1/p}.
double c_sigma(int n, double p, double sigma);

/// Amplitude that makes exp(-(1/sigma)|x|^{p/(p-1)}) unit in L^p.
double log_sobolev_normalizer(int n, double p, double sigma);

/// Space rule for f; tol bounds the tail mass.
SpaceRule space_rule(const TestFunction& f, const QuadratureLevels& levels = {}, double tol = 1e-11);

/// (int |f|^r)^{1/r}: closed form when available, else quadrature.
double lp_norm(const TestFunction& f, double r, const QuadratureLevels& levels = {});

/// (int |f|^r)^{1/r} by quadrature only.
double lp_norm_quadrature(const TestFunction& f, double r, const QuadratureLevels& levels = {});

/// f / ||f||_p.
TestFunction normalize_lp(const TestFunction& f, double p, const QuadratureLevels& levels = {});

/// (int |grad f|^p)^{1/p}; p = infinity allowed for Lipschitz families.
double gradient_norm(const TestFunction& f, double p, const QuadratureLevels& levels = {});

/// Ent(|f|^p) = int |f|^p log |f|^p, using t log t -> 0 at t = 0. Requires
/// int |f|^p = 1 within 1e-6 unless `renormalize`, in which case f is
/// rescaled first; `renormalized` reports whether that happened.
double entropy(const TestFunction& f, double p, const QuadratureLevels& levels = {}, bool renormalize = true,
               bool* renormalized = nullptr);

/// Ent(e^{beta f}) for f with int e^{beta f} = 1. Cones use the closed form
/// beta c - n after checking the normalization.
double entropy_exp(const TestFunction& f, double beta);

/// int e^{beta f} for a cone: e^{beta c} n! omega_n / (beta^n b^n |det A|).
double cone_exp_integral(const TestFunction& f, double beta);

}  // namespace affineineq
