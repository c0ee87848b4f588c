#pragma once

#include "affineineq/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace affineineq {

/// Evaluator of a direction function (radial or support) at a unit vector.
using DirectionFn = std::function<double(const Vector&)>;

/// Shared, immutable direction grid; rules for the same (n, level) are built once.
std::shared_ptr<const SphericalRule> shared_sphere_rule(int n, int level);

// Representations. Matrices hold one vector per column.

/// Star body given by radial values at the grid nodes. Optional exact
/// evaluators replace interpolation when present; support samples are
/// filled when known (e.g. for centroid bodies).
struct RadialSamples {
  std::vector<double> radial;
  std::vector<double> support;
  DirectionFn radial_fn;
  DirectionFn support_fn;
};

/// {x : <v_j, x> <= 1}. Vertices are enumerated once at construction.
struct HalfspaceIntersection {
  Matrix normals;
  Matrix vertices;
};

/// conv{+-w_j}. The vertices of the polar {|<w_j, y>| <= 1} give exact radii.
struct SymmetricVertexHull {
  Matrix generators;
  Matrix polar_vertices;
};

/// A B^n.
struct Ellipsoid {
  Matrix A;
  Matrix A_inv;
};

/// A B_s^n with B_s the unit l_s ball, s >= 1.
struct LqBallImage {
  double s = 2.0;
  Matrix A;
  Matrix A_inv;
};

using BodyRepresentation =
    std::variant<RadialSamples, HalfspaceIntersection, SymmetricVertexHull, Ellipsoid, LqBallImage>;

/// Convex (or star) body with the origin in its interior, tied to a direction
/// grid. Copies share the immutable state.
class ConvexBody {
 public:
  static ConvexBody ellipsoid(const Matrix& A, std::shared_ptr<const SphericalRule> grid);
  static ConvexBody ball(int n, double radius, std::shared_ptr<const SphericalRule> grid);
  static ConvexBody halfspaces(const Matrix& normals, std::shared_ptr<const SphericalRule> grid);
  /// {|x_i| <= half_width}.
  static ConvexBody cube(int n, double half_width, std::shared_ptr<const SphericalRule> grid);
  static ConvexBody symmetric_hull(const Matrix& generators, std::shared_ptr<const SphericalRule> grid);
  /// conv{+-radius e_i}.
  static ConvexBody cross_polytope(int n, double radius, std::shared_ptr<const SphericalRule> grid);
  static ConvexBody lq_ball(double s, const Matrix& A, std::shared_ptr<const SphericalRule> grid);
  static ConvexBody from_samples(RadialSamples samples, std::shared_ptr<const SphericalRule> grid);

  [[nodiscard]] int dim() const;
  [[nodiscard]] const SphericalRule& grid() const;
  [[nodiscard]] const std::shared_ptr<const SphericalRule>& grid_ptr() const;
  [[nodiscard]] const BodyRepresentation& representation() const;
  /// "ellipsoid", "halfspaces", "symmetric-hull", "lq-ball" or "radial-samples".
  [[nodiscard]] std::string kind() const;

  /// r_K at the grid nodes.
  [[nodiscard]] const std::vector<double>& radial_samples() const;
  /// h_K at the grid nodes; computed on first use for sample bodies.
  [[nodiscard]] const std::vector<double>& support_samples() const;

  /// u need not be normalized for radial/gauge: r is (-1)-homogeneous, the
  /// gauge 1-homogeneous, h 1-homogeneous. Throws std::domain_error in a
  /// direction where the body is unbounded.
  [[nodiscard]] double radial(const Vector& u) const;
  [[nodiscard]] double gauge(const Vector& x) const;
  [[nodiscard]] double support(const Vector& u) const;
  /// True when radial() and support() are closed forms rather than
  /// interpolated or searched values.
  [[nodiscard]] bool exact_radial() const;
  [[nodiscard]] bool exact_support() const;

  [[nodiscard]] std::optional<double> closed_form_volume() const;

  struct State;

 private:
  explicit ConvexBody(std::shared_ptr<State> state) : state_(std::move(state)) {}
  static ConvexBody build(BodyRepresentation rep, std::shared_ptr<const SphericalRule> grid);
  std::shared_ptr<State> state_;
};

/// vol(K): closed form when available (ellipsoids, l_s balls, polytopes in
/// n <= 3, boxes and cross-polytopes), else (1/n) sum w_i r_i^n.
double volume(const ConvexBody& K);

/// Grid quadrature volume regardless of closed forms.
double volume_by_quadrature(const ConvexBody& K);

/// Membership: gauge test, or the support test <x, xi> <= h(xi) over the grid
/// for bodies known through support samples only.
bool contains(const ConvexBody& K, const Vector& x);

/// K with r = 1/h_K; closed forms for ellipsoids, l_s balls and polytopes.
/// Otherwise radial samples 1/h_K(xi_i) and support samples 1/r_K(xi_i).
ConvexBody polar(const ConvexBody& K);

/// lambda K.
ConvexBody dilate(const ConvexBody& K, double lambda);

/// A K; h_{AK}(u) = h_K(A^T u).
ConvexBody linear_image(const ConvexBody& K, const Matrix& A);

struct CentroidOptions {
  enum class Integration { Auto, Grid, Adapted };
  /// Auto: exact facet-cone integration for polytopes, direction-adapted
  /// rules (split at <v, xi> = 0) when K has an exact radial function, both
  /// for n <= 3; otherwise the body's grid. Adapted also selects the
  /// polytope path for polytopes.
  Integration integration = Integration::Auto;
  bool refine = true;  // refine the support-to-radial envelope
};

/// Gamma_p K with h^p(v) = (1/(a_1 vol(K) (n+p))) int r_K^{n+p} |<v, xi>|^p dxi.
ConvexBody centroid_body(const ConvexBody& K, double p, const CentroidOptions& options = {});

/// h_{Gamma_p K}(v) for a single direction (same integration as centroid_body).
double centroid_support(const ConvexBody& K, double p, const Vector& v,
                        CentroidOptions::Integration integration = CentroidOptions::Integration::Auto);

/// Radial values at the grid nodes of the body with the given support
/// samples: r(u) = min over xi with <u, xi> > 0 of h(xi)/<u, xi>. With
/// `refine`, the minimizing direction is polished against `support_eval`
/// (cubic interpolation of the samples when empty). Throws
/// std::invalid_argument for non-positive samples.
std::vector<double> support_to_radial(const SphericalRule& grid, std::span<const double> support, bool refine = true,
                                      const DirectionFn& support_eval = {});

struct RandomBodySpec {
  std::string kind = "halfspace";  // halfspace | hull | ellipsoid
  int n = 2;
  int count = 8;
};

/// Reproducible random body. Halfspace normals are random directions with
/// inverse distances drawn from [0.5, 1.5] plus the 2n coordinate slabs
/// |x_i| <= 1; hull generators are standard Gaussian points; ellipsoids are
/// Q D with Q orthogonal (QR of a Gaussian matrix) and det D = 1.
ConvexBody random_body(std::uint64_t seed, const RandomBodySpec& spec, std::shared_ptr<const SphericalRule> grid);

/// Declarative body description (CLI, configs, reports).
///   ball, cube, cross-polytope: radius (cube: half width)
///   lq-ball: s and matrix (identity when empty)
///   ellipsoid: matrix, or a seeded random ellipsoid when matrix is empty
///   halfspace, hull: seeded random polytopes with `count` facets/generators
struct BodySpec {
  std::string kind = "ball";
  int n = 2;
  double radius = 1.0;
  double s = 2.0;
  int count = 8;
  Matrix matrix;
  std::optional<std::uint64_t> seed;
};

/// Builds the body on `grid` (default grid for n when null). Throws
/// std::invalid_argument for unknown kinds and unseeded random kinds.
ConvexBody make_body(const BodySpec& spec, std::shared_ptr<const SphericalRule> grid = nullptr);

/// Ellipsoid T B^n matching the second moments of K, and the largest
/// relative radial deviation of K from it over the grid.
struct EllipsoidFit {
  Matrix T;  // symmetric positive definite
  double residual = 0.0;
};
EllipsoidFit fit_ellipsoid(const ConvexBody& K);

}  // namespace affineineq
