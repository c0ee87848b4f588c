#pragma once

#include "affineineq/quadrature.hpp"

namespace affineineq {

/// Vertices (columns) of the bounded polytope {x : <a_j, x> <= 1 for all j},
/// found by enumerating n-subsets of the constraints. Intended for the small
/// constraint counts used here; throws std::invalid_argument when the subset
/// count would exceed ~2e5 or the set is unbounded.
Matrix halfspace_vertices(const Matrix& normals);

/// max_j <u, column_j>.
double max_dot(const Matrix& points, const Vector& u);

}  // namespace affineineq

namespace affineineq {

/// Exact volume of P = {x : <a_j, x> <= 1} with known vertices, as the sum
/// over facets F of vol_{n-1}(F) / (n |a_F|). n in {2, 3}.
double polytope_volume(const Matrix& normals, const Matrix& vertices);

/// Facets of P cut into segments (n = 2) or fan triangles (n = 3), each
/// with the weight dist(0, facet) * measure. Built once per polytope.
struct FacetSimplices {
  int n = 0;
  Matrix points;  // n columns per simplex
  Vector weights;
};
FacetSimplices facet_simplices(const Matrix& normals, const Matrix& vertices);

/// int_P |<v, x>|^p dx over the same cone decomposition; the facet
/// integrals of |linear|^p are reduced to one-dimensional ones split at the
/// sign change. n in {2, 3}.
double polytope_moment(const FacetSimplices& facets, const Vector& v, double p);
double polytope_moment(const Matrix& normals, const Matrix& vertices, const Vector& v, double p);

}  // namespace affineineq
