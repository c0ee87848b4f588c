#pragma once

#include "affineineq/quadrature.hpp"

#include <functional>

namespace affineineq {

using SphereObjective = std::function<double(const Vector&)>;

struct SphereMaximum {
  Vector direction;
  double value = 0.0;
};

/// Local maximization of a smooth objective on the unit sphere, starting at
/// `start` (typically the best grid node). Newton steps with a
/// finite-difference Hessian in tangent coordinates; a step is only taken
/// when it increases the objective, so the result never falls below the
/// starting value. `spacing` bounds the step length.
SphereMaximum refine_maximum(const SphereObjective& objective, const Vector& start, double start_value,
                             double spacing);

}  // namespace affineineq
