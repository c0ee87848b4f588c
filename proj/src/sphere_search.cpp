#include "affineineq/sphere_search.hpp"

#include <algorithm>

namespace affineineq {

namespace {

Matrix tangent_basis(const Vector& x) {
  const Eigen::Index n = x.size();
  Eigen::HouseholderQR<Matrix> qr(x);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - 1);
}

}  // namespace

SphereMaximum refine_maximum(const SphereObjective& objective, const Vector& start, double start_value,
                             double spacing) {
  SphereMaximum best{start.normalized(), start_value};
  const Eigen::Index n = start.size();
  if (n < 2) return best;
  const Eigen::Index d = n - 1;
  double h = spacing / 4.0;
  constexpr double kMinStep = 1e-7;

  for (int iter = 0; iter < 8 && h > kMinStep; ++iter) {
    const Matrix basis = tangent_basis(best.direction);
    auto at = [&](const Vector& z) -> Vector { return (best.direction + basis * z).normalized(); };

    Vector grad(d);
    Matrix hess(d, d);
    std::vector<double> plus(static_cast<std::size_t>(d));
    SphereMaximum stencil_best = best;
    auto probe = [&](const Vector& z) {
      const Vector dir = at(z);
      const double v = objective(dir);
      if (v > stencil_best.value) stencil_best = {dir, v};
      return v;
    };

    for (Eigen::Index i = 0; i < d; ++i) {
      Vector z = Vector::Zero(d);
      z(i) = h;
      const double fp = probe(z);
      z(i) = -h;
      const double fm = probe(z);
      plus[static_cast<std::size_t>(i)] = fp;
      grad(i) = (fp - fm) / (2.0 * h);
      hess(i, i) = (fp - 2.0 * best.value + fm) / (h * h);
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i + 1; j < d; ++j) {
        Vector z = Vector::Zero(d);
        z(i) = h;
        z(j) = h;
        const double fij = probe(z);
        const double hij = (fij - plus[static_cast<std::size_t>(i)] - plus[static_cast<std::size_t>(j)] + best.value) / (h * h);
        hess(i, j) = hij;
        hess(j, i) = hij;
      }
    }

    Vector step;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hess);
    if (eig.info() == Eigen::Success && eig.eigenvalues().maxCoeff() < 0.0) {
      step = -hess.ldlt().solve(grad);
    } else {
      step = grad.normalized() * h;
      if (!step.allFinite()) step = Vector::Zero(d);
    }
    const double len = step.norm();
    if (len > spacing) step *= spacing / len;

    bool improved = false;
    Vector trial = step;
    for (int shrink = 0; shrink < 4 && trial.norm() > 0.0; ++shrink) {
      const Vector dir = at(trial);
      const double v = objective(dir);
      if (v > best.value && v >= stencil_best.value) {
        best = {dir, v};
        improved = true;
        break;
      }
      trial *= 0.5;
    }
    if (!improved && stencil_best.value > best.value) {
      best = stencil_best;
      improved = true;
    }
    const double moved = improved ? std::max(trial.norm(), kMinStep) : 0.0;
    if (!improved) {
      h /= 8.0;
    } else {
      h = std::clamp(moved / 2.0, kMinStep, h);
      if (moved < 1e-9) break;
    }
  }
  return best;
}

}  // namespace affineineq
