#include "affineineq/polytope.hpp"

#include "affineineq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace affineineq {

namespace {

double binomial(int m, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (m - k + i) / i;
  return b;
}

// Facet simplices of a polytope: for every facet, its distance to the origin
// and a list of (n-1)-simplices (segments or fan triangles) covering it.
struct Facet {
  double distance = 0.0;
  std::vector<Matrix> simplices;  // n x n, vertices as columns
};

std::vector<Facet> facets(const Matrix& normals, const Matrix& vertices) {
  const int n = static_cast<int>(normals.rows());
  if (n != 2 && n != 3) throw std::invalid_argument("polytope: exact facet integration needs n in {2, 3}");
  std::vector<Facet> out;
  for (Eigen::Index j = 0; j < normals.cols(); ++j) {
    const Vector a = normals.col(j);
    std::vector<Vector> pts;
    for (Eigen::Index k = 0; k < vertices.cols(); ++k) {
      const Vector x = vertices.col(k);
      if (std::abs(a.dot(x) - 1.0) <= 1e-9 * std::max(1.0, a.norm() * x.norm())) pts.push_back(x);
    }
    if (static_cast<int>(pts.size()) < n) continue;  // redundant constraint
    Facet f;
    f.distance = 1.0 / a.norm();
    Vector c = Vector::Zero(n);
    for (const auto& x : pts) c += x;
    c /= static_cast<double>(pts.size());
    // tangent frame of the facet
    const Vector nrm = a.normalized();
    Vector t1 = pts.front() - c;
    for (const auto& x : pts) {
      if ((x - c).norm() > t1.norm()) t1 = x - c;
    }
    t1 -= nrm.dot(t1) * nrm;
    t1.normalize();
    if (n == 2) {
      double lo = 0.0, hi = 0.0;
      for (const auto& x : pts) {
        lo = std::min(lo, t1.dot(x - c));
        hi = std::max(hi, t1.dot(x - c));
      }
      Matrix s(2, 2);
      s.col(0) = c + lo * t1;
      s.col(1) = c + hi * t1;
      f.simplices.push_back(s);
    } else {
      const Vector t2 = Eigen::Vector3d(nrm).cross(Eigen::Vector3d(t1));
      std::sort(pts.begin(), pts.end(), [&](const Vector& x, const Vector& y) {
        return std::atan2(t2.dot(x - c), t1.dot(x - c)) < std::atan2(t2.dot(y - c), t1.dot(y - c));
      });
      for (std::size_t k = 0; k < pts.size(); ++k) {
        Matrix s(3, 3);
        s.col(0) = c;
        s.col(1) = pts[k];
        s.col(2) = pts[(k + 1) % pts.size()];
        f.simplices.push_back(s);
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

double simplex_measure(const Matrix& s) {
  if (s.cols() == 2) return (s.col(1) - s.col(0)).norm();
  const Eigen::Vector3d e1 = s.col(1) - s.col(0);
  const Eigen::Vector3d e2 = s.col(2) - s.col(0);
  return 0.5 * e1.cross(e2).norm();
}

// int_0^1 |a + t (b - a)|^p t^k dt for k in {0, 1}, with x = a + t (b - a)
// of constant sign.
double ramp_piece(double a, double b, double p, int k) {
  const double d = b - a;
  const double top = std::max(std::abs(a), std::abs(b));
  if (top == 0.0) return 0.0;
  if (std::abs(d) < 1e-2 * top) {
    static const auto rule = gauss_legendre(20);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.first.size(); ++i) {
      const double t = 0.5 * (rule.first[i] + 1.0);
      acc += 0.5 * rule.second[i] * std::pow(std::abs(a + t * d), p) * (k ? t : 1.0);
    }
    return acc;
  }
  // antiderivatives in x: F0 = sgn(x)|x|^{p+1}/(p+1), F1 = |x|^{p+2}/(p+2)
  const auto F0 = [&](double x) { return std::copysign(std::pow(std::abs(x), p + 1.0), x) / (p + 1.0); };
  const auto F1 = [&](double x) { return std::pow(std::abs(x), p + 2.0) / (p + 2.0); };
  if (k == 0) return (F0(b) - F0(a)) / d;
  return (F1(b) - F1(a) - a * (F0(b) - F0(a))) / (d * d);
}

// int_0^1 |a + t (b - a)|^p t^k dt, split at the sign change.
double ramp(double a, double b, double p, int k) {
  if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
    const double t0 = a / (a - b);
    // on [0, t0]: t = t0 s; on [t0, 1]: t = t0 + (1 - t0) s
    const double first = std::pow(t0, k + 1) * ramp_piece(a, 0.0, p, k);
    double second = (1.0 - t0) * ramp_piece(0.0, b, p, 0);
    if (k) second = (1.0 - t0) * (t0 * ramp_piece(0.0, b, p, 0) + (1.0 - t0) * ramp_piece(0.0, b, p, 1));
    return first + second;
  }
  return ramp_piece(a, b, p, k);
}

// Mean of |y|^p over a segment or triangle whose vertices have the values
// l[0..count) of the linear function y.
double simplex_mean_power(double* l, int count, double p) {
  if (count == 2) return ramp(l[0], l[1], p, 0);
  std::sort(l, l + 3);
  const double span = l[2] - l[0];
  if (span <= 1e-15 * std::max(1.0, std::abs(l[0]))) return std::pow(std::abs(l[0]), p);
  // the values of a linear function on a triangle have a tent density on [l0, l2]
  return 2.0 * ((l[1] - l[0]) / span * ramp(l[0], l[1], p, 1) + (l[2] - l[1]) / span * ramp(l[2], l[1], p, 1));
}

}  // namespace

FacetSimplices facet_simplices(const Matrix& normals, const Matrix& vertices) {
  const int n = static_cast<int>(normals.rows());
  const auto fs = facets(normals, vertices);
  std::size_t count = 0;
  for (const Facet& f : fs) count += f.simplices.size();
  FacetSimplices out;
  out.n = n;
  out.points.resize(n, static_cast<Eigen::Index>(count) * n);
  out.weights.resize(static_cast<Eigen::Index>(count));
  Eigen::Index k = 0;
  for (const Facet& f : fs) {
    for (const Matrix& s : f.simplices) {
      out.points.middleCols(k * n, n) = s;
      out.weights(k) = f.distance * simplex_measure(s);
      ++k;
    }
  }
  return out;
}

double polytope_volume(const Matrix& normals, const Matrix& vertices) {
  return facet_simplices(normals, vertices).weights.sum() / static_cast<double>(normals.rows());
}

double polytope_moment(const FacetSimplices& facets, const Vector& v, double p) {
  const int n = facets.n;
  const Vector dots = facets.points.transpose() * v;
  double acc = 0.0;
  double l[3];
  for (Eigen::Index k = 0; k < facets.weights.size(); ++k) {
    for (int i = 0; i < n; ++i) l[i] = dots(k * n + i);
    acc += facets.weights(k) * simplex_mean_power(l, n, p);
  }
  return acc / (n + p);
}

double polytope_moment(const Matrix& normals, const Matrix& vertices, const Vector& v, double p) {
  return polytope_moment(facet_simplices(normals, vertices), v, p);
}

Matrix halfspace_vertices(const Matrix& normals) {
  const int n = static_cast<int>(normals.rows());
  const int m = static_cast<int>(normals.cols());
  if (m < n + 1) throw std::invalid_argument("halfspace_vertices: need at least n + 1 constraints");
  if (binomial(m, n) > 2e5) throw std::invalid_argument("halfspace_vertices: too many constraints");

  std::vector<Vector> found;
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  const Vector ones = Vector::Ones(n);

  for (;;) {
    Matrix sys(n, n);
    for (int i = 0; i < n; ++i) sys.row(i) = normals.col(idx[static_cast<std::size_t>(i)]).transpose();
    Eigen::FullPivLU<Matrix> lu(sys);
    if (lu.isInvertible()) {
      const Vector x = lu.solve(ones);
      const double slack = ((normals.transpose() * x).array() - 1.0).maxCoeff();
      if (slack <= 1e-9 * std::max(1.0, x.norm())) {
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const Vector& v) { return (v - x).norm() <= 1e-10 * std::max(1.0, x.norm()); });
        if (!dup) found.push_back(x);
      }
    }
    // next combination
    int k = n - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - n + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < n; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (static_cast<int>(found.size()) < n + 1) throw std::invalid_argument("halfspace_vertices: polytope is unbounded or degenerate");
  Matrix v(n, static_cast<Eigen::Index>(found.size()));
  for (std::size_t i = 0; i < found.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = found[i];
  return v;
}

double max_dot(const Matrix& points, const Vector& u) {
  return (points.transpose() * u).maxCoeff();
}

}  // namespace affineineq
