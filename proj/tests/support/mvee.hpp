#pragma once

// Minimum-volume enclosing ellipsoid of a point set (Khachiyan's barycentric
// coordinate descent). Test-only oracle, independent of the closed-form
// ellipsoid updates it is used to cross-check.

#include <vector>

#include "cbopt/geometry.hpp"
#include "cbopt/linalg.hpp"

namespace cbopt::test_support {

inline geo::Ellipsoid mvee(const std::vector<Vec>& points, double tol = 1e-7,
                           int max_iter = 100000) {
  const int d = static_cast<int>(points.front().size());
  const int m = static_cast<int>(points.size());

  Mat lifted(d + 1, m);
  for (int i = 0; i < m; ++i) {
    lifted.col(i).head(d) = points[i];
    lifted(d, i) = 1.0;
  }

  Vec u = Vec::Constant(m, 1.0 / m);
  for (int iter = 0; iter < max_iter; ++iter) {
    const Mat x = lifted * u.asDiagonal() * lifted.transpose();
    const Mat x_inv = x.inverse();
    int best = 0;
    double kappa_max = 0.0;
    for (int i = 0; i < m; ++i) {
      const double kappa = lifted.col(i).dot(x_inv * lifted.col(i));
      if (kappa > kappa_max) {
        kappa_max = kappa;
        best = i;
      }
    }
    if (kappa_max - d - 1 <= tol) break;
    const double step = (kappa_max - d - 1) / ((d + 1) * (kappa_max - 1));
    u *= (1.0 - step);
    u[best] += step;
  }

  Mat p(d, m);
  for (int i = 0; i < m; ++i) p.col(i) = points[i];
  geo::Ellipsoid e;
  e.center = p * u;
  const Mat scatter = p * u.asDiagonal() * p.transpose() - e.center * e.center.transpose();
  e.shape = static_cast<double>(d) * scatter;
  e.shape = 0.5 * (e.shape + e.shape.transpose());
  return e;
}

}  // namespace cbopt::test_support
