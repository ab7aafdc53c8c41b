#include "cbopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbopt/errors.hpp"

namespace cbopt::geo {

double unit_ball_volume(int dim) {
  return std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

Ellipsoid Ellipsoid::ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("ball: radius must be > 0");
  const int d = static_cast<int>(center.size());
  return {std::move(center), radius * radius * Mat::Identity(d, d)};
}

double Ellipsoid::volume() const {
  return unit_ball_volume(dim()) * std::sqrt(shape.determinant());
}

double Ellipsoid::mahalanobis_sq(const Vec& x) const {
  const Vec diff = x - center;
  return diff.dot(shape.llt().solve(diff));
}

bool Ellipsoid::contains(const Vec& x, double tol) const {
  return mahalanobis_sq(x) <= 1.0 + tol;
}

bool Ellipsoid::is_ball(double rel_tol) const {
  const double r_sq = shape(0, 0);
  return (shape - r_sq * Mat::Identity(dim(), dim())).norm() <= rel_tol * std::abs(r_sq);
}

void Ellipsoid::validate() const {
  if (shape.rows() != dim() || shape.cols() != dim())
    throw PreconditionError("ellipsoid: shape size mismatch");
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + shape.cwiseAbs().maxCoeff()))
    throw PreconditionError("ellipsoid: shape not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(shape);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw PreconditionError("ellipsoid: shape not positive definite");
}

Vec Pyramid::centroid() const {
  Vec c = apex;
  for (const Vec& z : base) c += z;
  return c / static_cast<double>(base.size() + 1);
}

Vec Pyramid::base_centroid() const {
  Vec c = Vec::Zero(dim());
  for (const Vec& z : base) c += z;
  return c / static_cast<double>(base.size());
}

Vec Pyramid::axis() const {
  Vec a = base_centroid() - apex;
  const double n = a.norm();
  if (n == 0.0) throw GeometricFailure("pyramid: apex coincides with base centroid");
  return a / n;
}

double Pyramid::height() const { return (base_centroid() - apex).norm(); }

double Pyramid::base_circumradius() const {
  const Vec q = base_centroid();
  return (base.front() - q).norm();
}

double Pyramid::apex_half_angle_cos() const {
  const Vec u = axis();
  const Vec edge = base.front() - apex;
  return edge.dot(u) / edge.norm();
}

double nnls_residual(const Mat& generators, const Vec& v, Vec* solution) {
  const int n = static_cast<int>(generators.cols());
  Vec beta = Vec::Zero(n);
  std::vector<bool> passive(n, false);
  const double scale = std::max(1.0, v.norm());
  const double w_tol = 1e-13 * scale * std::max(1.0, generators.cwiseAbs().maxCoeff());

  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Vec w = generators.transpose() * (v - generators * beta);
    int best = -1;
    double best_w = w_tol;
    for (int i = 0; i < n; ++i) {
      if (!passive[i] && w[i] > best_w) {
        best_w = w[i];
        best = i;
      }
    }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (passive[i]) idx.push_back(i);
      Mat sub(generators.rows(), idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) sub.col(k) = generators.col(idx[k]);
      const Vec z = sub.colPivHouseholderQr().solve(v);

      double min_z = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < idx.size(); ++k) min_z = std::min(min_z, z[k]);
      if (min_z > 0.0) {
        beta.setZero();
        for (std::size_t k = 0; k < idx.size(); ++k) beta[idx[k]] = z[k];
        break;
      }
      double step = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (z[k] <= 0.0) {
          const double b = beta[idx[k]];
          step = std::min(step, b / (b - z[k]));
        }
      }
      Vec full_z = Vec::Zero(n);
      for (std::size_t k = 0; k < idx.size(); ++k) full_z[idx[k]] = z[k];
      beta += step * (full_z - beta);
      for (int i = 0; i < n; ++i) {
        if (passive[i] && beta[i] <= 1e-14 * scale) {
          beta[i] = 0.0;
          passive[i] = false;
        }
      }
    }
  }
  if (solution) *solution = beta;
  return (generators * beta - v).norm();
}

bool Cone::contains(const Vec& x, double tol) const {
  const Vec v = x - apex;
  const double vn = v.norm();
  if (vn == 0.0) return true;
  const int d = static_cast<int>(apex.size());
  Mat g(d, generators.size());
  for (std::size_t i = 0; i < generators.size(); ++i) g.col(i) = generators[i];
  return nnls_residual(g, v) <= tol * std::max(1.0, vn);
}

Vec Cone::opening_direction() const {
  Vec u = Vec::Zero(apex.size());
  for (const Vec& g : generators) u += g;
  const double n = u.norm();
  if (n <= 1e-14) throw GeometricFailure("cone: degenerate opening direction");
  return u / n;
}

std::vector<Vec> regular_simplex(const Vec& center, double r, int dim) {
  if (dim < 1) throw PreconditionError("regular_simplex: dim must be >= 1");
  if (!(r > 0.0)) throw PreconditionError("regular_simplex: radius must be > 0");
  if (center.size() != dim) throw PreconditionError("regular_simplex: center has wrong size");

  // Helmert frame: vertex i is the i-th column of the d x (d+1) matrix with
  // rows u_k = (1,...,1,-k,0,...,0)/sqrt(k(k+1)), scaled to circumradius r.
  const double scale = r * std::sqrt((dim + 1.0) / dim);
  std::vector<Vec> vertices(dim + 1, center);
  for (int k = 1; k <= dim; ++k) {
    const double denom = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1.0));
    for (int i = 0; i <= dim; ++i) {
      double u_ki = 0.0;
      if (i < k) u_ki = denom;
      else if (i == k) u_ki = -static_cast<double>(k) * denom;
      vertices[i][k - 1] += scale * u_ki;
    }
  }
  return vertices;
}

Pyramid build_pyramid(const Vec& apex, const Vec& ball_center, double c2) {
  const int d = static_cast<int>(apex.size());
  if (d < 2) throw PreconditionError("build_pyramid: dimension must be >= 2");
  const double cos_phi = c2 / d;
  if (!(cos_phi > 0.0 && cos_phi < 1.0))
    throw PreconditionError("build_pyramid: need 0 < c2/d < 1");

  const Vec offset = apex - ball_center;
  const double r_pi = offset.norm();
  if (r_pi <= 1e-14) throw GeometricFailure("build_pyramid: apex coincides with ball center");
  const Vec u = offset / r_pi;

  const double sin_phi = std::sqrt(1.0 - cos_phi * cos_phi);
  // Base plane orthogonal to u; see the right-triangle identities checked in tests:
  // |z - x0| = r sin(phi), |apex - z| = r cos(phi), height = r cos^2(phi).
  const Vec base_center = ball_center + (sin_phi * sin_phi) * offset;
  const double base_radius = r_pi * sin_phi * cos_phi;

  // Deterministic orthonormal frame of the axis complement: orthonormalize the
  // coordinate axes against u, skipping the axis most aligned with it.
  int skip = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(u[i]) > std::abs(u[skip])) skip = i;
  std::vector<Vec> frame;
  frame.reserve(d - 1);
  for (int i = 0; i < d; ++i) {
    if (i == skip) continue;
    Vec cand = Vec::Unit(d, i);
    cand -= cand.dot(u) * u;
    for (const Vec& f : frame) cand -= cand.dot(f) * f;
    const double n = cand.norm();
    if (n <= 1e-12) throw GeometricFailure("build_pyramid: frame construction degenerate");
    frame.push_back(cand / n);
  }

  // Base vertices: regular (d-1)-simplex of circumradius base_radius in the
  // frame coordinates. For d = 2 this degenerates to the two points +-radius.
  Pyramid p;
  p.apex = apex;
  if (d == 2) {
    p.base = {base_center + base_radius * frame[0], base_center - base_radius * frame[0]};
    return p;
  }
  Vec origin = Vec::Zero(d - 1);
  const std::vector<Vec> base_coords = regular_simplex(origin, base_radius, d - 1);
  p.base.reserve(d);
  for (const Vec& bc : base_coords) {
    Vec z = base_center;
    for (int k = 0; k < d - 1; ++k) z += bc[k] * frame[k];
    p.base.push_back(std::move(z));
  }
  return p;
}

Vec pyramid_center(const Pyramid& p) { return p.centroid(); }

Cone cone_of(const Pyramid& p) {
  Cone k;
  k.apex = p.apex;
  k.generators.reserve(p.base.size());
  for (const Vec& z : p.base) k.generators.push_back(p.apex - z);
  return k;
}

namespace {

// Unit normal of the hyperplane spanned by the given directions (through the
// origin); the kernel of their transpose.
Vec hyperplane_normal(const std::vector<Vec>& directions, int dim) {
  Mat m(directions.size(), dim);
  for (std::size_t i = 0; i < directions.size(); ++i) m.row(i) = directions[i].transpose();
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  Vec n = svd.matrixV().col(dim - 1);
  if (directions.size() == static_cast<std::size_t>(dim) - 1 &&
      svd.singularValues().minCoeff() <= 1e-12 * svd.singularValues().maxCoeff()) {
    throw GeometricFailure("hyperplane_normal: directions are rank deficient");
  }
  return n;
}

}  // namespace

std::vector<Halfspace> pyramid_facets(const Pyramid& p) {
  const int d = p.dim();
  std::vector<Vec> vertices;
  vertices.push_back(p.apex);
  vertices.insert(vertices.end(), p.base.begin(), p.base.end());

  std::vector<Halfspace> facets;
  facets.reserve(vertices.size());
  for (std::size_t j = 0; j < vertices.size(); ++j) {
    std::vector<Vec> in_plane;
    Vec anchor;
    bool have_anchor = false;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i == j) continue;
      if (!have_anchor) {
        anchor = vertices[i];
        have_anchor = true;
      } else {
        in_plane.push_back(vertices[i] - anchor);
      }
    }
    Vec n = hyperplane_normal(in_plane, d);
    if (n.dot(vertices[j] - anchor) < 0.0) n = -n;
    facets.push_back({n, n.dot(anchor)});
  }
  return facets;
}

CapCut cap_halfspace_for_cone(const Cone& cone, const Ellipsoid& ball) {
  const int d = static_cast<int>(cone.apex.size());
  if (d < 2) throw PreconditionError("cap_halfspace_for_cone: dimension must be >= 2");
  if (!ball.is_ball()) throw PreconditionError("cap_halfspace_for_cone: enclosing body must be a ball");
  const double radius = std::sqrt(ball.shape(0, 0));
  const Vec to_apex = cone.apex - ball.center;
  if (to_apex.norm() >= radius)
    throw GeometricFailure("cap_halfspace_for_cone: cone apex not inside the ball");

  const Vec u = cone.opening_direction();

  // Largest circular cone around u inscribed in the polyhedral cone: its
  // half-angle is the smallest angle from u to any facet, one small
  // least-squares kernel problem per facet.
  double sin_psi = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cone.generators.size(); ++j) {
    std::vector<Vec> others;
    others.reserve(cone.generators.size() - 1);
    for (std::size_t i = 0; i < cone.generators.size(); ++i)
      if (i != j) others.push_back(cone.generators[i]);
    Vec n = hyperplane_normal(others, d);
    const double toward = n.dot(cone.generators[j]);
    if (std::abs(toward) <= 1e-13) throw GeometricFailure("cap_halfspace_for_cone: degenerate facet");
    if (toward < 0.0) n = -n;
    const double s = n.dot(u);
    if (s <= 0.0) throw GeometricFailure("cap_halfspace_for_cone: opening direction not interior");
    sin_psi = std::min(sin_psi, s);
  }
  sin_psi = std::min(sin_psi, 1.0);
  const double psi = std::asin(sin_psi);
  const double cos_psi = std::cos(psi);

  // Shallowest hyperplane whose cap rim stays inside the circular cone. With
  // the apex on the cap axis the rim condition is exact; an off-axis apex
  // enters through the conservative offset rho.
  const double along = to_apex.dot(u);
  const double rho = (to_apex - along * u).norm();
  const double q = along + (sin_psi > 0.0 ? rho * cos_psi / sin_psi : 0.0);
  if (q >= radius)
    throw GeometricFailure("cap_halfspace_for_cone: cone too narrow, no contained cap");
  const double q_sin = q * sin_psi;
  const double alpha =
      (q * sin_psi * sin_psi + sin_psi * cos_psi * std::sqrt(radius * radius - q_sin * q_sin)) /
      radius;

  CapCut cut;
  cut.halfspace = {u, u.dot(ball.center) + alpha * radius};
  cut.alpha = alpha;
  cut.psi = psi;
  return cut;
}

Ellipsoid shallow_cut_update(const Ellipsoid& e, const Halfspace& cap, double alpha) {
  const int d = e.dim();
  if (d < 2) throw PreconditionError("shallow_cut_update: dimension must be >= 2");
  if (!(alpha > -1.0 / d) || alpha > 0.0)
    throw GeometricFailure("shallow_cut_update: alpha outside (-1/d, 0], update would not shrink");

  const Vec& a = cap.normal;
  const double a_scale = std::sqrt(a.dot(e.shape * a));
  if (a_scale <= 0.0) throw PreconditionError("shallow_cut_update: degenerate cut direction");

  // The removed side is {a.x >= offset}; consistency between the halfspace and
  // the stated depth guards against sign mix-ups at call sites.
  const double implied_alpha = (a.dot(e.center) - cap.offset) / a_scale;
  if (std::abs(implied_alpha - alpha) > 1e-6)
    throw PreconditionError("shallow_cut_update: alpha inconsistent with halfspace");

  const double dd = static_cast<double>(d);
  const Vec b = e.shape * a / a_scale;
  const double tau = (1.0 + dd * alpha) / (dd + 1.0);
  const double delta = dd * dd / (dd * dd - 1.0) * (1.0 - alpha * alpha);
  const double sigma = 2.0 * (1.0 + dd * alpha) / ((dd + 1.0) * (1.0 + alpha));

  Ellipsoid out;
  out.center = e.center - tau * b;
  out.shape = delta * (e.shape - sigma * (b * b.transpose()));
  out.shape = 0.5 * (out.shape + out.shape.transpose());
  return out;
}

IsotropicMap round_to_isotropic(const Ellipsoid& e) {
  e.validate();
  Eigen::SelfAdjointEigenSolver<Mat> es(e.shape);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw ConditioningError("round_to_isotropic: shape condition number too large");

  const Mat l = e.shape.llt().matrixL();
  const Mat l_inv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(e.dim(), e.dim()));

  IsotropicMap map;
  map.forward = {l_inv, -(l_inv * e.center)};
  map.inverse = {l, e.center};
  return map;
}

Ellipsoid transform_ellipsoid(const Ellipsoid& e, const AffineMap& map) {
  Ellipsoid out;
  out.center = map(e.center);
  out.shape = map.linear * e.shape * map.linear.transpose();
  out.shape = 0.5 * (out.shape + out.shape.transpose());
  return out;
}

}  // namespace cbopt::geo
