#pragma once

#include <vector>

#include "cbopt/linalg.hpp"

namespace cbopt::geo {

double unit_ball_volume(int dim);

// E = {x : (x - center)^T shape^{-1} (x - center) <= 1}, shape SPD.
struct Ellipsoid {
  Vec center;
  Mat shape;

  static Ellipsoid ball(Vec center, double radius);

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const;
  double mahalanobis_sq(const Vec& x) const;
  bool contains(const Vec& x, double tol = 1e-10) const;
  bool is_ball(double rel_tol = 1e-9) const;
  // Throws PreconditionError unless shape is symmetric and positive definite.
  void validate() const;
};

// {x : <normal, x> >= offset}; by convention the side a cut removes.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  double signed_distance(const Vec& x) const { return normal.dot(x) - offset; }
};

// d+1 vertex polyhedron: regular base, apex above the base hyperplane.
struct Pyramid {
  Vec apex;
  std::vector<Vec> base;

  int dim() const { return static_cast<int>(apex.size()); }
  Vec centroid() const;       // center of mass of the d+1 vertices
  Vec base_centroid() const;
  Vec axis() const;           // unit vector, apex toward base centroid
  double height() const;      // apex distance to the base hyperplane
  double base_circumradius() const;
  double apex_half_angle_cos() const;
};

// Reflection cone of a pyramid around its apex.
struct Cone {
  Vec apex;
  std::vector<Vec> generators;  // y - z_i

  // Nonnegative-combination feasibility of (x - apex) over the generators,
  // decided by nonnegative least squares to the given residual.
  bool contains(const Vec& x, double tol = 1e-12) const;
  // Unit vector the cone opens along (normalized generator mean).
  Vec opening_direction() const;
};

// min ||G b - v|| s.t. b >= 0 (Lawson-Hanson); returns the residual norm.
double nnls_residual(const Mat& generators, const Vec& v, Vec* solution = nullptr);

// d+1 points at distance r from `center`, pairwise equidistant, centroid at
// `center`. Orientation is fixed by a Helmert orthonormal frame.
std::vector<Vec> regular_simplex(const Vec& center, double r, int dim);

// Pyramid with apex `apex`, prescribed apex angle cos(phi) = c2/d, and base
// vertices z_i placed so apex - z_i is orthogonal to z_i - ball_center.
Pyramid build_pyramid(const Vec& apex, const Vec& ball_center, double c2);

Vec pyramid_center(const Pyramid& p);

Cone cone_of(const Pyramid& p);

// Inward halfspaces of the d+1 facets (simplex facet decomposition).
std::vector<Halfspace> pyramid_facets(const Pyramid& p);

struct CapCut {
  Halfspace halfspace;   // cap = ball ∩ halfspace, contained in the cone
  double alpha = 0.0;    // signed hyperplane distance from the ball center / R
  double psi = 0.0;      // half-angle of the circular cone inscribed in the cut cone
};

// Deepest hyperplane orthogonal to the cone's opening direction whose ball cap
// is contained in the cone. The cap is inscribed through the largest circular
// cone around the opening direction; exact when the cone axis passes through
// the ball center, conservative otherwise.
CapCut cap_halfspace_for_cone(const Cone& cone, const Ellipsoid& ball);

// Minimum-volume ellipsoid containing E minus the cap {x : <a,x> >= h}.
// `alpha` is the signed cut depth ((a.c - h)/sqrt(a^T A a)); the shallow-cut
// regime -1/d < alpha <= 0 is accepted.
Ellipsoid shallow_cut_update(const Ellipsoid& e, const Halfspace& cap, double alpha);

struct AffineMap {
  Mat linear;
  Vec offset;

  Vec operator()(const Vec& x) const { return linear * x + offset; }
};

struct IsotropicMap {
  AffineMap forward;  // sends the ellipsoid to the unit ball
  AffineMap inverse;
};

// Affine change of coordinates sending E to the unit ball.
IsotropicMap round_to_isotropic(const Ellipsoid& e);

// Image of an ellipsoid under an affine map.
Ellipsoid transform_ellipsoid(const Ellipsoid& e, const AffineMap& map);

}  // namespace cbopt::geo
