#include <doctest.h>

#include <cmath>

#include "cbopt/errors.hpp"
#include "cbopt/geometry.hpp"
#include "cbopt/mc.hpp"
#include "cbopt/rng.hpp"
#include "support/mvee.hpp"

using namespace cbopt;
using namespace cbopt::geo;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

double inradius(const std::vector<Vec>& vertices) {
  // Min distance from the centroid to the facet hyperplanes.
  Pyramid as_simplex;
  as_simplex.apex = vertices.front();
  as_simplex.base.assign(vertices.begin() + 1, vertices.end());
  Vec centroid = Vec::Zero(vertices.front().size());
  for (const Vec& v : vertices) centroid += v;
  centroid /= static_cast<double>(vertices.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& facet : pyramid_facets(as_simplex))
    best = std::min(best, facet.signed_distance(centroid));
  return best;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("regular simplex in one dimension") {
    const auto v = regular_simplex(vec1(0.5), 0.25, 1);
    REQUIRE(v.size() == 2);
    const double lo = std::min(v[0][0], v[1][0]);
    const double hi = std::max(v[0][0], v[1][0]);
    CHECK(lo == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(hi == doctest::Approx(0.75).epsilon(1e-15));
  }

  TEST_CASE("equilateral triangle on the unit circle") {
    const auto v = regular_simplex(Vec::Zero(2), 1.0, 2);
    REQUIRE(v.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(v[i].norm() == doctest::Approx(1.0).epsilon(1e-14));
      for (std::size_t j = i + 1; j < 3; ++j)
        CHECK((v[i] - v[j]).norm() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    }
    CHECK((v[0] + v[1] + v[2]).norm() < 1e-14);
  }

  TEST_CASE("simplex inradius equals r/d") {
    for (int d = 2; d <= 6; ++d) {
      const double r = 0.37;
      Vec center = Vec::Constant(d, -0.1);
      const auto v = regular_simplex(center, r, d);
      CHECK(inradius(v) == doctest::Approx(r / d).epsilon(1e-10));
    }
  }

  TEST_CASE("pyramid construction identities") {
    for (int d : {2, 3, 5}) {
      for (double c2 : {1.0 / 32.0, 0.5}) {
        const double cos_phi = c2 / d;
        const double sin_phi = std::sqrt(1.0 - cos_phi * cos_phi);
        Rng rng(91 + d);
        Vec x0(d), apex(d);
        for (int i = 0; i < d; ++i) {
          x0[i] = rng.uniform(-0.2, 0.2);
          apex[i] = rng.uniform(-1.0, 1.0);
        }
        const double r_pi = (apex - x0).norm();
        const Pyramid p = build_pyramid(apex, x0, c2);
        REQUIRE(static_cast<int>(p.base.size()) == d);

        for (const Vec& z : p.base) {
          CHECK(std::abs((apex - z).dot(z - x0)) < 1e-12 * r_pi * r_pi);  // right angle
          CHECK((z - x0).norm() == doctest::Approx(r_pi * sin_phi).epsilon(1e-12));
          CHECK((apex - z).norm() == doctest::Approx(r_pi * cos_phi).epsilon(1e-12));
        }
        CHECK(p.height() == doctest::Approx(r_pi * cos_phi * cos_phi).epsilon(1e-9));
        CHECK(p.base_circumradius() ==
              doctest::Approx(r_pi * sin_phi * cos_phi).epsilon(1e-10));
        CHECK((p.base_centroid() - (x0 + sin_phi * sin_phi * (apex - x0))).norm() < 1e-12);
        CHECK(p.apex_half_angle_cos() == doctest::Approx(cos_phi).epsilon(1e-10));

        // Base is regular and lies in the hyperplane orthogonal to the axis.
        const Vec axis = (apex - x0) / r_pi;
        for (std::size_t i = 0; i < p.base.size(); ++i) {
          CHECK(std::abs((p.base[i] - p.base_centroid()).dot(axis)) < 1e-12);
          for (std::size_t j = i + 1; j < p.base.size(); ++j) {
            const double expect =
                r_pi * sin_phi * cos_phi * std::sqrt(2.0 * d / (d - 1.0));
            CHECK((p.base[i] - p.base[j]).norm() == doctest::Approx(expect).epsilon(1e-9));
          }
        }
      }
    }
  }

  TEST_CASE("pyramid height at d=2, c2=1/32") {
    const Pyramid p = build_pyramid(Vec::Unit(2, 0), Vec::Zero(2), 1.0 / 32.0);
    CHECK(p.height() == doctest::Approx(1.0 / 4096.0).epsilon(1e-12));
  }

  TEST_CASE("chained pyramids shrink apex distance by sin(phi)") {
    for (int d : {2, 4}) {
      const double c2 = 1.0 / 32.0;
      const double cos_phi = c2 / d;
      const double sin_phi = std::sqrt(1.0 - cos_phi * cos_phi);
      const double r = 0.005;
      Vec apex = Vec::Zero(d);
      apex[d - 1] = r;
      for (int k = 1; k <= 6; ++k) {
        const double expect = r * std::pow(sin_phi, k - 1);
        CHECK(apex.norm() == doctest::Approx(expect).epsilon(1e-11));
        const Pyramid p = build_pyramid(apex, Vec::Zero(d), c2);
        apex = p.base[k % d];  // any base vertex continues the chain
      }
    }
  }

  TEST_CASE("pyramid center and inscribed ball") {
    const Pyramid tri{vec2(0.0, 1.0), {vec2(-0.4, 0.0), vec2(0.4, 0.0)}};
    CHECK((pyramid_center(tri) - vec2(0.0, 1.0 / 3.0)).norm() < 1e-15);

    for (int d : {2, 3, 4}) {
      const double c2 = 1.0 / 32.0;
      Vec apex = Vec::Constant(d, 0.3 / std::sqrt(d));
      const Pyramid p = build_pyramid(apex, Vec::Zero(d), c2);
      const Vec center = pyramid_center(p);

      // Distance to the base plane is height/(d+1).
      const auto facets = pyramid_facets(p);
      double base_dist = std::numeric_limits<double>::infinity();
      double min_dist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < facets.size(); ++i) {
        const double dist = facets[i].signed_distance(center);
        CHECK(dist > 0.0);  // centroid is interior
        min_dist = std::min(min_dist, dist);
        // The base facet is the one not containing the apex.
        if (std::abs(facets[i].signed_distance(p.apex)) > 1e-12) base_dist = dist;
      }
      CHECK(base_dist == doctest::Approx(p.height() / (d + 1)).epsilon(1e-9));

      const double cos_phi = c2 / d;
      const double r_pi = apex.norm();
      CHECK(min_dist >= r_pi * cos_phi * cos_phi / (d + 1) * (1.0 - 1e-9));
    }
  }

  TEST_CASE("cone membership") {
    const Pyramid p = build_pyramid(vec2(0.0, 0.5), Vec::Zero(2), 0.5);
    const Cone cone = cone_of(p);
    REQUIRE(cone.generators.size() == 2);

    CHECK(cone.contains(p.apex + cone.generators[0]));  // generator ray
    CHECK(!cone.contains(p.base[0]));                   // needs lambda < 0
    Vec mean_dir = 0.5 * (cone.generators[0] + cone.generators[1]);
    CHECK(cone.contains(p.apex + 2.0 * mean_dir));      // uniform combination
    CHECK(cone.contains(p.apex));                       // apex itself (closure)
    CHECK(!cone.contains(p.apex - mean_dir));           // reflected direction

    // Step past the generator ray, away from the cone interior.
    Vec outward(2);
    outward << cone.generators[0][1], -cone.generators[0][0];
    if (outward.dot(mean_dir) > 0.0) outward = -outward;
    CHECK(!cone.contains(p.apex + cone.generators[0] + 0.3 * outward));
  }

  TEST_CASE("nnls residual solves small systems") {
    Mat g(2, 2);
    g << 1.0, 0.0, 0.0, 1.0;
    Vec v(2);
    v << 0.3, 0.7;
    Vec beta;
    CHECK(nnls_residual(g, v, &beta) < 1e-14);
    CHECK(beta[0] == doctest::Approx(0.3));
    v << -0.5, 1.0;
    CHECK(nnls_residual(g, v) == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("cap for a nearly degenerate half-space cone") {
    // Two almost antipodal generators; the inscribed circular cone widens to a
    // half-space and the cap hyperplane moves to the center.
    Cone cone;
    cone.apex = Vec::Zero(2);
    cone.generators = {vec2(1e-9, 1.0), vec2(1e-9, -1.0)};
    const Ellipsoid ball = Ellipsoid::ball(Vec::Zero(2), 1.0);
    const CapCut cut = cap_halfspace_for_cone(cone, ball);
    CHECK(std::abs(cut.alpha) < 1e-8);
    CHECK(std::abs(cut.halfspace.offset) < 1e-8);
  }

  TEST_CASE("inscribed circular cone matches the closed form on regular pyramids") {
    for (int d : {2, 3, 4, 6}) {
      for (double c2 : {1.0 / 32.0, 0.5}) {
        Rng rng(5 + d);
        Vec apex(d);
        for (int i = 0; i < d; ++i) apex[i] = rng.normal();
        apex *= 0.01 / apex.norm();
        const Pyramid p = build_pyramid(apex, Vec::Zero(d), c2);
        const CapCut cut =
            cap_halfspace_for_cone(cone_of(p), Ellipsoid::ball(Vec::Zero(d), 1.0));
        const double expect_cot = (d - 1) * p.height() / p.base_circumradius();
        CHECK(1.0 / std::tan(cut.psi) == doctest::Approx(expect_cot).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("cap is contained in the cone") {
    for (int d : {2, 3}) {
      Rng rng(40 + d);
      const Ellipsoid ball = Ellipsoid::ball(Vec::Zero(d), 1.0);
      for (int rep = 0; rep < 5; ++rep) {
        Vec apex(d);
        for (int i = 0; i < d; ++i) apex[i] = rng.normal();
        apex *= rng.uniform(0.002, 0.008) / apex.norm();
        const Pyramid p = build_pyramid(apex, Vec::Zero(d), 1.0 / 32.0);
        const Cone cone = cone_of(p);
        const CapCut cut = cap_halfspace_for_cone(cone, ball);
        const auto violations = mc::containment_violations(
            mc::cap_sampler(ball, cut.halfspace, 70 + rep),
            [&](const Vec& x) { return cone.contains(x, 1e-12); }, 10000);
        CHECK(violations == 0);
      }
    }
  }

  TEST_CASE("cap construction rejects an apex outside the ball") {
    const Pyramid p = build_pyramid(vec2(0.0, 2.0), Vec::Zero(2), 0.5);
    CHECK_THROWS_AS(cap_halfspace_for_cone(cone_of(p), Ellipsoid::ball(Vec::Zero(2), 1.0)),
                    GeometricFailure);
  }

  TEST_CASE("central cut volume ratio against the MVEE oracle, d=2") {
    const Ellipsoid ball = Ellipsoid::ball(Vec::Zero(2), 1.0);
    const Halfspace cap{vec2(1.0, 0.0), 0.0};
    const Ellipsoid next = shallow_cut_update(ball, cap, 0.0);
    const double ratio = std::sqrt(next.shape.determinant() / ball.shape.determinant());
    CHECK(ratio == doctest::Approx(4.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-12));  // 0.7698

    // Direct minimum-volume ellipsoid over the kept region's extreme points.
    std::vector<Vec> arc;
    for (int i = 0; i <= 2000; ++i) {
      const double theta = M_PI / 2.0 + M_PI * i / 2000.0;
      arc.push_back(vec2(std::cos(theta), std::sin(theta)));
    }
    const Ellipsoid direct = test_support::mvee(arc, 1e-9);
    CHECK(std::sqrt(direct.shape.determinant()) ==
          doctest::Approx(std::sqrt(next.shape.determinant())).epsilon(5e-3));
    CHECK((direct.center - next.center).norm() < 5e-3);
  }

  TEST_CASE("shallow cut at alpha = -1/(4(d+1))") {
    for (int d = 2; d <= 6; ++d) {
      const double alpha = -1.0 / (4.0 * (d + 1));
      const Ellipsoid ball = Ellipsoid::ball(Vec::Zero(d), 1.0);
      const Halfspace cap{Vec::Unit(d, 0), -alpha};  // removed side beyond the center
      const Ellipsoid next = shallow_cut_update(ball, cap, alpha);
      const double ratio = std::sqrt(next.shape.determinant() / ball.shape.determinant());
      CHECK(ratio <= std::exp(-1.0 / (4.0 * (d + 1))));
      CHECK(ratio > 0.0);

      const auto violations = mc::containment_violations(
          mc::ellipsoid_minus_cap_sampler(ball, cap, 123 + d),
          [&](const Vec& x) { return next.contains(x, 1e-10); }, 20000);
      CHECK(violations == 0);
    }
  }

  TEST_CASE("shallow cut on a general ellipsoid keeps containment") {
    Rng rng(17);
    for (int rep = 0; rep < 3; ++rep) {
      const int d = 3;
      Mat g(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
      Ellipsoid e;
      e.shape = g * g.transpose() + 0.5 * Mat::Identity(d, d);
      e.center = Vec::Constant(d, 0.3);
      Vec a(d);
      for (int i = 0; i < d; ++i) a[i] = rng.normal();
      a.normalize();
      const double alpha = -0.05;
      const double offset = a.dot(e.center) - alpha * std::sqrt(a.dot(e.shape * a));
      const Halfspace cap{a, offset};
      const Ellipsoid next = shallow_cut_update(e, cap, alpha);
      next.validate();
      CHECK(next.volume() < e.volume());
      const auto violations = mc::containment_violations(
          mc::ellipsoid_minus_cap_sampler(e, cap, 9 + rep),
          [&](const Vec& x) { return next.contains(x, 1e-10); }, 20000);
      CHECK(violations == 0);
    }
  }

  TEST_CASE("shallow cut validates alpha") {
    const Ellipsoid ball = Ellipsoid::ball(Vec::Zero(2), 1.0);
    CHECK_THROWS_AS(shallow_cut_update(ball, {vec2(1, 0), -0.1}, 0.1), GeometricFailure);
    CHECK_THROWS_AS(shallow_cut_update(ball, {vec2(1, 0), 0.6}, -0.6), GeometricFailure);
    // Inconsistent halfspace/alpha pair.
    CHECK_THROWS_AS(shallow_cut_update(ball, {vec2(1, 0), 0.3}, -0.05), PreconditionError);
  }

  TEST_CASE("volume never grows over the valid alpha range") {
    for (int d : {2, 4}) {
      const Ellipsoid ball = Ellipsoid::ball(Vec::Zero(d), 1.0);
      for (double alpha : {0.0, -0.01, -0.1, -1.0 / (2.0 * d) , -(1.0 - 1e-6) / d}) {
        if (!(alpha > -1.0 / d)) continue;
        const Halfspace cap{Vec::Unit(d, 0), -alpha};
        const Ellipsoid next = shallow_cut_update(ball, cap, alpha);
        next.validate();
        CHECK(next.volume() <= ball.volume() * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("isotropic rounding") {
    SUBCASE("unit ball maps to itself") {
      const auto map = round_to_isotropic(Ellipsoid::ball(Vec::Zero(3), 1.0));
      CHECK((map.forward.linear - Mat::Identity(3, 3)).norm() < 1e-14);
      CHECK(map.forward.offset.norm() < 1e-14);
    }
    SUBCASE("ball of radius 2 at (1,0)") {
      const auto map = round_to_isotropic(Ellipsoid::ball(vec2(1.0, 0.0), 2.0));
      const Vec image = map.forward(vec2(3.0, 0.0));
      CHECK((image - vec2(1.0, 0.0)).norm() < 1e-14);
      CHECK(map.forward(vec2(1.0, 0.0)).norm() < 1e-14);
    }
    SUBCASE("random SPD round trip") {
      Rng rng(6);
      Mat g(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = rng.normal();
      Ellipsoid e;
      e.shape = g * g.transpose() + 0.1 * Mat::Identity(4, 4);
      e.center = Vec::Constant(4, -0.7);
      const auto map = round_to_isotropic(e);
      for (int rep = 0; rep < 100; ++rep) {
        Vec x(4);
        for (int i = 0; i < 4; ++i) x[i] = rng.uniform(-2.0, 2.0);
        CHECK((map.inverse(map.forward(x)) - x).norm() < 1e-10);
      }
      // The ellipsoid itself lands on the unit ball.
      const Ellipsoid image = transform_ellipsoid(e, map.forward);
      CHECK((image.shape - Mat::Identity(4, 4)).norm() < 1e-10);
      CHECK(image.center.norm() < 1e-10);
    }
    SUBCASE("conditioning error") {
      Ellipsoid e;
      e.center = vec2(0.0, 0.0);
      e.shape = Mat::Zero(2, 2);
      e.shape(0, 0) = 1.0;
      e.shape(1, 1) = 1e-14;
      CHECK_THROWS_AS(round_to_isotropic(e), ConditioningError);
    }
  }

  TEST_CASE("apex perturbation moves base vertices proportionally") {
    const int d = 3;
    Vec apex(d);
    apex << 0.21, -0.13, 0.08;  // generic direction, away from frame ties
    const Pyramid p = build_pyramid(apex, Vec::Zero(d), 0.5);
    for (double delta : {1e-6, 1e-8}) {
      Vec apex2 = apex;
      apex2[0] += delta;
      const Pyramid q = build_pyramid(apex2, Vec::Zero(d), 0.5);
      for (std::size_t i = 0; i < p.base.size(); ++i)
        CHECK((p.base[i] - q.base[i]).norm() <= 10.0 * delta);
    }
  }

  TEST_CASE("ellipsoid volume formula") {
    CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
    const Ellipsoid e = Ellipsoid::ball(Vec::Zero(2), 2.0);
    CHECK(e.volume() == doctest::Approx(4.0 * M_PI));
  }
}
