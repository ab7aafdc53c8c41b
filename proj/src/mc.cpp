#include "cbopt/mc.hpp"

#include <cmath>

#include "cbopt/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbopt::mc {

std::uint64_t containment_violations_serial(const Sampler& sample, const Predicate& inside,
                                            std::uint64_t n) {
  if (n == 0) throw PreconditionError("containment: need at least one sample");
  std::uint64_t violations = 0;
  for (std::uint64_t i = 0; i < n; ++i)
    if (!inside(sample(i))) ++violations;
  return violations;
}

std::uint64_t containment_violations(const Sampler& sample, const Predicate& inside,
                                     std::uint64_t n) {
  if (n == 0) throw PreconditionError("containment: need at least one sample");
  std::uint64_t violations = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : violations)
#endif
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    if (!inside(sample(static_cast<std::uint64_t>(i)))) ++violations;
  return violations;
}

Vec uniform_in_unit_ball(Rng& rng, int dim) {
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x[i] = rng.normal();
  const double norm = x.norm();
  if (norm == 0.0) return Vec::Zero(dim);
  const double radius = std::pow(rng.uniform01(), 1.0 / dim);
  return (radius / norm) * x;
}

Sampler ellipsoid_sampler(const geo::Ellipsoid& e, std::uint64_t seed) {
  const Mat l = e.shape.llt().matrixL();
  const Vec c = e.center;
  const int d = e.dim();
  return [l, c, d, seed](std::uint64_t i) {
    Rng rng = sample_stream(seed, i);
    return Vec(c + l * uniform_in_unit_ball(rng, d));
  };
}

namespace {

Sampler rejection_sampler(const geo::Ellipsoid& e, const geo::Halfspace& plane, bool keep_above,
                          std::uint64_t seed) {
  const Mat l = e.shape.llt().matrixL();
  const Vec c = e.center;
  const int d = e.dim();
  return [l, c, d, plane, keep_above, seed](std::uint64_t i) {
    Rng rng = sample_stream(seed, i);
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const Vec x = c + l * uniform_in_unit_ball(rng, d);
      const bool above = plane.signed_distance(x) >= 0.0;
      if (above == keep_above) return x;
    }
    throw PreconditionError("rejection sampler: acceptance region too small");
  };
}

}  // namespace

Sampler cap_sampler(const geo::Ellipsoid& e, const geo::Halfspace& cap, std::uint64_t seed) {
  return rejection_sampler(e, cap, true, seed);
}

Sampler ellipsoid_minus_cap_sampler(const geo::Ellipsoid& e, const geo::Halfspace& cap,
                                    std::uint64_t seed) {
  return rejection_sampler(e, cap, false, seed);
}

Sampler pyramid_sampler(const geo::Pyramid& p, std::uint64_t seed) {
  std::vector<Vec> vertices;
  vertices.push_back(p.apex);
  vertices.insert(vertices.end(), p.base.begin(), p.base.end());
  const int d = p.dim();
  return [vertices, d, seed](std::uint64_t i) {
    Rng rng = sample_stream(seed, i);
    Vec x = Vec::Zero(d);
    double total = 0.0;
    for (const Vec& v : vertices) {
      const double w = -std::log(rng.uniform01());
      x += w * v;
      total += w;
    }
    return Vec(x / total);
  };
}

}  // namespace cbopt::mc
