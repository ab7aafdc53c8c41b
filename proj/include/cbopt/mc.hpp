#pragma once

#include <cstdint>
#include <functional>

#include "cbopt/geometry.hpp"
#include "cbopt/linalg.hpp"
#include "cbopt/rng.hpp"

namespace cbopt::mc {

// Index-deterministic sampler: sample i depends only on (seed, i), so serial
// and parallel sweeps see the same points.
using Sampler = std::function<Vec(std::uint64_t)>;
using Predicate = std::function<bool(const Vec&)>;

// Number of sampled points failing the predicate. The OpenMP path partitions
// the index range; results are bit-identical to the serial reference.
std::uint64_t containment_violations(const Sampler& sample, const Predicate& inside,
                                     std::uint64_t n);
std::uint64_t containment_violations_serial(const Sampler& sample, const Predicate& inside,
                                            std::uint64_t n);

Vec uniform_in_unit_ball(Rng& rng, int dim);

Sampler ellipsoid_sampler(const geo::Ellipsoid& e, std::uint64_t seed);
// Uniform over e ∩ {<normal,x> >= offset}; rejection from the ellipsoid.
Sampler cap_sampler(const geo::Ellipsoid& e, const geo::Halfspace& cap, std::uint64_t seed);
// Uniform over e minus the cap.
Sampler ellipsoid_minus_cap_sampler(const geo::Ellipsoid& e, const geo::Halfspace& cap,
                                    std::uint64_t seed);
// Uniform over the pyramid via Dirichlet weights on its d+1 vertices.
Sampler pyramid_sampler(const geo::Pyramid& p, std::uint64_t seed);

}  // namespace cbopt::mc
