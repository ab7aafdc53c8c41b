#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cbopt/confint.hpp"
#include "cbopt/geometry.hpp"
#include "cbopt/oracle.hpp"
#include "cbopt/trace.hpp"

namespace cbopt {

// Case-split thresholds Delta and DeltaBar; DeltaBar - Delta = 2*gamma always.
struct Thresholds {
  double c1 = 64.0;
  double c2 = 1.0 / 32.0;
  int dim = 2;

  double poly() const {
    const double d4 = static_cast<double>(dim) * dim * dim * dim;
    return 6.0 * c1 * d4 / (c2 * c2);
  }
  double delta(double gamma) const { return (poly() + 3.0) * gamma; }
  double delta_bar(double gamma) const { return (poly() + 5.0) * gamma; }

  void validate(bool theory_mode) const;
};

enum class CaseND { Case1a, Case1b, Case2a, Case2b };

const char* to_string(CaseND c);

struct PyramidClassification {
  CaseND decision = CaseND::Case2a;
  // Index into {apex = 0, base vertex i = i}.
  int top = 0;
  int bottom = 0;
};

// Four-way case split over the pyramid's CIs at level gamma_hat. TOP/BOTTOM
// are the argmax/argmin of LB over apex and base vertices (ties to the lowest
// index); the center only enters the 2a/2b test.
PyramidClassification classify_pyramid(const PointEstimate& apex,
                                       const PointEstimate& center,
                                       const std::vector<PointEstimate>& vertices,
                                       double gamma_hat, const Thresholds& thresholds);

// Apex reflected through the pyramid center, same base.
geo::Pyramid hat_raising(const geo::Pyramid& p);

struct ConeCutResult {
  geo::Ellipsoid next;   // min-volume ellipsoid containing ball minus cap
  double volume_ratio = 1.0;
  double alpha = 0.0;    // hyperplane distance from the ball center / R
  bool fallback = false; // cap construction failed; central cut used instead
};

// Discards the reflection cone of `p` from the (isotropic) enclosing ball via
// a contained spherical cap and the shallow-cut ellipsoid update.
ConeCutResult cone_cutting(const geo::Pyramid& p, const geo::Ellipsoid& ball);

enum class EpochExitND { Case1b, Case2b, Stop };

struct EpochRecordND {
  std::uint32_t epoch = 0;
  EpochExitND exit = EpochExitND::Stop;
  std::uint32_t exit_round = 0;
  double gamma_i = 0.0;
  double gamma_hat = 0.0;
  double volume_ratio = 1.0;
  double cut_alpha = 0.0;
  bool cut_fallback = false;
  std::uint32_t max_pyramids_per_round = 0;
  double min_apex_distance = 0.0;  // over pyramids this epoch, isotropic coords
  double r_tau = 0.0;              // inner radius in isotropic coords
  geo::Ellipsoid region_after;     // feasible ellipsoid after the epoch, original coords
  // Cut diagnostics (set on Case1b/Case2b exits), isotropic coordinates plus
  // the map back to the original space.
  bool has_cut = false;
  geo::Pyramid probe_pyramid;  // pyramid as probed
  geo::Pyramid cut_pyramid;    // pyramid handed to cone-cutting (post hat-raise)
  Vec bottom_point;
  geo::AffineMap from_iso;
};

struct OptionsND {
  std::uint64_t horizon = 0;
  SamplingPlan plan;
  double c1 = 64.0;
  double c2 = 1.0 / 32.0;
  bool theory_mode = true;
  double width_floor = 1e-12;
  std::uint32_t max_rounds_per_epoch = 64;
  std::uint32_t max_epochs = 100000;
};

struct ResultND {
  std::vector<EpochRecordND> epochs;
  std::vector<RoundRecord> rounds;
  geo::Ellipsoid final_region;  // original coordinates
  Vec recommendation;
  std::string stop_reason;
  std::uint64_t queries_used = 0;
};

// Epochs of isotropic rounding, simplex probing and pyramid chains; cases
// 1(b)/2(b) end an epoch through cone-cutting (after hat-raising for 2(b)).
// All queries are mapped back to original coordinates and clamped onto the
// domain before reaching the oracle.
ResultND run_nd(QueryHandle& oracle, const Domain& domain, const OptionsND& options);

}  // namespace cbopt
