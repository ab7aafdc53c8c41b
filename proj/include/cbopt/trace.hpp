#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbopt/oracle.hpp"

namespace cbopt {

// One CI level's worth of sampling inside an epoch. Regret over the round is
// joined from the ledger's regret series by [first_query, last_query].
struct RoundRecord {
  std::uint32_t epoch = 0;
  std::uint32_t round = 0;
  double gamma = 0.0;
  std::uint64_t first_query = 0;  // 1-indexed; 0 when the round issued none
  std::uint64_t last_query = 0;
  std::uint64_t new_queries = 0;
  std::uint32_t pyramids = 0;     // nd only
  bool ended_epoch = false;
  bool continued = false;         // flat configuration, went to round+1
};

std::string format_g17(double value);

// Emits the per-query trace as `t,x_1..x_d,f,y,regret` with 17 significant
// digits, the schema regression tests parse back bit-exactly.
void write_query_csv(const std::string& path, const std::vector<QueryRecord>& log, int dim);

std::vector<QueryRecord> read_query_csv(const std::string& path, int dim);

}  // namespace cbopt
