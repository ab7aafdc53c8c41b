#include "cbopt/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cbopt/errors.hpp"

namespace cbopt {

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_query_csv(const std::string& path, const std::vector<QueryRecord>& log, int dim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_query_csv: cannot open " + path);
  out << "t";
  for (int i = 1; i <= dim; ++i) out << ",x_" << i;
  out << ",f,y,regret\n";
  for (const auto& rec : log) {
    out << rec.t;
    for (int i = 0; i < dim; ++i) out << ',' << format_g17(rec.x[i]);
    out << ',' << format_g17(rec.fx) << ',' << format_g17(rec.y) << ','
        << format_g17(rec.cumulative_regret) << '\n';
  }
  if (!out) throw std::runtime_error("write_query_csv: write failed for " + path);
}

std::vector<QueryRecord> read_query_csv(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_query_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<QueryRecord> log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    QueryRecord rec;
    rec.x = Vec(dim);
    std::getline(ss, field, ',');
    rec.t = std::stoull(field);
    for (int i = 0; i < dim; ++i) {
      std::getline(ss, field, ',');
      rec.x[i] = std::stod(field);
    }
    std::getline(ss, field, ',');
    rec.fx = std::stod(field);
    std::getline(ss, field, ',');
    rec.y = std::stod(field);
    std::getline(ss, field, ',');
    rec.cumulative_regret = std::stod(field);
    log.push_back(std::move(rec));
  }
  return log;
}

}  // namespace cbopt
