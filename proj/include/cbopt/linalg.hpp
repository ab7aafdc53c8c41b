#pragma once

#include <Eigen/Dense>

namespace cbopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec vec1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

}  // namespace cbopt
