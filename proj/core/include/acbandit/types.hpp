#pragma once

#include <Eigen/Dense>

namespace acb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace acb
