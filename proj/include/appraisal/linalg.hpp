#pragma once

#include <Eigen/Dense>

namespace appraisal {

// Double precision throughout; rows are samples.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace appraisal
