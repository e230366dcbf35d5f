#pragma once

#include <cmath>
#include <functional>

#include "appraisal/linalg.hpp"
#include "appraisal/rng.hpp"

namespace appraisal::test {

// Central finite differences: the independent oracle for every analytic
// gradient in the library. Only calls the loss through its forward path.
inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdRelTol = 1e-4;

struct GradCheckResult {
  double max_rel_err = 0.0;
  Index worst_index = -1;
  bool ok() const { return max_rel_err <= kFdRelTol; }
};

// loss() must be a deterministic function of the memory behind `theta`.
inline GradCheckResult check_gradient(Eigen::Map<Vector> theta, const Vector& analytic,
                                      const std::function<double()>& loss) {
  GradCheckResult result;
  for (Index i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + kFdStep;
    const double up = loss();
    theta[i] = saved - kFdStep;
    const double down = loss();
    theta[i] = saved;

    const double numeric = (up - down) / (2.0 * kFdStep);
    const double denom = std::max({1.0, std::abs(numeric), std::abs(analytic[i])});
    const double rel = std::abs(numeric - analytic[i]) / denom;
    if (rel > result.max_rel_err) {
      result.max_rel_err = rel;
      result.worst_index = i;
    }
  }
  return result;
}

inline Matrix random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = scale * rng.normal();
  }
  return m;
}

inline Vector random_vector(Index n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace appraisal::test
