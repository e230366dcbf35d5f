#pragma once

#include "appraisal/linalg.hpp"
#include "appraisal/rng.hpp"

namespace appraisal {

enum class Mode { train, infer };

// ---------------------------------------------------------------------------
// Dense layer: y = x W^T + b, W is out x in.

struct DenseParams {
  Matrix weight;  // out x in
  Vector bias;    // out
};

struct DenseGrads {
  Matrix weight;
  Vector bias;
};

// Weights ~ Normal(0, sqrt(2/fan_in)), bias zero.
DenseParams he_init(Index fan_in, Index fan_out, Rng& rng);

Matrix dense_forward(const DenseParams& p, const Matrix& x);
// Returns the gradient w.r.t. x; fills grads with dL/dW, dL/db.
Matrix dense_backward(const DenseParams& p, const Matrix& x, const Matrix& upstream,
                      DenseGrads& grads);

// ---------------------------------------------------------------------------
// Leaky ReLU, negative slope 0.1. Derivative at exactly 0 is 1.

inline constexpr double kLeakySlope = 0.1;

Matrix leaky_relu_forward(const Matrix& x);
Matrix leaky_relu_backward(const Matrix& x, const Matrix& upstream);

// ---------------------------------------------------------------------------
// Batch normalization.

struct BatchNormState {
  Vector gamma;         // learned scale
  Vector beta;          // learned shift
  Vector running_mean;
  Vector running_var;
  static constexpr double momentum = 0.1;
  static constexpr double epsilon = 1e-5;
};

BatchNormState make_batchnorm(Index features);

struct BatchNormCache {
  Matrix centered;  // x - batch mean, train mode only
  Matrix xhat;
  Vector inv_std;   // 1/sqrt(batch var + eps)
  bool train = false;
};

// Train mode normalizes by batch statistics (population variance) and updates
// running stats with the momentum rule; the running-variance update uses the
// unbiased batch variance, hence the batch >= 2 requirement. Infer mode
// normalizes by the running statistics and leaves them untouched.
Matrix batchnorm_forward(BatchNormState& state, const Matrix& x, Mode mode, BatchNormCache* cache);

struct BatchNormGrads {
  Vector gamma;
  Vector beta;
};

// Full train-mode gradient including the batch mean/variance paths.
Matrix batchnorm_backward(const BatchNormState& state, const BatchNormCache& cache,
                          const Matrix& upstream, BatchNormGrads& grads);

// ---------------------------------------------------------------------------
// Inverted dropout. Train: zero with probability `rate`, scale survivors by
// 1/(1-rate). Infer: identity. The mask matrix holds the applied multipliers
// so backward reuses it exactly.

Matrix dropout_forward(const Matrix& x, double rate, Mode mode, Rng& rng, Matrix* mask);
Matrix dropout_backward(const Matrix& mask, const Matrix& upstream);

// ---------------------------------------------------------------------------
// Mean squared error over equal-length vectors.

struct MseResult {
  double loss;
  Vector grad;  // dL/dpred = 2(pred - target)/n
};

MseResult mse_loss(const Vector& pred, const Vector& target);

}  // namespace appraisal
