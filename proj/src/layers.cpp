#include "appraisal/layers.hpp"

#include <cmath>

#include "appraisal/errors.hpp"

namespace appraisal {

DenseParams he_init(Index fan_in, Index fan_out, Rng& rng) {
  if (fan_in < 1 || fan_out < 1) throw Error(Errc::bad_dim, "layer dims must be >= 1");
  DenseParams p;
  p.weight.resize(fan_out, fan_in);
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (Index r = 0; r < fan_out; ++r) {
    for (Index c = 0; c < fan_in; ++c) {
      p.weight(r, c) = stddev * rng.normal();
    }
  }
  p.bias = Vector::Zero(fan_out);
  return p;
}

Matrix dense_forward(const DenseParams& p, const Matrix& x) {
  if (x.cols() != p.weight.cols())
    throw Error(Errc::shape_mismatch, "dense input width " + std::to_string(x.cols()) +
                                          " != layer fan-in " + std::to_string(p.weight.cols()));
  return (x * p.weight.transpose()).rowwise() + p.bias.transpose();
}

Matrix dense_backward(const DenseParams& p, const Matrix& x, const Matrix& upstream,
                      DenseGrads& grads) {
  if (upstream.rows() != x.rows() || upstream.cols() != p.weight.rows())
    throw Error(Errc::shape_mismatch, "dense upstream gradient shape mismatch");
  grads.weight = upstream.transpose() * x;
  grads.bias = upstream.colwise().sum().transpose();
  return upstream * p.weight;
}

Matrix leaky_relu_forward(const Matrix& x) {
  return x.unaryExpr([](double v) { return v >= 0.0 ? v : kLeakySlope * v; });
}

Matrix leaky_relu_backward(const Matrix& x, const Matrix& upstream) {
  return upstream.array() * x.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : kLeakySlope; }).array();
}

BatchNormState make_batchnorm(Index features) {
  BatchNormState s;
  s.gamma = Vector::Ones(features);
  s.beta = Vector::Zero(features);
  s.running_mean = Vector::Zero(features);
  s.running_var = Vector::Ones(features);
  return s;
}

Matrix batchnorm_forward(BatchNormState& state, const Matrix& x, Mode mode, BatchNormCache* cache) {
  if (x.cols() != state.gamma.size())
    throw Error(Errc::shape_mismatch, "batchnorm feature width mismatch");

  if (mode == Mode::infer) {
    Vector inv_std = (state.running_var.array() + BatchNormState::epsilon).sqrt().inverse();
    Matrix xhat = (x.rowwise() - state.running_mean.transpose()).array().rowwise() *
                  inv_std.transpose().array();
    if (cache) {
      cache->train = false;
      cache->xhat = xhat;
    }
    return (xhat.array().rowwise() * state.gamma.transpose().array()).rowwise() +
           state.beta.transpose().array();
  }

  const Index n = x.rows();
  if (n < 2) throw Error(Errc::batch_too_small, "train-mode batchnorm requires batch size >= 2");
  const double dn = static_cast<double>(n);

  Vector mean = x.colwise().mean();
  Matrix centered = x.rowwise() - mean.transpose();
  Vector var = centered.array().square().colwise().sum() / dn;  // population
  Vector inv_std = (var.array() + BatchNormState::epsilon).sqrt().inverse();
  Matrix xhat = centered.array().rowwise() * inv_std.transpose().array();

  Vector unbiased_var = var * (dn / (dn - 1.0));
  state.running_mean = (1.0 - BatchNormState::momentum) * state.running_mean +
                       BatchNormState::momentum * mean;
  state.running_var = (1.0 - BatchNormState::momentum) * state.running_var +
                      BatchNormState::momentum * unbiased_var;

  if (cache) {
    cache->train = true;
    cache->centered = std::move(centered);
    cache->xhat = xhat;
    cache->inv_std = std::move(inv_std);
  }
  return (xhat.array().rowwise() * state.gamma.transpose().array()).rowwise() +
         state.beta.transpose().array();
}

Matrix batchnorm_backward(const BatchNormState& state, const BatchNormCache& cache,
                          const Matrix& upstream, BatchNormGrads& grads) {
  if (!cache.train)
    throw Error(Errc::shape_mismatch, "batchnorm backward requires a train-mode cache");
  const double n = static_cast<double>(upstream.rows());

  grads.gamma = (upstream.array() * cache.xhat.array()).colwise().sum().transpose();
  grads.beta = upstream.colwise().sum().transpose();

  Matrix dxhat = upstream.array().rowwise() * state.gamma.transpose().array();
  // dvar and dmean follow the standard derivation; the dmean term from the
  // variance path vanishes because sum(x - mean) = 0.
  Vector dvar = ((dxhat.array() * cache.centered.array()).colwise().sum().transpose().array() *
                 (-0.5) * cache.inv_std.array().cube())
                    .matrix();
  Vector dmean = (dxhat.array().rowwise() * (-cache.inv_std.transpose().array()))
                     .colwise()
                     .sum()
                     .transpose();

  Matrix dx = (dxhat.array().rowwise() * cache.inv_std.transpose().array()) +
              (cache.centered.array().rowwise() * dvar.transpose().array()) * (2.0 / n);
  dx.array().rowwise() += dmean.transpose().array() / n;
  return dx;
}

Matrix dropout_forward(const Matrix& x, double rate, Mode mode, Rng& rng, Matrix* mask) {
  if (rate < 0.0 || rate >= 1.0) throw Error(Errc::bad_dim, "dropout rate must be in [0, 1)");
  if (mode == Mode::infer || rate == 0.0) {
    if (mask) *mask = Matrix::Ones(x.rows(), x.cols());
    return x;
  }
  const double scale = 1.0 / (1.0 - rate);
  Matrix m(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index c = 0; c < x.cols(); ++c) {
      m(r, c) = rng.uniform() < rate ? 0.0 : scale;
    }
  }
  Matrix y = x.array() * m.array();
  if (mask) *mask = std::move(m);
  return y;
}

Matrix dropout_backward(const Matrix& mask, const Matrix& upstream) {
  return upstream.array() * mask.array();
}

MseResult mse_loss(const Vector& pred, const Vector& target) {
  if (pred.size() != target.size())
    throw Error(Errc::length_mismatch, "prediction and target lengths differ");
  if (pred.size() < 1) throw Error(Errc::length_mismatch, "mse requires at least one element");
  const double n = static_cast<double>(pred.size());
  Vector diff = pred - target;
  return {diff.squaredNorm() / n, 2.0 * diff / n};
}

}  // namespace appraisal
