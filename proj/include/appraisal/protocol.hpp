#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "appraisal/model.hpp"

namespace appraisal {

struct TrainConfig {
  double learning_rate;
  int batch_size;
  int epochs = 250;
  std::uint64_t seed = 42;

  // Per-tier presets: Tier 1 (0.005, 256), Tier 2 (0.01, 128), Tier 3 (0.02, 64).
  static TrainConfig tier(int tier);
};

struct MetricsReport {
  double rmse = 0.0;  // standardized log-price space
  double mape = 0.0;  // raw price space, as a fraction
  double r2 = 0.0;    // standardized log-price space
  std::size_t n = 0;
};

// Metrics from prediction/target pairs. Targets need >= 2 samples and
// non-zero variance for r2.
MetricsReport compute_metrics(const Vector& pred_t, const Vector& true_t,
                              const Vector& pred_price, const Vector& true_price);

enum class ModelKind { hft_hlf, traditional };

// Mini-batch training. Each epoch shuffles the row order, iterates batches of
// config.batch_size (a final short batch is kept when it has >= 2 rows),
// backpropagates MSE on the standardized targets and applies an AMSGrad step
// to every unfrozen parameter. Returns the mean training loss per epoch.
template <typename ModelT>
std::vector<double> train(ModelT& model, const EncodedDataset& dataset, const TrainConfig& config,
                          Rng& rng);

// Encodes `records` under the checkpoint's context and scores infer-mode
// predictions against the true prices.
MetricsReport evaluate(const ModelCheckpoint& ckpt, const std::vector<PropertyRecord>& records);

struct CvResult {
  std::vector<MetricsReport> folds;
  MetricsReport mean;  // arithmetic means; n is the total evaluated samples
};

// Monte-Carlo cross-validation: n_folds independent random 90/10 splits
// (split i uses seed+i), vocabulary and normalizer fitted on each training
// split only.
CvResult monte_carlo_cv(const std::vector<PropertyRecord>& records, ModelKind kind,
                        const TrainConfig& config, int n_folds = 10, double test_fraction = 0.1);

// At most k records per residence, sampled uniformly without replacement;
// residences with fewer than k records contribute all of them. Input order
// is preserved.
std::vector<PropertyRecord> sample_k_per_residence(const std::vector<PropertyRecord>& records,
                                                   std::size_t k, Rng& rng);
// Same sample as ascending indices into `records`.
std::vector<std::size_t> sample_k_per_residence_indices(const std::vector<PropertyRecord>& records,
                                                        std::size_t k, Rng& rng);

// Fully supervised fit on all of `records` (vocabulary and normalizer fitted
// on the same records); returns a checkpoint carrying the encode context.
ModelCheckpoint fit_supervised(const std::vector<PropertyRecord>& records, ModelKind kind,
                               const TrainConfig& config);

struct TransferOptions {
  std::size_t k = 10;
  bool freeze_backbone = true;
  // Also train a fresh HFT+HLF from scratch on the identical fine-tuning set
  // and score it on the same test set.
  bool with_scratch_baseline = false;
  double test_fraction = 0.1;
};

struct TransferResult {
  MetricsReport transfer;
  std::optional<MetricsReport> scratch;
  ModelCheckpoint fine_tuned;
  std::size_t fine_tune_size = 0;
  std::size_t test_size = 0;
};

// Fine-tunes a pre-trained source checkpoint on the target city: samples the
// k-per-residence fine-tuning set, draws a test set of round(test_fraction *
// |target|) records from the remainder, trains the head (backbone frozen)
// with the target config, and evaluates on the test set.
TransferResult transfer_from_checkpoint(const ModelCheckpoint& source,
                                        const std::vector<PropertyRecord>& target,
                                        const TransferOptions& opts,
                                        const TrainConfig& target_config, std::uint64_t seed);

// Full protocol: supervised pre-training on the source city, then
// transfer_from_checkpoint on the target.
TransferResult run_transfer_experiment(const std::vector<PropertyRecord>& source,
                                       const std::vector<PropertyRecord>& target,
                                       const TransferOptions& opts,
                                       const TrainConfig& source_config,
                                       const TrainConfig& target_config, std::uint64_t seed);

}  // namespace appraisal
