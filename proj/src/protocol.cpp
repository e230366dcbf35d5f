#include "appraisal/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "appraisal/errors.hpp"

namespace appraisal {

TrainConfig TrainConfig::tier(int tier) {
  switch (tier) {
    case 1: return {0.005, 256};
    case 2: return {0.01, 128};
    case 3: return {0.02, 64};
    default: throw Error(Errc::bad_spec, "tier must be 1, 2 or 3");
  }
}

MetricsReport compute_metrics(const Vector& pred_t, const Vector& true_t,
                              const Vector& pred_price, const Vector& true_price) {
  const Index n = pred_t.size();
  if (true_t.size() != n || pred_price.size() != n || true_price.size() != n)
    throw Error(Errc::length_mismatch, "metric input lengths differ");
  if (n < 2) throw Error(Errc::too_few_samples, "metrics need at least 2 samples");

  const double dn = static_cast<double>(n);
  MetricsReport report;
  report.n = static_cast<std::size_t>(n);

  Vector err = pred_t - true_t;
  report.rmse = std::sqrt(err.squaredNorm() / dn);

  report.mape = ((pred_price - true_price).array().abs() / true_price.array()).sum() / dn;

  const double t_mean = true_t.mean();
  const double ss_tot = (true_t.array() - t_mean).square().sum();
  if (ss_tot == 0.0)
    throw Error(Errc::zero_variance_targets, "r2 undefined for constant targets");
  report.r2 = 1.0 - err.squaredNorm() / ss_tot;
  return report;
}

namespace {

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& rows, std::size_t begin,
                   std::size_t end) {
  Matrix out(static_cast<Index>(end - begin), m.cols());
  for (std::size_t i = begin; i < end; ++i) {
    out.row(static_cast<Index>(i - begin)) = m.row(static_cast<Index>(rows[i]));
  }
  return out;
}

Vector gather(const Vector& v, const std::vector<std::size_t>& rows, std::size_t begin,
              std::size_t end) {
  Vector out(static_cast<Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) {
    out[static_cast<Index>(i - begin)] = v[static_cast<Index>(rows[i])];
  }
  return out;
}

}  // namespace

template <typename ModelT>
std::vector<double> train(ModelT& model, const EncodedDataset& dataset, const TrainConfig& config,
                          Rng& rng) {
  const auto n = static_cast<std::size_t>(dataset.targets.size());
  if (n == 0) throw Error(Errc::empty_dataset, "training dataset is empty");
  if (config.batch_size < 2) throw Error(Errc::bad_spec, "batch size must be >= 2");
  if (config.epochs < 1) throw Error(Errc::bad_spec, "epochs must be >= 1");

  Rng shuffle_rng = rng.split("epoch-shuffle");
  Rng dropout_rng = rng.split("dropout");

  OptimState optim{config.learning_rate};
  auto params = trainable_params(model);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t seen = 0;

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      if (stop - start < 2) break;  // short tail that batch norm cannot take

      Matrix homog = gather_rows(dataset.homogeneous, order, start, stop);
      Matrix heterog = gather_rows(dataset.heterogeneous, order, start, stop);
      Vector targets = gather(dataset.targets, order, start, stop);

      ForwardCache cache;
      Matrix pred = forward(model, homog, heterog, Mode::train, dropout_rng, &cache);
      auto [loss, grad] = mse_loss(pred.col(0), targets);
      loss_sum += loss * static_cast<double>(stop - start);
      seen += stop - start;

      Matrix upstream = grad;
      ModelGrads grads = backward(model, cache, upstream);
      auto grefs = grad_refs(model, grads);
      adam_amsgrad_step(params, grefs, optim);
    }

    if (seen == 0)
      throw Error(Errc::empty_dataset, "no trainable batch of size >= 2 in the dataset");
    history.push_back(loss_sum / static_cast<double>(seen));
  }
  return history;
}

template std::vector<double> train<HftHlfModel>(HftHlfModel&, const EncodedDataset&,
                                                const TrainConfig&, Rng&);
template std::vector<double> train<TraditionalModel>(TraditionalModel&, const EncodedDataset&,
                                                     const TrainConfig&, Rng&);

MetricsReport evaluate(const ModelCheckpoint& ckpt, const std::vector<PropertyRecord>& records) {
  if (records.size() < 2) throw Error(Errc::too_few_samples, "evaluation needs >= 2 records");

  std::vector<double> pred_prices = predict_prices(ckpt, records);
  const auto n = static_cast<Index>(records.size());
  Vector pred_t(n), true_t(n), pred_p(n), true_p(n);
  for (Index i = 0; i < n; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    pred_p[i] = pred_prices[static_cast<std::size_t>(i)];
    true_p[i] = rec.price;
    pred_t[i] = encode_target(pred_p[i], ckpt.norm);
    true_t[i] = encode_target(rec.price, ckpt.norm);
  }
  return compute_metrics(pred_t, true_t, pred_p, true_p);
}

namespace {

AnyModel build_kind(ModelKind kind, Index homog_dim, Index heterog_dim, Rng& rng) {
  if (kind == ModelKind::hft_hlf) return build_hft_hlf(homog_dim, heterog_dim, rng);
  return build_traditional(homog_dim, heterog_dim, rng);
}

std::vector<double> train_any(AnyModel& model, const EncodedDataset& ds, const TrainConfig& cfg,
                              Rng& rng) {
  return std::visit([&](auto& m) { return train(m, ds, cfg, rng); }, model);
}

// Fit context + model on `fit_records`, return checkpoint.
ModelCheckpoint fit_on(const std::vector<PropertyRecord>& fit_records, ModelKind kind,
                       const TrainConfig& config, Rng rng) {
  NormStats norm = fit_normalizer(fit_records);
  CityVocabulary vocab = build_vocabulary(fit_records);
  FeatureLayout layout = make_layout(vocab);
  EncodedDataset ds = encode_dataset(fit_records, norm, layout, vocab);

  Rng init_rng = rng.split("init");
  Rng train_rng = rng.split("train");
  AnyModel model = build_kind(kind, static_cast<Index>(layout.homogeneous_dim()),
                              static_cast<Index>(heterogeneous_dim(vocab)), init_rng);
  train_any(model, ds, config, train_rng);

  TrainingMeta meta{config.seed, config.epochs, config.learning_rate, config.batch_size,
                    vocab.city};
  return make_checkpoint(std::move(model), norm, vocab, layout, meta);
}

}  // namespace

CvResult monte_carlo_cv(const std::vector<PropertyRecord>& records, ModelKind kind,
                        const TrainConfig& config, int n_folds, double test_fraction) {
  CvResult result;
  std::size_t total_n = 0;
  for (int fold = 1; fold <= n_folds; ++fold) {
    const std::uint64_t fold_seed = config.seed + static_cast<std::uint64_t>(fold);
    auto [train_recs, test_recs] = split_train_test(records, test_fraction, fold_seed);

    TrainConfig fold_config = config;
    fold_config.seed = fold_seed;
    ModelCheckpoint ckpt = fit_on(train_recs, kind, fold_config, Rng(fold_seed));
    MetricsReport rep = evaluate(ckpt, test_recs);
    total_n += rep.n;
    result.folds.push_back(rep);
  }

  MetricsReport mean;
  for (const auto& f : result.folds) {
    mean.rmse += f.rmse;
    mean.mape += f.mape;
    mean.r2 += f.r2;
  }
  const double k = static_cast<double>(result.folds.size());
  mean.rmse /= k;
  mean.mape /= k;
  mean.r2 /= k;
  mean.n = total_n;
  result.mean = mean;
  return result;
}

std::vector<std::size_t> sample_k_per_residence_indices(const std::vector<PropertyRecord>& records,
                                                        std::size_t k, Rng& rng) {
  if (k == 0) throw Error(Errc::bad_spec, "k must be >= 1");
  // Group record indices per residence; iterate residences in sorted order so
  // sampling is independent of input order.
  std::map<std::string, std::vector<std::size_t>> by_residence;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_residence[records[i].residence].push_back(i);
  }

  std::vector<std::size_t> chosen;
  for (auto& [residence, indices] : by_residence) {
    Rng res_rng = rng.split(residence);
    auto picks = res_rng.sample_without_replacement(indices.size(), k);
    for (std::size_t p : picks) chosen.push_back(indices[p]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<PropertyRecord> sample_k_per_residence(const std::vector<PropertyRecord>& records,
                                                   std::size_t k, Rng& rng) {
  auto chosen = sample_k_per_residence_indices(records, k, rng);
  std::vector<PropertyRecord> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(records[i]);
  return out;
}

ModelCheckpoint fit_supervised(const std::vector<PropertyRecord>& records, ModelKind kind,
                               const TrainConfig& config) {
  if (records.empty()) throw Error(Errc::empty_dataset, "no records to fit on");
  return fit_on(records, kind, config, Rng(config.seed).split("supervised"));
}

TransferResult transfer_from_checkpoint(const ModelCheckpoint& source,
                                        const std::vector<PropertyRecord>& target,
                                        const TransferOptions& opts,
                                        const TrainConfig& target_config, std::uint64_t seed) {
  if (source.kind != "hft_hlf")
    throw Error(Errc::kind_mismatch, "transfer source must be an hft_hlf checkpoint");
  Rng rng(seed);

  // Fine-tuning set: k records per residence across the whole target city.
  Rng sampler_rng = rng.split("k-per-residence");
  auto fine_tune_idx = sample_k_per_residence_indices(target, opts.k, sampler_rng);
  if (fine_tune_idx.empty()) throw Error(Errc::fine_tune_set_empty, "fine-tuning set is empty");
  std::vector<PropertyRecord> fine_tune;
  fine_tune.reserve(fine_tune_idx.size());
  for (std::size_t i : fine_tune_idx) fine_tune.push_back(target[i]);

  // Test set: round(test_fraction * |target|) records drawn from the records
  // not used for fine-tuning.
  const auto test_size = static_cast<std::size_t>(
      std::llround(opts.test_fraction * static_cast<double>(target.size())));
  std::vector<bool> in_fine_tune(target.size(), false);
  for (std::size_t i : fine_tune_idx) in_fine_tune[i] = true;
  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (!in_fine_tune[i]) remaining.push_back(i);
  }
  if (remaining.size() < test_size)
    throw Error(Errc::too_few_samples,
                "only " + std::to_string(remaining.size()) + " records remain for a test set of " +
                    std::to_string(test_size));
  Rng test_rng = rng.split("test-split");
  auto picks = test_rng.sample_without_replacement(remaining.size(), test_size);
  std::vector<PropertyRecord> test_set;
  test_set.reserve(test_size);
  for (std::size_t p : picks) test_set.push_back(target[remaining[p]]);

  // Target-city encode context. The backbone keeps the source normalization
  // and structure categories; districts/residences come from the fine-tuning
  // set, which covers every residence that has at least one record.
  CityVocabulary target_vocab = build_vocabulary(fine_tune);
  const auto heterog_dim_t = static_cast<Index>(heterogeneous_dim(target_vocab));

  Rng head_rng = rng.split("head-init");
  HftHlfModel model = transfer_backbone(source, heterog_dim_t, head_rng);
  model.backbone_frozen = opts.freeze_backbone;

  EncodedDataset ds = encode_dataset(fine_tune, source.norm, source.layout, target_vocab);
  Rng tune_rng = rng.split("fine-tune");
  train(model, ds, target_config, tune_rng);

  TrainingMeta meta{seed, target_config.epochs, target_config.learning_rate,
                    target_config.batch_size, source.meta.source_city};
  TransferResult result;
  result.fine_tune_size = fine_tune.size();
  result.test_size = test_size;
  result.fine_tuned =
      make_checkpoint(std::move(model), source.norm, target_vocab, source.layout, meta);
  result.transfer = evaluate(result.fine_tuned, test_set);

  if (opts.with_scratch_baseline) {
    // Same fine-tuning subset, same test set, but everything learned from
    // scratch: context fitted on the fine-tuning set alone.
    NormStats scratch_norm = fit_normalizer(fine_tune);
    FeatureLayout scratch_layout = make_layout(target_vocab);
    EncodedDataset scratch_ds =
        encode_dataset(fine_tune, scratch_norm, scratch_layout, target_vocab);
    Rng scratch_init = rng.split("scratch-init");
    Rng scratch_train = rng.split("scratch-train");
    HftHlfModel scratch = build_hft_hlf(static_cast<Index>(scratch_layout.homogeneous_dim()),
                                        heterog_dim_t, scratch_init);
    train(scratch, scratch_ds, target_config, scratch_train);
    ModelCheckpoint scratch_ckpt =
        make_checkpoint(std::move(scratch), scratch_norm, target_vocab, scratch_layout, meta);
    result.scratch = evaluate(scratch_ckpt, test_set);
  }
  return result;
}

TransferResult run_transfer_experiment(const std::vector<PropertyRecord>& source,
                                       const std::vector<PropertyRecord>& target,
                                       const TransferOptions& opts,
                                       const TrainConfig& source_config,
                                       const TrainConfig& target_config, std::uint64_t seed) {
  TrainConfig src_cfg = source_config;
  src_cfg.seed = seed;
  ModelCheckpoint pretrained = fit_supervised(source, ModelKind::hft_hlf, src_cfg);
  return transfer_from_checkpoint(pretrained, target, opts, target_config, seed);
}

}  // namespace appraisal
