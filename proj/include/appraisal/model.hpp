#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "appraisal/encode.hpp"
#include "appraisal/layers.hpp"
#include "appraisal/linalg.hpp"
#include "appraisal/optimizer.hpp"
#include "appraisal/records.hpp"
#include "appraisal/rng.hpp"

namespace appraisal {

inline constexpr std::array<Index, 5> kBackboneWidths = {200, 100, 50, 20, 10};
inline constexpr std::array<Index, 4> kHeadWidths = {100, 50, 20, 10};
inline constexpr Index kBackboneOutputDim = 10;
inline constexpr double kDefaultDropoutRate = 0.5;

// One hidden block: dense -> batch norm -> leaky ReLU -> dropout.
struct HiddenBlock {
  DenseParams dense;
  BatchNormState bn;
};

std::vector<HiddenBlock> make_stack(Index input_dim, std::span<const Index> widths, Rng& rng);

// The proposed network: a transferable backbone over homogeneous features
// whose 10-wide output is concatenated with the heterogeneous location
// one-hots and fed to a per-city head ending in a linear unit.
struct HftHlfModel {
  std::vector<HiddenBlock> backbone;  // 5 blocks, widths (200,100,50,20,10)
  std::vector<HiddenBlock> head;      // 4 blocks, widths (100,50,20,10)
  DenseParams output;                 // 1 x 10
  bool backbone_frozen = false;
  double dropout_rate = kDefaultDropoutRate;

  Index homogeneous_dim() const { return backbone.front().dense.weight.cols(); }
  Index heterogeneous_dim() const {
    return head.front().dense.weight.cols() - kBackboneOutputDim;
  }
};

// Same hidden widths as the backbone, over the full concatenated input.
struct TraditionalModel {
  std::vector<HiddenBlock> stack;  // 5 blocks, widths (200,100,50,20,10)
  DenseParams output;              // 1 x 10
  double dropout_rate = kDefaultDropoutRate;

  Index input_dim() const { return stack.front().dense.weight.cols(); }
};

using AnyModel = std::variant<HftHlfModel, TraditionalModel>;

HftHlfModel build_hft_hlf(Index homog_dim, Index heterog_dim, Rng& rng);
TraditionalModel build_traditional(Index homog_dim, Index heterog_dim, Rng& rng);

// Learnable parameter count (dense weights/biases plus batch-norm gamma/beta).
std::size_t parameter_count(const HftHlfModel& model);
std::size_t parameter_count(const TraditionalModel& model);

// ---------------------------------------------------------------------------
// Forward / backward.

struct BlockCache {
  Matrix input;      // dense input
  Matrix pre_bn;     // dense output
  BatchNormCache bn;
  Matrix pre_act;    // batch-norm output
  Matrix mask;       // dropout multipliers
};

struct ForwardCache {
  std::vector<BlockCache> backbone;
  std::vector<BlockCache> head;
  Matrix head_input;   // concat(backbone output, heterogeneous), or full input
  Matrix stack_output; // last hidden block's output, the linear unit's input
  Mode mode = Mode::infer;
  bool backbone_skipped = false;  // frozen backbone ran in infer mode, no cache
};

// A frozen backbone always runs in infer mode (running batch-norm statistics,
// no dropout), even while the head trains, so the transferred representation
// stays stationary.
Matrix forward(HftHlfModel& model, const Matrix& homog, const Matrix& heterog, Mode mode,
               Rng& rng, ForwardCache* cache = nullptr);
Matrix forward(TraditionalModel& model, const Matrix& homog, const Matrix& heterog, Mode mode,
               Rng& rng, ForwardCache* cache = nullptr);

struct BlockGrads {
  DenseGrads dense;
  BatchNormGrads bn;
};

struct ModelGrads {
  std::vector<BlockGrads> backbone;  // empty when the backbone is frozen
  std::vector<BlockGrads> head;      // traditional model uses this slot
  DenseGrads output;
};

// upstream is dL/d(predictions), one column. Gradients are not propagated
// into a frozen backbone.
ModelGrads backward(const HftHlfModel& model, const ForwardCache& cache, const Matrix& upstream);
ModelGrads backward(const TraditionalModel& model, const ForwardCache& cache, const Matrix& upstream);

// Trainable tensors in a fixed order, matching grad_refs. Frozen backbone
// tensors are excluded.
std::vector<TensorRef> trainable_params(HftHlfModel& model);
std::vector<TensorRef> trainable_params(TraditionalModel& model);
std::vector<ConstTensorRef> grad_refs(const HftHlfModel& model, const ModelGrads& grads);
std::vector<ConstTensorRef> grad_refs(const TraditionalModel& model, const ModelGrads& grads);

// Every parameter and running statistic, for persistence and bit-exact
// comparisons.
std::vector<ConstTensorRef> all_state(const HftHlfModel& model);
std::vector<ConstTensorRef> all_state(const TraditionalModel& model);

// ---------------------------------------------------------------------------
// Checkpoints.

inline constexpr int kCheckpointVersion = 1;

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  int batch_size = 0;
  std::string source_city;
};

// Self-describing snapshot: loading needs no external context.
// `vocab` carries the district/residence lists the head encodes against (the
// head's city); `layout` carries the structure categories the backbone
// encodes against (the backbone's source city).
struct ModelCheckpoint {
  int version = kCheckpointVersion;
  std::string kind;  // "hft_hlf" | "traditional"
  AnyModel model;
  NormStats norm;
  CityVocabulary vocab;
  FeatureLayout layout;
  TrainingMeta meta;
};

ModelCheckpoint make_checkpoint(AnyModel model, const NormStats& norm, const CityVocabulary& vocab,
                                const FeatureLayout& layout, const TrainingMeta& meta);

std::string checkpoint_to_json(const ModelCheckpoint& ckpt);
ModelCheckpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

// Copies the backbone (parameters, batch-norm states) bit-exactly from the
// source and rebuilds the head for the target city's location width, freshly
// initialized. The result trains with the backbone frozen.
HftHlfModel transfer_backbone(const ModelCheckpoint& source, Index target_heterog_dim, Rng& rng);

// encode -> infer forward -> decode, per record.
std::vector<double> predict_prices(const ModelCheckpoint& ckpt,
                                   const std::vector<PropertyRecord>& records);

}  // namespace appraisal
