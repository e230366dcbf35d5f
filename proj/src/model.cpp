#include "appraisal/model.hpp"

#include "appraisal/errors.hpp"

namespace appraisal {

namespace {

// Shared block-stack forward. `rng` is consumed only by dropout in train mode.
Matrix stack_forward(std::vector<HiddenBlock>& blocks, const Matrix& input, Mode mode,
                     double dropout_rate, Rng& rng, std::vector<BlockCache>* caches) {
  Matrix x = input;
  if (caches) caches->resize(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    BlockCache* c = caches ? &(*caches)[i] : nullptr;
    Matrix pre_bn = dense_forward(blocks[i].dense, x);
    Matrix pre_act = batchnorm_forward(blocks[i].bn, pre_bn, mode, c ? &c->bn : nullptr);
    Matrix act = leaky_relu_forward(pre_act);
    Matrix out = dropout_forward(act, dropout_rate, mode, rng, c ? &c->mask : nullptr);
    if (c) {
      c->input = std::move(x);
      c->pre_bn = std::move(pre_bn);
      c->pre_act = std::move(pre_act);
    }
    x = std::move(out);
  }
  return x;
}

// Backward through a block stack; returns dL/d(input).
Matrix stack_backward(const std::vector<HiddenBlock>& blocks,
                      const std::vector<BlockCache>& caches, const Matrix& upstream,
                      std::vector<BlockGrads>& grads) {
  grads.resize(blocks.size());
  Matrix g = upstream;
  for (std::size_t i = blocks.size(); i-- > 0;) {
    const auto& cache = caches[i];
    Matrix d_act = dropout_backward(cache.mask, g);
    Matrix d_pre_act = leaky_relu_backward(cache.pre_act, d_act);
    Matrix d_pre_bn = batchnorm_backward(blocks[i].bn, cache.bn, d_pre_act, grads[i].bn);
    g = dense_backward(blocks[i].dense, cache.input, d_pre_bn, grads[i].dense);
  }
  return g;
}

void push_block_params(std::vector<TensorRef>& out, std::vector<HiddenBlock>& blocks) {
  for (auto& b : blocks) {
    out.push_back({b.dense.weight.data(), b.dense.weight.size()});
    out.push_back({b.dense.bias.data(), b.dense.bias.size()});
    out.push_back({b.bn.gamma.data(), b.bn.gamma.size()});
    out.push_back({b.bn.beta.data(), b.bn.beta.size()});
  }
}

void push_block_grads(std::vector<ConstTensorRef>& out, const std::vector<BlockGrads>& blocks) {
  for (const auto& g : blocks) {
    out.push_back({g.dense.weight.data(), g.dense.weight.size()});
    out.push_back({g.dense.bias.data(), g.dense.bias.size()});
    out.push_back({g.bn.gamma.data(), g.bn.gamma.size()});
    out.push_back({g.bn.beta.data(), g.bn.beta.size()});
  }
}

void push_block_state(std::vector<ConstTensorRef>& out, const std::vector<HiddenBlock>& blocks) {
  for (const auto& b : blocks) {
    out.push_back({b.dense.weight.data(), b.dense.weight.size()});
    out.push_back({b.dense.bias.data(), b.dense.bias.size()});
    out.push_back({b.bn.gamma.data(), b.bn.gamma.size()});
    out.push_back({b.bn.beta.data(), b.bn.beta.size()});
    out.push_back({b.bn.running_mean.data(), b.bn.running_mean.size()});
    out.push_back({b.bn.running_var.data(), b.bn.running_var.size()});
  }
}

std::size_t stack_parameter_count(Index input_dim, std::span<const Index> widths) {
  std::size_t count = 0;
  Index in = input_dim;
  for (Index w : widths) {
    count += static_cast<std::size_t>(w * in + w);  // dense
    count += static_cast<std::size_t>(2 * w);       // gamma, beta
    in = w;
  }
  return count;
}

}  // namespace

std::vector<HiddenBlock> make_stack(Index input_dim, std::span<const Index> widths, Rng& rng) {
  std::vector<HiddenBlock> blocks;
  blocks.reserve(widths.size());
  Index in = input_dim;
  for (Index w : widths) {
    HiddenBlock b;
    b.dense = he_init(in, w, rng);
    b.bn = make_batchnorm(w);
    blocks.push_back(std::move(b));
    in = w;
  }
  return blocks;
}

HftHlfModel build_hft_hlf(Index homog_dim, Index heterog_dim, Rng& rng) {
  if (homog_dim < 1 || heterog_dim < 1) throw Error(Errc::bad_dim, "model dims must be >= 1");
  HftHlfModel m;
  m.backbone = make_stack(homog_dim, kBackboneWidths, rng);
  m.head = make_stack(kBackboneOutputDim + heterog_dim, kHeadWidths, rng);
  m.output = he_init(kHeadWidths.back(), 1, rng);
  return m;
}

TraditionalModel build_traditional(Index homog_dim, Index heterog_dim, Rng& rng) {
  if (homog_dim < 1 || heterog_dim < 1) throw Error(Errc::bad_dim, "model dims must be >= 1");
  TraditionalModel m;
  m.stack = make_stack(homog_dim + heterog_dim, kBackboneWidths, rng);
  m.output = he_init(kBackboneWidths.back(), 1, rng);
  return m;
}

std::size_t parameter_count(const HftHlfModel& model) {
  std::size_t count = stack_parameter_count(model.homogeneous_dim(), kBackboneWidths);
  count += stack_parameter_count(kBackboneOutputDim + model.heterogeneous_dim(), kHeadWidths);
  count += static_cast<std::size_t>(model.output.weight.size() + model.output.bias.size());
  return count;
}

std::size_t parameter_count(const TraditionalModel& model) {
  std::size_t count = stack_parameter_count(model.input_dim(), kBackboneWidths);
  count += static_cast<std::size_t>(model.output.weight.size() + model.output.bias.size());
  return count;
}

Matrix forward(HftHlfModel& model, const Matrix& homog, const Matrix& heterog, Mode mode,
               Rng& rng, ForwardCache* cache) {
  if (homog.rows() != heterog.rows())
    throw Error(Errc::shape_mismatch, "homogeneous/heterogeneous batch row counts differ");
  if (homog.cols() != model.homogeneous_dim() || heterog.cols() != model.heterogeneous_dim())
    throw Error(Errc::shape_mismatch, "batch widths do not match model dims");

  const Mode backbone_mode = model.backbone_frozen ? Mode::infer : mode;
  Matrix rep = stack_forward(model.backbone, homog, backbone_mode, model.dropout_rate, rng,
                             cache && !model.backbone_frozen ? &cache->backbone : nullptr);

  Matrix head_input(homog.rows(), kBackboneOutputDim + heterog.cols());
  head_input << rep, heterog;

  Matrix out = stack_forward(model.head, head_input, mode, model.dropout_rate, rng,
                             cache ? &cache->head : nullptr);
  Matrix pred = dense_forward(model.output, out);
  if (cache) {
    cache->head_input = std::move(head_input);
    cache->stack_output = std::move(out);
    cache->mode = mode;
    cache->backbone_skipped = model.backbone_frozen;
  }
  return pred;
}

Matrix forward(TraditionalModel& model, const Matrix& homog, const Matrix& heterog, Mode mode,
               Rng& rng, ForwardCache* cache) {
  if (homog.rows() != heterog.rows())
    throw Error(Errc::shape_mismatch, "homogeneous/heterogeneous batch row counts differ");
  Matrix input(homog.rows(), homog.cols() + heterog.cols());
  input << homog, heterog;
  if (input.cols() != model.input_dim())
    throw Error(Errc::shape_mismatch, "batch width does not match model input dim");

  Matrix out = stack_forward(model.stack, input, mode, model.dropout_rate, rng,
                             cache ? &cache->head : nullptr);
  Matrix pred = dense_forward(model.output, out);
  if (cache) {
    cache->head_input = std::move(input);
    cache->stack_output = std::move(out);
    cache->mode = mode;
  }
  return pred;
}

ModelGrads backward(const HftHlfModel& model, const ForwardCache& cache, const Matrix& upstream) {
  if (cache.mode != Mode::train)
    throw Error(Errc::shape_mismatch, "backward requires a train-mode cache");
  ModelGrads grads;
  Matrix d_head_out = dense_backward(model.output, cache.stack_output, upstream, grads.output);
  Matrix d_head_in = stack_backward(model.head, cache.head, d_head_out, grads.head);

  if (!cache.backbone_skipped) {
    Matrix d_rep = d_head_in.leftCols(kBackboneOutputDim);
    stack_backward(model.backbone, cache.backbone, d_rep, grads.backbone);
  }
  return grads;
}

ModelGrads backward(const TraditionalModel& model, const ForwardCache& cache,
                    const Matrix& upstream) {
  if (cache.mode != Mode::train)
    throw Error(Errc::shape_mismatch, "backward requires a train-mode cache");
  ModelGrads grads;
  Matrix d_stack_out = dense_backward(model.output, cache.stack_output, upstream, grads.output);
  stack_backward(model.stack, cache.head, d_stack_out, grads.head);
  return grads;
}

std::vector<TensorRef> trainable_params(HftHlfModel& model) {
  std::vector<TensorRef> refs;
  if (!model.backbone_frozen) push_block_params(refs, model.backbone);
  push_block_params(refs, model.head);
  refs.push_back({model.output.weight.data(), model.output.weight.size()});
  refs.push_back({model.output.bias.data(), model.output.bias.size()});
  return refs;
}

std::vector<TensorRef> trainable_params(TraditionalModel& model) {
  std::vector<TensorRef> refs;
  push_block_params(refs, model.stack);
  refs.push_back({model.output.weight.data(), model.output.weight.size()});
  refs.push_back({model.output.bias.data(), model.output.bias.size()});
  return refs;
}

std::vector<ConstTensorRef> grad_refs(const HftHlfModel& model, const ModelGrads& grads) {
  std::vector<ConstTensorRef> refs;
  if (!model.backbone_frozen) push_block_grads(refs, grads.backbone);
  push_block_grads(refs, grads.head);
  refs.push_back({grads.output.weight.data(), grads.output.weight.size()});
  refs.push_back({grads.output.bias.data(), grads.output.bias.size()});
  return refs;
}

std::vector<ConstTensorRef> grad_refs(const TraditionalModel&, const ModelGrads& grads) {
  std::vector<ConstTensorRef> refs;
  push_block_grads(refs, grads.head);
  refs.push_back({grads.output.weight.data(), grads.output.weight.size()});
  refs.push_back({grads.output.bias.data(), grads.output.bias.size()});
  return refs;
}

std::vector<ConstTensorRef> all_state(const HftHlfModel& model) {
  std::vector<ConstTensorRef> refs;
  push_block_state(refs, model.backbone);
  push_block_state(refs, model.head);
  refs.push_back({model.output.weight.data(), model.output.weight.size()});
  refs.push_back({model.output.bias.data(), model.output.bias.size()});
  return refs;
}

std::vector<ConstTensorRef> all_state(const TraditionalModel& model) {
  std::vector<ConstTensorRef> refs;
  push_block_state(refs, model.stack);
  refs.push_back({model.output.weight.data(), model.output.weight.size()});
  refs.push_back({model.output.bias.data(), model.output.bias.size()});
  return refs;
}

HftHlfModel transfer_backbone(const ModelCheckpoint& source, Index target_heterog_dim, Rng& rng) {
  if (source.kind != "hft_hlf")
    throw Error(Errc::kind_mismatch,
                "transfer requires an hft_hlf source checkpoint, got '" + source.kind + "'");
  if (target_heterog_dim < 1) throw Error(Errc::bad_dim, "target heterogeneous dim must be >= 1");

  const auto& src = std::get<HftHlfModel>(source.model);
  HftHlfModel m;
  m.backbone = src.backbone;  // bit-exact copy, running stats included
  m.head = make_stack(kBackboneOutputDim + target_heterog_dim, kHeadWidths, rng);
  m.output = he_init(kHeadWidths.back(), 1, rng);
  m.backbone_frozen = true;
  m.dropout_rate = src.dropout_rate;
  return m;
}

std::vector<double> predict_prices(const ModelCheckpoint& ckpt,
                                   const std::vector<PropertyRecord>& records) {
  const auto n = static_cast<Index>(records.size());
  Matrix homog(n, static_cast<Index>(ckpt.layout.homogeneous_dim()));
  Matrix heterog(n, static_cast<Index>(heterogeneous_dim(ckpt.vocab)));
  for (Index i = 0; i < n; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    homog.row(i) = encode_homogeneous(rec, ckpt.norm, ckpt.layout).transpose();
    heterog.row(i) = encode_heterogeneous(rec, ckpt.vocab).transpose();
  }

  Rng rng(0);  // unused in infer mode
  AnyModel model = ckpt.model;
  Matrix pred = std::visit(
      [&](auto& m) { return forward(m, homog, heterog, Mode::infer, rng, nullptr); }, model);

  std::vector<double> prices(records.size());
  for (Index i = 0; i < n; ++i) {
    prices[static_cast<std::size_t>(i)] = decode_target(pred(i, 0), ckpt.norm);
  }
  return prices;
}

ModelCheckpoint make_checkpoint(AnyModel model, const NormStats& norm, const CityVocabulary& vocab,
                                const FeatureLayout& layout, const TrainingMeta& meta) {
  ModelCheckpoint ckpt;
  ckpt.kind = std::holds_alternative<HftHlfModel>(model) ? "hft_hlf" : "traditional";
  ckpt.model = std::move(model);
  ckpt.norm = norm;
  ckpt.vocab = vocab;
  ckpt.layout = layout;
  ckpt.meta = meta;
  return ckpt;
}

}  // namespace appraisal
