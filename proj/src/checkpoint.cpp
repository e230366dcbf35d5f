#include <nlohmann/json.hpp>

#include "appraisal/csv.hpp"
#include "appraisal/errors.hpp"
#include "appraisal/model.hpp"

namespace appraisal {

namespace {

using json = nlohmann::json;

json to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  Index i = 0;
  for (const auto& x : arr) v[i++] = x.get<double>();
  return v;
}

Matrix matrix_from_json(const json& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  Index r = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != m.cols())
      throw Error(Errc::corrupt_checkpoint, "ragged weight matrix");
    Index c = 0;
    for (const auto& x : row) m(r, c++) = x.get<double>();
    ++r;
  }
  return m;
}

json dense_to_json(const DenseParams& p) {
  return json{{"weight", to_json(p.weight)}, {"bias", to_json(p.bias)}};
}

DenseParams dense_from_json(const json& j) {
  DenseParams p;
  p.weight = matrix_from_json(j.at("weight"));
  p.bias = vector_from_json(j.at("bias"));
  if (p.bias.size() != p.weight.rows())
    throw Error(Errc::corrupt_checkpoint, "bias length does not match weight rows");
  return p;
}

json bn_to_json(const BatchNormState& s) {
  return json{{"gamma", to_json(s.gamma)},
              {"beta", to_json(s.beta)},
              {"running_mean", to_json(s.running_mean)},
              {"running_var", to_json(s.running_var)}};
}

BatchNormState bn_from_json(const json& j) {
  BatchNormState s;
  s.gamma = vector_from_json(j.at("gamma"));
  s.beta = vector_from_json(j.at("beta"));
  s.running_mean = vector_from_json(j.at("running_mean"));
  s.running_var = vector_from_json(j.at("running_var"));
  if (s.beta.size() != s.gamma.size() || s.running_mean.size() != s.gamma.size() ||
      s.running_var.size() != s.gamma.size())
    throw Error(Errc::corrupt_checkpoint, "inconsistent batch-norm vector lengths");
  return s;
}

json blocks_dense_to_json(const std::vector<HiddenBlock>& blocks) {
  json arr = json::array();
  for (const auto& b : blocks) arr.push_back(dense_to_json(b.dense));
  return arr;
}

json blocks_bn_to_json(const std::vector<HiddenBlock>& blocks) {
  json arr = json::array();
  for (const auto& b : blocks) arr.push_back(bn_to_json(b.bn));
  return arr;
}

std::vector<HiddenBlock> blocks_from_json(const json& dense_arr, const json& bn_arr) {
  if (dense_arr.size() != bn_arr.size())
    throw Error(Errc::corrupt_checkpoint, "layer/batchnorm block counts differ");
  std::vector<HiddenBlock> blocks(dense_arr.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    blocks[i].dense = dense_from_json(dense_arr.at(i));
    blocks[i].bn = bn_from_json(bn_arr.at(i));
    if (blocks[i].bn.gamma.size() != blocks[i].dense.weight.rows())
      throw Error(Errc::corrupt_checkpoint, "batch-norm width does not match dense width");
  }
  return blocks;
}

json norm_to_json(const NormStats& n) {
  json fields = json::object();
  for (std::size_t i = 0; i < kNumericFieldCount; ++i) {
    fields[kNumericFieldNames[i]] = json{{"mean", n.mean[i]}, {"std", n.stddev[i]}};
  }
  return json{{"fields", fields},
              {"target", json{{"mean", n.target_mean}, {"std", n.target_stddev}}}};
}

NormStats norm_from_json(const json& j) {
  NormStats n;
  const auto& fields = j.at("fields");
  for (std::size_t i = 0; i < kNumericFieldCount; ++i) {
    const auto& f = fields.at(kNumericFieldNames[i]);
    n.mean[i] = f.at("mean").get<double>();
    n.stddev[i] = f.at("std").get<double>();
  }
  n.target_mean = j.at("target").at("mean").get<double>();
  n.target_stddev = j.at("target").at("std").get<double>();
  return n;
}

json vocab_to_json(const CityVocabulary& v) {
  return json{{"city", v.city},
              {"districts", v.districts},
              {"residences", v.residences},
              {"structures", v.structures}};
}

CityVocabulary vocab_from_json(const json& j) {
  CityVocabulary v;
  v.city = j.at("city").get<std::string>();
  v.districts = j.at("districts").get<std::vector<std::string>>();
  v.residences = j.at("residences").get<std::vector<std::string>>();
  v.structures = j.at("structures").get<std::vector<std::string>>();
  return v;
}

}  // namespace

std::string checkpoint_to_json(const ModelCheckpoint& ckpt) {
  json j;
  j["version"] = ckpt.version;
  j["kind"] = ckpt.kind;

  if (const auto* m = std::get_if<HftHlfModel>(&ckpt.model)) {
    j["dims"] = json{{"homogeneous", m->homogeneous_dim()},
                     {"heterogeneous", m->heterogeneous_dim()},
                     {"backbone_widths", kBackboneWidths},
                     {"head_widths", kHeadWidths},
                     {"backbone_frozen", m->backbone_frozen},
                     {"dropout_rate", m->dropout_rate}};
    j["layers"] = json{{"backbone", blocks_dense_to_json(m->backbone)},
                       {"head", blocks_dense_to_json(m->head)},
                       {"output", dense_to_json(m->output)}};
    j["batchnorm"] = json{{"backbone", blocks_bn_to_json(m->backbone)},
                          {"head", blocks_bn_to_json(m->head)}};
  } else {
    const auto& t = std::get<TraditionalModel>(ckpt.model);
    j["dims"] = json{{"input", t.input_dim()},
                     {"widths", kBackboneWidths},
                     {"dropout_rate", t.dropout_rate}};
    j["layers"] = json{{"stack", blocks_dense_to_json(t.stack)},
                       {"output", dense_to_json(t.output)}};
    j["batchnorm"] = json{{"stack", blocks_bn_to_json(t.stack)}};
  }

  j["norm_stats"] = norm_to_json(ckpt.norm);
  j["vocab"] = vocab_to_json(ckpt.vocab);
  j["layout"] = json{{"slot_names", ckpt.layout.slot_names()},
                     {"structures", ckpt.layout.structures}};
  j["meta"] = json{{"seed", ckpt.meta.seed},
                   {"epochs", ckpt.meta.epochs},
                   {"learning_rate", ckpt.meta.learning_rate},
                   {"batch_size", ckpt.meta.batch_size},
                   {"source_city", ckpt.meta.source_city}};
  return j.dump(1);
}

ModelCheckpoint checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_checkpoint, std::string("not parseable: ") + e.what());
  }

  try {
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw Error(Errc::version_mismatch, "unsupported checkpoint version " + std::to_string(version));

    ModelCheckpoint ckpt;
    ckpt.version = version;
    ckpt.kind = j.at("kind").get<std::string>();

    const auto& layers = j.at("layers");
    const auto& bn = j.at("batchnorm");
    if (ckpt.kind == "hft_hlf") {
      HftHlfModel m;
      m.backbone = blocks_from_json(layers.at("backbone"), bn.at("backbone"));
      m.head = blocks_from_json(layers.at("head"), bn.at("head"));
      m.output = dense_from_json(layers.at("output"));
      m.backbone_frozen = j.at("dims").at("backbone_frozen").get<bool>();
      m.dropout_rate = j.at("dims").at("dropout_rate").get<double>();
      if (m.backbone.size() != kBackboneWidths.size() || m.head.size() != kHeadWidths.size())
        throw Error(Errc::corrupt_checkpoint, "unexpected block counts");
      ckpt.model = std::move(m);
    } else if (ckpt.kind == "traditional") {
      TraditionalModel t;
      t.stack = blocks_from_json(layers.at("stack"), bn.at("stack"));
      t.output = dense_from_json(layers.at("output"));
      t.dropout_rate = j.at("dims").at("dropout_rate").get<double>();
      if (t.stack.size() != kBackboneWidths.size())
        throw Error(Errc::corrupt_checkpoint, "unexpected block count");
      ckpt.model = std::move(t);
    } else {
      throw Error(Errc::corrupt_checkpoint, "unknown model kind '" + ckpt.kind + "'");
    }

    ckpt.norm = norm_from_json(j.at("norm_stats"));
    ckpt.vocab = vocab_from_json(j.at("vocab"));
    ckpt.layout.structures = j.at("layout").at("structures").get<std::vector<std::string>>();

    const auto& meta = j.at("meta");
    ckpt.meta.seed = meta.at("seed").get<std::uint64_t>();
    ckpt.meta.epochs = meta.at("epochs").get<int>();
    ckpt.meta.learning_rate = meta.at("learning_rate").get<double>();
    ckpt.meta.batch_size = meta.at("batch_size").get<int>();
    ckpt.meta.source_city = meta.at("source_city").get<std::string>();
    return ckpt;
  } catch (const Error&) {
    throw;
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_checkpoint, std::string("missing or mistyped field: ") + e.what());
  }
}

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  write_text_file(path, checkpoint_to_json(ckpt));
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(read_text_file(path));
}

}  // namespace appraisal
