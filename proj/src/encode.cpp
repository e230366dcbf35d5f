#include "appraisal/encode.hpp"

#include <algorithm>
#include <cmath>

#include "appraisal/errors.hpp"

namespace appraisal {

namespace {

std::array<double, kNumericFieldCount> numeric_fields(const PropertyRecord& r) {
  return {static_cast<double>(r.year),     r.area,
          static_cast<double>(r.bedroom),  static_cast<double>(r.livingroom),
          static_cast<double>(r.kitchen),  static_cast<double>(r.bathroom),
          static_cast<double>(r.floor)};
}

// Index of value in a sorted unique list, or npos.
std::size_t index_of(const std::vector<std::string>& sorted, const std::string& value) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  if (it != sorted.end() && *it == value) return static_cast<std::size_t>(it - sorted.begin());
  return static_cast<std::size_t>(-1);
}

}  // namespace

std::vector<std::string> FeatureLayout::slot_names() const {
  std::vector<std::string> names;
  names.reserve(homogeneous_dim());
  for (auto* f : kNumericFieldNames) names.push_back(std::string("num:") + f);
  for (std::size_t i = 0; i < kBuildingTypeCount; ++i)
    names.push_back(std::string("building_type:") + to_label(static_cast<BuildingType>(i)));
  for (std::size_t i = 0; i < kDecorationCount; ++i)
    names.push_back(std::string("decoration:") + to_label(static_cast<Decoration>(i)));
  for (std::size_t i = 0; i < kDirectionCount; ++i)
    names.push_back(std::string("direction:") + to_label(static_cast<Direction>(i)));
  for (const auto& s : structures) names.push_back("structure:" + s);
  return names;
}

std::size_t heterogeneous_dim(const CityVocabulary& vocab) {
  return vocab.districts.size() + vocab.residences.size();
}

NormStats fit_normalizer(const std::vector<PropertyRecord>& train) {
  if (train.empty()) throw Error(Errc::empty_input, "cannot fit a normalizer on no records");
  const double n = static_cast<double>(train.size());

  NormStats stats;
  std::array<double, kNumericFieldCount> sum{};
  std::array<double, kNumericFieldCount> sum_sq{};
  double t_sum = 0.0, t_sum_sq = 0.0;
  for (const auto& rec : train) {
    auto vals = numeric_fields(rec);
    for (std::size_t i = 0; i < kNumericFieldCount; ++i) {
      sum[i] += vals[i];
      sum_sq[i] += vals[i] * vals[i];
    }
    double t = std::log(rec.price);
    t_sum += t;
    t_sum_sq += t * t;
  }
  for (std::size_t i = 0; i < kNumericFieldCount; ++i) {
    stats.mean[i] = sum[i] / n;
    double var = sum_sq[i] / n - stats.mean[i] * stats.mean[i];
    stats.stddev[i] = std::max(std::sqrt(std::max(var, 0.0)), kMinStddev);
  }
  stats.target_mean = t_sum / n;
  double t_var = t_sum_sq / n - stats.target_mean * stats.target_mean;
  stats.target_stddev = std::max(std::sqrt(std::max(t_var, 0.0)), kMinStddev);
  return stats;
}

FeatureLayout make_layout(const CityVocabulary& source_vocab) {
  return FeatureLayout{source_vocab.structures};
}

Vector encode_homogeneous(const PropertyRecord& rec, const NormStats& norm,
                          const FeatureLayout& layout) {
  Vector v = Vector::Zero(static_cast<Index>(layout.homogeneous_dim()));
  auto vals = numeric_fields(rec);
  for (std::size_t i = 0; i < kNumericFieldCount; ++i) {
    v[static_cast<Index>(i)] = (vals[i] - norm.mean[i]) / norm.stddev[i];
  }
  v[static_cast<Index>(layout.building_type_offset() + static_cast<std::size_t>(rec.building_type))] = 1.0;
  v[static_cast<Index>(layout.decoration_offset() + static_cast<std::size_t>(rec.decoration))] = 1.0;
  v[static_cast<Index>(layout.direction_offset() + static_cast<std::size_t>(rec.direction))] = 1.0;
  // Unknown structure categories encode as an all-zero block.
  std::size_t s = index_of(layout.structures, rec.structure);
  if (s != static_cast<std::size_t>(-1)) {
    v[static_cast<Index>(layout.structure_offset() + s)] = 1.0;
  }
  return v;
}

Vector encode_heterogeneous(const PropertyRecord& rec, const CityVocabulary& vocab) {
  Vector v = Vector::Zero(static_cast<Index>(heterogeneous_dim(vocab)));
  std::size_t d = index_of(vocab.districts, rec.district);
  if (d != static_cast<std::size_t>(-1)) v[static_cast<Index>(d)] = 1.0;
  std::size_t r = index_of(vocab.residences, rec.residence);
  if (r != static_cast<std::size_t>(-1)) {
    v[static_cast<Index>(vocab.districts.size() + r)] = 1.0;
  }
  return v;
}

double encode_target(double price, const NormStats& norm) {
  if (!(price > 0.0)) throw Error(Errc::non_positive_price, "price must be positive");
  return (std::log(price) - norm.target_mean) / norm.target_stddev;
}

double decode_target(double t, const NormStats& norm) {
  return std::exp(norm.target_mean + norm.target_stddev * t);
}

EncodedDataset encode_dataset(const std::vector<PropertyRecord>& records, const NormStats& norm,
                              const FeatureLayout& layout, const CityVocabulary& vocab) {
  EncodedDataset ds;
  const auto n = static_cast<Index>(records.size());
  ds.homogeneous.resize(n, static_cast<Index>(layout.homogeneous_dim()));
  ds.heterogeneous.resize(n, static_cast<Index>(heterogeneous_dim(vocab)));
  ds.targets.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    ds.homogeneous.row(i) = encode_homogeneous(rec, norm, layout).transpose();
    ds.heterogeneous.row(i) = encode_heterogeneous(rec, vocab).transpose();
    ds.targets[i] = encode_target(rec.price, norm);
  }
  return ds;
}

}  // namespace appraisal
