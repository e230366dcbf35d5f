#pragma once

#include <string>
#include <vector>

#include "appraisal/linalg.hpp"
#include "appraisal/records.hpp"

namespace appraisal {

// Index of each numeric homogeneous field in the fixed slot order.
inline constexpr std::size_t kNumericFieldCount = 7;
inline constexpr std::array<const char*, kNumericFieldCount> kNumericFieldNames = {
    "year", "area", "bedroom", "livingroom", "kitchen", "bathroom", "floor"};

// z-score statistics for the numeric homogeneous fields plus the log-price
// target. Population formula; standard deviations clamped at 1e-8. Always
// fitted on the training split only.
struct NormStats {
  std::array<double, kNumericFieldCount> mean{};
  std::array<double, kNumericFieldCount> stddev{};
  double target_mean = 0.0;    // mean of ln(price)
  double target_stddev = 1.0;  // clamped population std of ln(price)

  bool operator==(const NormStats&) const = default;
};

inline constexpr double kMinStddev = 1e-8;

// Slot assignment for the homogeneous feature vector. Fixed field order:
// the 7 numeric fields, then one-hot blocks for building_type (8),
// decoration (6), direction (10) and the source vocabulary's structures.
struct FeatureLayout {
  std::vector<std::string> structures;  // category order of the structure block

  std::size_t building_type_offset() const { return kNumericFieldCount; }
  std::size_t decoration_offset() const { return building_type_offset() + kBuildingTypeCount; }
  std::size_t direction_offset() const { return decoration_offset() + kDecorationCount; }
  std::size_t structure_offset() const { return direction_offset() + kDirectionCount; }
  std::size_t homogeneous_dim() const { return structure_offset() + structures.size(); }

  // One name per vector index; a bijection onto [0, homogeneous_dim).
  std::vector<std::string> slot_names() const;

  bool operator==(const FeatureLayout&) const = default;
};

std::size_t heterogeneous_dim(const CityVocabulary& vocab);

struct EncodedDataset {
  Matrix homogeneous;   // N x homogeneous_dim
  Matrix heterogeneous; // N x heterogeneous_dim
  Vector targets;       // standardized log prices, length N
};

NormStats fit_normalizer(const std::vector<PropertyRecord>& train);

FeatureLayout make_layout(const CityVocabulary& source_vocab);

Vector encode_homogeneous(const PropertyRecord& rec, const NormStats& norm,
                          const FeatureLayout& layout);

Vector encode_heterogeneous(const PropertyRecord& rec, const CityVocabulary& vocab);

double encode_target(double price, const NormStats& norm);
double decode_target(double t, const NormStats& norm);

EncodedDataset encode_dataset(const std::vector<PropertyRecord>& records, const NormStats& norm,
                              const FeatureLayout& layout, const CityVocabulary& vocab);

}  // namespace appraisal
