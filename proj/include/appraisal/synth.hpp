#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "appraisal/records.hpp"

namespace appraisal {

// Fixed reference statistics used to z-score the numeric drivers inside the
// pricing function (generator constants, not data-dependent).
inline constexpr double kRefAreaMean = 100.0;
inline constexpr double kRefAreaStd = 60.0;
inline constexpr double kRefFloorMean = 5.0;
inline constexpr double kRefFloorStd = 5.0;
inline constexpr double kRefYearMean = 2004.0;
inline constexpr double kRefYearStd = 8.0;

struct CitySpec {
  std::string name;
  int tier = 3;
  std::size_t n_districts = 4;
  std::size_t n_residences = 20;
  std::size_t n_records = 1000;
  double base_log_price = 10.0;
};

// A multi-city market with one shared (city-invariant) pricing function over
// the homogeneous attributes plus city-specific district/residence effects.
struct UniverseSpec {
  std::vector<CitySpec> cities;

  // Shared homogeneous effects, in log-price units.
  double area_coef = 0.30;   // per reference sd of area
  double floor_coef = 0.08;
  double year_coef = 0.10;
  double decoration_step = 0.06;  // per decoration level, None=0 .. Luxury=5
  // Per-category effects are drawn once globally from Normal(0, scale).
  double building_effect_scale = 0.12;
  double direction_effect_scale = 0.08;
  double structure_effect_scale = 0.10;

  double district_effect_std = 0.25;
  double residence_effect_std = 0.20;
  double noise_std = 0.10;

  std::uint64_t seed = 42;
};

// Source city at 5,000 records / 10 districts / 50 residences, target at
// 1,000 / 4 / 20.
UniverseSpec default_universe_spec();

// The categorical effect values and location effects actually drawn for one
// generated universe; lets tests evaluate the true pricing function.
struct RealizedEffects {
  std::array<double, kBuildingTypeCount> building{};
  std::array<double, kDirectionCount> direction{};
  std::vector<std::string> structure_labels;
  std::vector<double> structure;

  std::map<std::string, std::vector<double>> district_effects;   // city -> per district
  std::map<std::string, std::vector<double>> residence_effects;  // city -> per residence
  std::map<std::string, std::vector<std::size_t>> residence_district;  // residence -> district idx
};

struct Universe {
  std::map<std::string, std::vector<PropertyRecord>> cities;
  RealizedEffects effects;
  UniverseSpec spec;
};

Universe generate_universe(const UniverseSpec& spec);

// True shared homogeneous contribution to ln(price) for one record.
double homogeneous_log_effect(const PropertyRecord& rec, const UniverseSpec& spec,
                              const RealizedEffects& effects);

// Spec file (JSON) <-> UniverseSpec; missing fields keep their defaults.
UniverseSpec universe_spec_from_json(const std::string& text);
std::string universe_spec_to_json(const UniverseSpec& spec);

}  // namespace appraisal
