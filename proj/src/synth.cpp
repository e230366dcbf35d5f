#include "appraisal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "appraisal/errors.hpp"
#include "appraisal/rng.hpp"

namespace appraisal {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kStructureLabels = {"duplex", "flat",   "loft",
                                                   "maisonette", "studio", "triplex"};

std::string pad_number(std::size_t v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

void validate(const UniverseSpec& spec) {
  if (spec.cities.empty()) throw Error(Errc::bad_spec, "universe needs at least one city");
  std::set<std::string> names;
  for (const auto& c : spec.cities) {
    if (c.name.empty()) throw Error(Errc::bad_spec, "city name must be non-empty");
    if (!names.insert(c.name).second)
      throw Error(Errc::bad_spec, "duplicate city name '" + c.name + "'");
    if (c.n_districts < 1 || c.n_residences < 1 || c.n_records < 1)
      throw Error(Errc::bad_spec, "city '" + c.name + "' counts must be >= 1");
    if (c.n_residences < c.n_districts)
      throw Error(Errc::bad_spec, "city '" + c.name + "' has more districts than residences");
  }
  if (spec.district_effect_std < 0 || spec.residence_effect_std < 0 || spec.noise_std < 0)
    throw Error(Errc::bad_spec, "effect standard deviations must be >= 0");
}

int clamp_int(double v, int lo, int hi) {
  int r = static_cast<int>(std::llround(v));
  return std::clamp(r, lo, hi);
}

}  // namespace

UniverseSpec default_universe_spec() {
  UniverseSpec spec;
  spec.cities = {
      {"metroville", 1, 10, 50, 5000, 10.6},
      {"smallton", 3, 4, 20, 1000, 9.9},
  };
  return spec;
}

double homogeneous_log_effect(const PropertyRecord& rec, const UniverseSpec& spec,
                              const RealizedEffects& effects) {
  double z_area = (rec.area - kRefAreaMean) / kRefAreaStd;
  double z_floor = (static_cast<double>(rec.floor) - kRefFloorMean) / kRefFloorStd;
  double z_year = (static_cast<double>(rec.year) - kRefYearMean) / kRefYearStd;
  double effect = spec.area_coef * z_area + spec.floor_coef * z_floor + spec.year_coef * z_year;
  effect += spec.decoration_step * static_cast<double>(rec.decoration);
  effect += effects.building[static_cast<std::size_t>(rec.building_type)];
  effect += effects.direction[static_cast<std::size_t>(rec.direction)];
  auto it = std::find(effects.structure_labels.begin(), effects.structure_labels.end(),
                      rec.structure);
  if (it != effects.structure_labels.end()) {
    effect += effects.structure[static_cast<std::size_t>(it - effects.structure_labels.begin())];
  }
  return effect;
}

Universe generate_universe(const UniverseSpec& spec) {
  validate(spec);
  Universe uni;
  uni.spec = spec;

  Rng root(spec.seed);
  Rng global = root.split("global-effects");
  for (auto& e : uni.effects.building) e = spec.building_effect_scale * global.normal();
  for (auto& e : uni.effects.direction) e = spec.direction_effect_scale * global.normal();
  uni.effects.structure_labels = kStructureLabels;
  uni.effects.structure.resize(kStructureLabels.size());
  for (auto& e : uni.effects.structure) e = spec.structure_effect_scale * global.normal();

  for (const auto& city : spec.cities) {
    Rng rng = root.split(city.name);

    auto& district_fx = uni.effects.district_effects[city.name];
    district_fx.resize(city.n_districts);
    for (auto& e : district_fx) e = spec.district_effect_std * rng.normal();

    auto& residence_fx = uni.effects.residence_effects[city.name];
    residence_fx.resize(city.n_residences);
    for (auto& e : residence_fx) e = spec.residence_effect_std * rng.normal();

    // Residences partitioned among districts round-robin.
    auto& res_district = uni.effects.residence_district[city.name];
    res_district.resize(city.n_residences);
    for (std::size_t r = 0; r < city.n_residences; ++r) res_district[r] = r % city.n_districts;

    std::vector<PropertyRecord> records;
    records.reserve(city.n_records);
    for (std::size_t i = 0; i < city.n_records; ++i) {
      PropertyRecord rec;
      rec.city = city.name;
      std::size_t res = static_cast<std::size_t>(rng.uniform_int(city.n_residences));
      std::size_t dist = res_district[res];
      rec.residence = "R" + pad_number(res + 1, 4);
      rec.district = "D" + pad_number(dist + 1, 2);

      rec.area = std::clamp(std::exp(std::log(90.0) + 0.45 * rng.normal()), Bounds::area_min,
                            Bounds::area_max);
      rec.year = clamp_int(kRefYearMean + kRefYearStd * rng.normal(), Bounds::year_min,
                           Bounds::paper_year_max);
      rec.bedroom = 1 + static_cast<int>(rng.uniform_int(4));
      rec.livingroom = static_cast<int>(rng.uniform_int(3));
      rec.kitchen = rng.uniform() < 0.95 ? 1 : 2;
      rec.bathroom = 1 + static_cast<int>(rng.uniform_int(2));
      rec.floor = static_cast<int>(rng.uniform_int(43)) - 2;  // [-2, 40]
      rec.building_type = static_cast<BuildingType>(rng.uniform_int(kBuildingTypeCount));
      rec.decoration = static_cast<Decoration>(rng.uniform_int(kDecorationCount));
      rec.direction = static_cast<Direction>(rng.uniform_int(kDirectionCount));
      rec.structure = kStructureLabels[static_cast<std::size_t>(
          rng.uniform_int(kStructureLabels.size()))];

      double log_price = city.base_log_price + homogeneous_log_effect(rec, spec, uni.effects) +
                         district_fx[dist] + residence_fx[res] + spec.noise_std * rng.normal();
      rec.price = std::exp(log_price);
      records.push_back(std::move(rec));
    }
    uni.cities.emplace(city.name, std::move(records));
  }
  return uni;
}

UniverseSpec universe_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::bad_spec, std::string("spec is not valid JSON: ") + e.what());
  }

  UniverseSpec spec = default_universe_spec();
  try {
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("shared")) {
      const auto& s = j.at("shared");
      auto get = [&](const char* key, double& out) {
        if (s.contains(key)) out = s.at(key).get<double>();
      };
      get("area_coef", spec.area_coef);
      get("floor_coef", spec.floor_coef);
      get("year_coef", spec.year_coef);
      get("decoration_step", spec.decoration_step);
      get("building_effect_scale", spec.building_effect_scale);
      get("direction_effect_scale", spec.direction_effect_scale);
      get("structure_effect_scale", spec.structure_effect_scale);
      get("district_effect_std", spec.district_effect_std);
      get("residence_effect_std", spec.residence_effect_std);
      get("noise_std", spec.noise_std);
    }
    if (j.contains("cities")) {
      spec.cities.clear();
      for (const auto& cj : j.at("cities")) {
        CitySpec c;
        c.name = cj.at("name").get<std::string>();
        if (cj.contains("tier")) c.tier = cj.at("tier").get<int>();
        if (cj.contains("districts")) c.n_districts = cj.at("districts").get<std::size_t>();
        if (cj.contains("residences")) c.n_residences = cj.at("residences").get<std::size_t>();
        if (cj.contains("records")) c.n_records = cj.at("records").get<std::size_t>();
        if (cj.contains("base_log_price")) c.base_log_price = cj.at("base_log_price").get<double>();
        spec.cities.push_back(std::move(c));
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::bad_spec, std::string("bad spec field: ") + e.what());
  }
  validate(spec);
  return spec;
}

std::string universe_spec_to_json(const UniverseSpec& spec) {
  json cities = json::array();
  for (const auto& c : spec.cities) {
    cities.push_back(json{{"name", c.name},
                          {"tier", c.tier},
                          {"districts", c.n_districts},
                          {"residences", c.n_residences},
                          {"records", c.n_records},
                          {"base_log_price", c.base_log_price}});
  }
  json j{{"seed", spec.seed},
         {"shared",
          json{{"area_coef", spec.area_coef},
               {"floor_coef", spec.floor_coef},
               {"year_coef", spec.year_coef},
               {"decoration_step", spec.decoration_step},
               {"building_effect_scale", spec.building_effect_scale},
               {"direction_effect_scale", spec.direction_effect_scale},
               {"structure_effect_scale", spec.structure_effect_scale},
               {"district_effect_std", spec.district_effect_std},
               {"residence_effect_std", spec.residence_effect_std},
               {"noise_std", spec.noise_std}}},
         {"cities", cities}};
  return j.dump(2);
}

}  // namespace appraisal
