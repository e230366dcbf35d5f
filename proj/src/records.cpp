#include "appraisal/records.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>

#include "appraisal/errors.hpp"
#include "appraisal/rng.hpp"

namespace appraisal {

namespace {

constexpr std::array<const char*, kBuildingTypeCount> kBuildingTypeLabels = {
    "Bungalow",     "High-rise",           "High-level",     "Multi-storey",
    "Entire Block", "Semi-detached House", "Detached House", "Siheyuan"};

constexpr std::array<const char*, kDecorationCount> kDecorationLabels = {
    "None", "Partial", "Simple", "Mid-range", "Deluxe", "Luxury"};

constexpr std::array<const char*, kDirectionCount> kDirectionLabels = {
    "North",     "South",     "East",      "West",      "NorthEast",
    "NorthWest", "SouthEast", "SouthWest", "NorthSouth", "EastWest"};

template <typename Enum, std::size_t N>
std::optional<Enum> from_label(const std::array<const char*, N>& labels, const std::string& s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (s == labels[i]) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

std::optional<long> parse_int(const std::string& s) {
  long value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::optional<double> parse_real(const std::string& s) {
  double value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

const char* to_label(BuildingType v) { return kBuildingTypeLabels[static_cast<std::size_t>(v)]; }
const char* to_label(Decoration v) { return kDecorationLabels[static_cast<std::size_t>(v)]; }
const char* to_label(Direction v) { return kDirectionLabels[static_cast<std::size_t>(v)]; }

std::optional<BuildingType> building_type_from_label(const std::string& s) {
  return from_label<BuildingType>(kBuildingTypeLabels, s);
}
std::optional<Decoration> decoration_from_label(const std::string& s) {
  return from_label<Decoration>(kDecorationLabels, s);
}
std::optional<Direction> direction_from_label(const std::string& s) {
  return from_label<Direction>(kDirectionLabels, s);
}

const char* drop_cause_name(DropCause cause) {
  switch (cause) {
    case DropCause::missing_field: return "MissingField";
    case DropCause::bad_numeric: return "BadNumeric";
    case DropCause::out_of_range: return "OutOfRange";
    case DropCause::unknown_label: return "UnknownLabel";
  }
  return "Unknown";
}

int Bounds::year_max() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return tm.tm_year + 1900 + 1;
}

std::pair<std::vector<PropertyRecord>, CleanReport> clean(const std::vector<RawRecord>& raws) {
  std::vector<PropertyRecord> out;
  CleanReport report;
  report.total = raws.size();
  const int year_max = Bounds::year_max();

  for (const auto& raw : raws) {
    bool missing = false;
    for (const auto& f : raw.fields) {
      if (f.empty()) {
        missing = true;
        break;
      }
    }
    if (missing) {
      ++report.dropped_by_cause[DropCause::missing_field];
      continue;
    }

    // Canonical field order: city, district, residence, year, building_type,
    // price, area, bedroom, livingroom, kitchen, bathroom, floor, structure,
    // decoration, direction.
    auto year = parse_int(raw.fields[3]);
    auto price = parse_real(raw.fields[5]);
    auto area = parse_real(raw.fields[6]);
    auto bedroom = parse_int(raw.fields[7]);
    auto livingroom = parse_int(raw.fields[8]);
    auto kitchen = parse_int(raw.fields[9]);
    auto bathroom = parse_int(raw.fields[10]);
    auto floor = parse_int(raw.fields[11]);
    if (!year || !price || !area || !bedroom || !livingroom || !kitchen || !bathroom || !floor) {
      ++report.dropped_by_cause[DropCause::bad_numeric];
      continue;
    }

    bool in_range = *year >= Bounds::year_min && *year <= year_max && *price > 0.0 &&
                    *area >= Bounds::area_min && *area <= Bounds::area_max && *bedroom >= 0 &&
                    *bedroom <= Bounds::bedroom_max && *livingroom >= 0 &&
                    *livingroom <= Bounds::livingroom_max && *kitchen >= 0 &&
                    *kitchen <= Bounds::kitchen_max && *bathroom >= 0 &&
                    *bathroom <= Bounds::bathroom_max && *floor >= Bounds::floor_min &&
                    *floor <= Bounds::floor_max;
    if (!in_range) {
      ++report.dropped_by_cause[DropCause::out_of_range];
      continue;
    }

    auto building_type = building_type_from_label(raw.fields[4]);
    auto decoration = decoration_from_label(raw.fields[13]);
    auto direction = direction_from_label(raw.fields[14]);
    if (!building_type || !decoration || !direction) {
      ++report.dropped_by_cause[DropCause::unknown_label];
      continue;
    }

    if (*year > Bounds::paper_year_max) ++report.year_above_paper_max;

    PropertyRecord rec;
    rec.city = raw.fields[0];
    rec.district = raw.fields[1];
    rec.residence = raw.fields[2];
    rec.year = static_cast<int>(*year);
    rec.building_type = *building_type;
    rec.price = *price;
    rec.area = *area;
    rec.bedroom = static_cast<int>(*bedroom);
    rec.livingroom = static_cast<int>(*livingroom);
    rec.kitchen = static_cast<int>(*kitchen);
    rec.bathroom = static_cast<int>(*bathroom);
    rec.floor = static_cast<int>(*floor);
    rec.structure = raw.fields[12];
    rec.decoration = *decoration;
    rec.direction = *direction;
    out.push_back(std::move(rec));
  }
  report.kept = out.size();
  return {std::move(out), report};
}

CityVocabulary build_vocabulary(const std::vector<PropertyRecord>& records,
                                std::vector<ResidenceDistrictConflict>* conflicts) {
  if (records.empty()) throw Error(Errc::empty_input, "cannot build a vocabulary from no records");
  const std::string& city = records.front().city;
  for (const auto& r : records) {
    if (r.city != city)
      throw Error(Errc::mixed_cities, "records span cities '" + city + "' and '" + r.city + "'");
  }

  std::set<std::string> districts, residences, structures;
  std::map<std::string, std::string> first_district;
  for (const auto& r : records) {
    districts.insert(r.district);
    residences.insert(r.residence);
    structures.insert(r.structure);
    auto [it, inserted] = first_district.emplace(r.residence, r.district);
    if (!inserted && conflicts && it->second != r.district) {
      conflicts->push_back({r.residence, it->second, r.district});
    }
  }

  CityVocabulary vocab;
  vocab.city = city;
  vocab.districts.assign(districts.begin(), districts.end());
  vocab.residences.assign(residences.begin(), residences.end());
  vocab.structures.assign(structures.begin(), structures.end());
  return vocab;
}

std::map<std::string, std::string> residence_district_map(
    const std::vector<PropertyRecord>& records) {
  std::map<std::string, std::string> mapping;
  for (const auto& r : records) mapping.emplace(r.residence, r.district);
  return mapping;
}

std::pair<std::vector<PropertyRecord>, std::vector<PropertyRecord>> split_train_test(
    const std::vector<PropertyRecord>& records, double test_fraction, std::uint64_t seed) {
  const std::size_t n = records.size();
  const auto test_size = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng = Rng(seed).split("train-test-split");
  rng.shuffle(order);

  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < test_size; ++i) is_test[order[i]] = true;

  std::vector<PropertyRecord> train, test;
  train.reserve(n - test_size);
  test.reserve(test_size);
  for (std::size_t i = 0; i < n; ++i) {
    (is_test[i] ? test : train).push_back(records[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace appraisal
