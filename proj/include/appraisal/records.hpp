#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace appraisal {

// The fifteen listing variables, in canonical column order.
inline constexpr std::array<const char*, 15> kColumnNames = {
    "city",     "district", "residence", "year",   "building_type",
    "price",    "area",     "bedroom",   "livingroom", "kitchen",
    "bathroom", "floor",    "structure", "decoration", "direction"};

enum class BuildingType : std::uint8_t {
  bungalow,
  high_rise,
  high_level,
  multi_storey,
  entire_block,
  semi_detached_house,
  detached_house,
  siheyuan,
};
inline constexpr std::size_t kBuildingTypeCount = 8;

enum class Decoration : std::uint8_t {
  none,
  partial,
  simple,
  mid_range,
  deluxe,
  luxury,
};
inline constexpr std::size_t kDecorationCount = 6;

enum class Direction : std::uint8_t {
  north,
  south,
  east,
  west,
  north_east,
  north_west,
  south_east,
  south_west,
  north_south,
  east_west,
};
inline constexpr std::size_t kDirectionCount = 10;

const char* to_label(BuildingType v);
const char* to_label(Decoration v);
const char* to_label(Direction v);
std::optional<BuildingType> building_type_from_label(const std::string& s);
std::optional<Decoration> decoration_from_label(const std::string& s);
std::optional<Direction> direction_from_label(const std::string& s);

// One data row as read from the CSV: raw text fields in canonical column
// order, still unvalidated.
struct RawRecord {
  std::array<std::string, 15> fields;
  std::size_t row_index = 0;  // 0-based data-row index (header excluded)
};

// One cleaned listing.
struct PropertyRecord {
  std::string city;
  std::string district;
  std::string residence;
  int year = 0;
  BuildingType building_type = BuildingType::bungalow;
  double price = 0.0;  // currency per m^2
  double area = 0.0;   // m^2
  int bedroom = 0;
  int livingroom = 0;
  int kitchen = 0;
  int bathroom = 0;
  int floor = 0;
  std::string structure;
  Decoration decoration = Decoration::none;
  Direction direction = Direction::north;

  bool operator==(const PropertyRecord&) const = default;
};

enum class DropCause : std::uint8_t {
  missing_field,
  bad_numeric,
  out_of_range,
  unknown_label,
};

struct CleanReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::map<DropCause, std::size_t> dropped_by_cause;
  // Years above the 2019 bound seen in the source data but still within the
  // hard current-year+1 bound. Retained, counted as a warning.
  std::size_t year_above_paper_max = 0;

  std::size_t dropped() const { return total - kept; }
};

const char* drop_cause_name(DropCause cause);

// Validation bounds for cleaned records.
struct Bounds {
  static constexpr int year_min = 1900;
  static constexpr int paper_year_max = 2019;  // warning threshold only
  static constexpr double area_min = 10.0;
  static constexpr double area_max = 2900.0;
  static constexpr int bedroom_max = 9;
  static constexpr int livingroom_max = 7;
  static constexpr int kitchen_max = 5;
  static constexpr int bathroom_max = 9;
  static constexpr int floor_min = -10;
  static constexpr int floor_max = 63;

  static int year_max();  // current calendar year + 1
};

// Drops rows with missing fields, unparseable numerics, out-of-range values
// or unknown enum labels. Output order follows input order.
std::pair<std::vector<PropertyRecord>, CleanReport> clean(const std::vector<RawRecord>& raws);

// Ordered categorical vocabularies for one city.
struct CityVocabulary {
  std::string city;
  std::vector<std::string> districts;   // sorted, unique
  std::vector<std::string> residences;  // sorted, unique
  std::vector<std::string> structures;  // sorted, unique

  bool operator==(const CityVocabulary&) const = default;
};

// A residence observed under more than one district; the first-seen district
// wins in the resolved mapping.
struct ResidenceDistrictConflict {
  std::string residence;
  std::string first_district;
  std::string conflicting_district;
};

CityVocabulary build_vocabulary(const std::vector<PropertyRecord>& records,
                                std::vector<ResidenceDistrictConflict>* conflicts = nullptr);

// Resolved residence -> district mapping (first-seen district wins).
std::map<std::string, std::string> residence_district_map(
    const std::vector<PropertyRecord>& records);

// Deterministic random partition; |test| = round(test_fraction * N).
std::pair<std::vector<PropertyRecord>, std::vector<PropertyRecord>> split_train_test(
    const std::vector<PropertyRecord>& records, double test_fraction, std::uint64_t seed);

}  // namespace appraisal
