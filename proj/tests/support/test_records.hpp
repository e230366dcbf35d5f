#pragma once

#include <string>
#include <vector>

#include "appraisal/records.hpp"

namespace appraisal::test {

// A valid baseline record; tests tweak individual fields.
inline PropertyRecord sample_record() {
  PropertyRecord r;
  r.city = "metroville";
  r.district = "D01";
  r.residence = "R0001";
  r.year = 2005;
  r.building_type = BuildingType::high_rise;
  r.price = 42000.0;
  r.area = 95.5;
  r.bedroom = 2;
  r.livingroom = 1;
  r.kitchen = 1;
  r.bathroom = 1;
  r.floor = 7;
  r.structure = "flat";
  r.decoration = Decoration::simple;
  r.direction = Direction::south;
  return r;
}

inline RawRecord to_raw(const PropertyRecord& r, std::size_t row_index = 0) {
  RawRecord raw;
  raw.row_index = row_index;
  raw.fields = {r.city,
                r.district,
                r.residence,
                std::to_string(r.year),
                to_label(r.building_type),
                std::to_string(r.price),
                std::to_string(r.area),
                std::to_string(r.bedroom),
                std::to_string(r.livingroom),
                std::to_string(r.kitchen),
                std::to_string(r.bathroom),
                std::to_string(r.floor),
                r.structure,
                to_label(r.decoration),
                to_label(r.direction)};
  return raw;
}

}  // namespace appraisal::test
