#include <doctest.h>

#include "appraisal/csv.hpp"
#include "appraisal/errors.hpp"
#include "support/test_records.hpp"

using namespace appraisal;

namespace {

const char* kHeader =
    "city,district,residence,year,building_type,price,area,bedroom,livingroom,kitchen,"
    "bathroom,floor,structure,decoration,direction";

std::string one_row_csv() {
  return std::string(kHeader) +
         "\nmetroville,D01,R0001,2005,High-rise,42000,95.5,2,1,1,1,7,flat,Simple,South\n";
}

}  // namespace

TEST_CASE("header-only file parses to nothing") {
  auto [records, errors] = parse_records(std::string(kHeader) + "\n");
  CHECK(records.empty());
  CHECK(errors.empty());
}

TEST_CASE("one valid row yields one raw record") {
  auto [records, errors] = parse_records(one_row_csv());
  REQUIRE(records.size() == 1);
  CHECK(errors.empty());
  CHECK(records[0].fields[0] == "metroville");
  CHECK(records[0].fields[4] == "High-rise");
  CHECK(records[0].fields[14] == "South");
  CHECK(records[0].row_index == 0);
}

TEST_CASE("column order does not matter") {
  std::string csv =
      "price,city,district,residence,year,building_type,area,bedroom,livingroom,kitchen,"
      "bathroom,floor,structure,decoration,direction\n"
      "42000,metroville,D01,R0001,2005,High-rise,95.5,2,1,1,1,7,flat,Simple,South\n";
  auto [records, errors] = parse_records(csv);
  REQUIRE(records.size() == 1);
  CHECK(records[0].fields[0] == "metroville");
  CHECK(records[0].fields[5] == "42000");
}

TEST_CASE("short row becomes a BadArity parse error") {
  std::string csv = std::string(kHeader) + "\nmetroville,D01,R0001,2005\n";
  auto [records, errors] = parse_records(csv);
  CHECK(records.empty());
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].row_index == 0);
  CHECK(errors[0].cause.find("BadArity") == 0);
}

TEST_CASE("missing required column is fatal") {
  std::string csv = "city,district,residence\nmetroville,D01,R0001\n";
  CHECK_THROWS_WITH_AS(parse_records(csv), doctest::Contains("price"), Error);
  try {
    parse_records(csv);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_column);
  }
}

TEST_CASE("duplicated required column is fatal") {
  std::string csv = std::string(kHeader) + ",price\n";
  try {
    parse_records(csv);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_column);
  }
}

TEST_CASE("invalid utf-8 is fatal") {
  std::string csv = one_row_csv();
  csv += "\xff\xfe";
  try {
    parse_records(csv);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_utf8);
  }
}

TEST_CASE("extra unknown columns are ignored, arity follows the header") {
  std::string csv =
      std::string(kHeader) +
      ",note\nmetroville,D01,R0001,2005,High-rise,42000,95.5,2,1,1,1,7,flat,Simple,South,hi\n";
  auto [records, errors] = parse_records(csv);
  REQUIRE(records.size() == 1);
  CHECK(errors.empty());
}

TEST_CASE("quoted fields with embedded commas and quotes round-trip") {
  auto rec = test::sample_record();
  rec.residence = "Garden, \"East\" Court";
  std::string csv = records_to_csv({rec});
  auto [raws, errors] = parse_records(csv);
  REQUIRE(raws.size() == 1);
  CHECK(errors.empty());
  CHECK(raws[0].fields[2] == rec.residence);
}

TEST_CASE("parsed + errored rows account for every data row") {
  std::string csv = one_row_csv() + "bad,row\n" +
                    "metroville,D02,R0002,2010,Multi-storey,30000,80,2,1,1,1,3,loft,Deluxe,North\n";
  auto [records, errors] = parse_records(csv);
  CHECK(records.size() + errors.size() == 3);
}

TEST_CASE("records_to_csv emits the canonical header") {
  std::string csv = records_to_csv({});
  CHECK(csv == std::string(kHeader) + "\n");
}
