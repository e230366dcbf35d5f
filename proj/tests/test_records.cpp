#include <doctest.h>

#include <algorithm>

#include "appraisal/csv.hpp"
#include "appraisal/errors.hpp"
#include "appraisal/rng.hpp"
#include "support/test_records.hpp"

using namespace appraisal;
using test::sample_record;
using test::to_raw;

TEST_CASE("fully valid record is retained unchanged") {
  auto rec = sample_record();
  auto [cleaned, report] = clean({to_raw(rec)});
  REQUIRE(cleaned.size() == 1);
  CHECK(cleaned[0] == rec);
  CHECK(report.kept == 1);
  CHECK(report.dropped() == 0);
}

TEST_CASE("empty decoration field drops as MissingField") {
  auto raw = to_raw(sample_record());
  raw.fields[13] = "";
  auto [cleaned, report] = clean({raw});
  CHECK(cleaned.empty());
  CHECK(report.dropped_by_cause.at(DropCause::missing_field) == 1);
}

TEST_CASE("year 1850 drops as OutOfRange") {
  auto rec = sample_record();
  rec.year = 1850;
  auto [cleaned, report] = clean({to_raw(rec)});
  CHECK(cleaned.empty());
  CHECK(report.dropped_by_cause.at(DropCause::out_of_range) == 1);
}

TEST_CASE("year between 2020 and current year is kept with a warning count") {
  auto rec = sample_record();
  rec.year = 2024;
  auto [cleaned, report] = clean({to_raw(rec)});
  CHECK(cleaned.size() == 1);
  CHECK(report.year_above_paper_max == 1);
}

TEST_CASE("per-field range violations drop as OutOfRange") {
  struct Case {
    void (*tweak)(PropertyRecord&);
  };
  std::vector<void (*)(PropertyRecord&)> cases = {
      [](PropertyRecord& r) { r.price = -5.0; },
      [](PropertyRecord& r) { r.area = 5.0; },
      [](PropertyRecord& r) { r.area = 3000.0; },
      [](PropertyRecord& r) { r.bedroom = 10; },
      [](PropertyRecord& r) { r.livingroom = 8; },
      [](PropertyRecord& r) { r.kitchen = 6; },
      [](PropertyRecord& r) { r.bathroom = 10; },
      [](PropertyRecord& r) { r.floor = -11; },
      [](PropertyRecord& r) { r.floor = 64; },
      [](PropertyRecord& r) { r.year = 2999; },
  };
  for (auto tweak : cases) {
    auto rec = sample_record();
    tweak(rec);
    auto [cleaned, report] = clean({to_raw(rec)});
    CHECK(cleaned.empty());
    CHECK(report.dropped_by_cause.at(DropCause::out_of_range) == 1);
  }
}

TEST_CASE("unparseable numeric drops as BadNumeric") {
  auto raw = to_raw(sample_record());
  raw.fields[6] = "95.5m2";
  auto [cleaned, report] = clean({raw});
  CHECK(cleaned.empty());
  CHECK(report.dropped_by_cause.at(DropCause::bad_numeric) == 1);
}

TEST_CASE("unknown enum label drops as UnknownLabel") {
  auto raw = to_raw(sample_record());
  raw.fields[13] = "Opulent";
  auto [cleaned, report] = clean({raw});
  CHECK(cleaned.empty());
  CHECK(report.dropped_by_cause.at(DropCause::unknown_label) == 1);
}

TEST_CASE("clean is idempotent and order preserving") {
  std::vector<RawRecord> raws;
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    auto rec = sample_record();
    rec.residence = "R" + std::to_string(i);
    rec.price = 1000.0 + static_cast<double>(rng.uniform_int(100000));
    auto raw = to_raw(rec, static_cast<std::size_t>(i));
    // Corrupt a third of the rows in assorted ways.
    switch (i % 6) {
      case 1: raw.fields[3] = "187x"; break;
      case 3: raw.fields[10] = ""; break;
      default: break;
    }
    raws.push_back(raw);
  }
  auto [first, report1] = clean(raws);
  std::vector<RawRecord> again;
  for (std::size_t i = 0; i < first.size(); ++i) again.push_back(to_raw(first[i], i));
  auto [second, report2] = clean(again);
  CHECK(first == second);
  CHECK(report2.dropped() == 0);

  // Input order preserved: residences of survivors appear in input order.
  std::vector<std::string> expected;
  for (int i = 0; i < 50; ++i) {
    if (i % 6 != 1 && i % 6 != 3) expected.push_back("R" + std::to_string(i));
  }
  std::vector<std::string> got;
  for (const auto& r : first) got.push_back(r.residence);
  CHECK(got == expected);
}

TEST_CASE("every retained record satisfies the invariants under fuzzing") {
  Rng rng(99);
  const int year_max = Bounds::year_max();
  for (int trial = 0; trial < 500; ++trial) {
    RawRecord raw = to_raw(sample_record());
    // Randomly fuzz a handful of fields with junk, extremes or valid values.
    for (auto& f : raw.fields) {
      switch (rng.uniform_int(8)) {
        case 0: f = ""; break;
        case 1: f = "junk"; break;
        case 2: f = std::to_string(static_cast<long long>(rng.uniform_int(6000)) - 3000); break;
        default: break;  // keep
      }
    }
    auto [cleaned, report] = clean({raw});
    if (cleaned.empty()) continue;
    const auto& r = cleaned[0];
    CHECK(r.year >= Bounds::year_min);
    CHECK(r.year <= year_max);
    CHECK(r.price > 0);
    CHECK(r.area >= Bounds::area_min);
    CHECK(r.area <= Bounds::area_max);
    CHECK(r.bedroom >= 0);
    CHECK(r.bedroom <= Bounds::bedroom_max);
    CHECK(r.livingroom >= 0);
    CHECK(r.livingroom <= Bounds::livingroom_max);
    CHECK(r.kitchen >= 0);
    CHECK(r.kitchen <= Bounds::kitchen_max);
    CHECK(r.bathroom >= 0);
    CHECK(r.bathroom <= Bounds::bathroom_max);
    CHECK(r.floor >= Bounds::floor_min);
    CHECK(r.floor <= Bounds::floor_max);
  }
}

TEST_CASE("vocabulary sorts distinct values") {
  auto a = sample_record();
  a.district = "B";
  a.residence = "R2";
  a.structure = "loft";
  auto b = sample_record();
  b.district = "A";
  b.residence = "R1";
  b.structure = "flat";
  auto vocab = build_vocabulary({a, b, a});
  CHECK(vocab.districts == std::vector<std::string>{"A", "B"});
  CHECK(vocab.residences == std::vector<std::string>{"R1", "R2"});
  CHECK(vocab.structures == std::vector<std::string>{"flat", "loft"});
  CHECK(vocab.city == "metroville");
}

TEST_CASE("vocabulary is invariant under input permutation") {
  Rng rng(3);
  std::vector<PropertyRecord> records;
  for (int i = 0; i < 40; ++i) {
    auto rec = sample_record();
    rec.district = "D" + std::to_string(rng.uniform_int(5));
    rec.residence = "R" + std::to_string(rng.uniform_int(15));
    rec.structure = (i % 2) ? "flat" : "loft";
    records.push_back(rec);
  }
  auto vocab1 = build_vocabulary(records);
  rng.shuffle(records);
  auto vocab2 = build_vocabulary(records);
  CHECK(vocab1 == vocab2);
}

TEST_CASE("vocabulary rejects empty and mixed-city input") {
  try {
    build_vocabulary({});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_input);
  }
  auto a = sample_record();
  auto b = sample_record();
  b.city = "elsewhere";
  try {
    build_vocabulary({a, b});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::mixed_cities);
  }
}

TEST_CASE("residence in two districts is reported, first district wins") {
  auto a = sample_record();
  a.residence = "R1";
  a.district = "D1";
  auto b = sample_record();
  b.residence = "R1";
  b.district = "D2";
  std::vector<ResidenceDistrictConflict> conflicts;
  auto vocab = build_vocabulary({a, b}, &conflicts);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0].residence == "R1");
  CHECK(conflicts[0].first_district == "D1");
  CHECK(conflicts[0].conflicting_district == "D2");
  CHECK(vocab.districts == std::vector<std::string>{"D1", "D2"});
  CHECK(residence_district_map({a, b}).at("R1") == "D1");
}

TEST_CASE("split sizes follow round(fraction * N)") {
  std::vector<PropertyRecord> records(100, sample_record());
  auto [train, test] = split_train_test(records, 0.1, 11);
  CHECK(train.size() == 90);
  CHECK(test.size() == 10);

  auto [all_train, no_test] = split_train_test(records, 0.0, 11);
  CHECK(all_train.size() == 100);
  CHECK(no_test.empty());

  std::vector<PropertyRecord> odd(105, sample_record());
  auto [t2, s2] = split_train_test(odd, 0.1, 11);
  CHECK(s2.size() == 11);  // round(10.5) away from zero
}

TEST_CASE("split is deterministic in the seed and differs across seeds") {
  std::vector<PropertyRecord> records;
  for (int i = 0; i < 60; ++i) {
    auto rec = sample_record();
    rec.floor = i % 40;
    rec.price = 1000.0 * (i + 1);
    records.push_back(rec);
  }
  auto [train_a, test_a] = split_train_test(records, 0.25, 5);
  auto [train_b, test_b] = split_train_test(records, 0.25, 5);
  CHECK(train_a == train_b);
  CHECK(test_a == test_b);

  auto [train_c, test_c] = split_train_test(records, 0.25, 6);
  CHECK(test_a != test_c);
}
