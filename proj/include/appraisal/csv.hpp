#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "appraisal/records.hpp"

namespace appraisal {

struct ParseError {
  std::size_t row_index;  // 0-based data-row index
  std::string cause;      // e.g. "BadArity: expected 15 fields, got 14"
};

// Parses a UTF-8 CSV with a header row naming the 15 listing columns (any
// order, matched case-sensitively; extra columns are ignored). Rows whose
// field count differs from the header's become ParseErrors. A missing or
// duplicated required column, or invalid UTF-8, throws Error (fatal).
std::pair<std::vector<RawRecord>, std::vector<ParseError>> parse_records(std::string_view csv_text);

// RFC 4180 field quoting: quotes a field only when it needs it.
std::string csv_escape(std::string_view field);

// Serializes records under the canonical header. Numbers use shortest
// round-trip formatting, '.' decimal point.
std::string records_to_csv(const std::vector<PropertyRecord>& records);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace appraisal
