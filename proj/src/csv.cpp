#include "appraisal/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "appraisal/errors.hpp"

namespace appraisal {

namespace {

bool valid_utf8(std::string_view text) {
  std::size_t i = 0;
  const auto n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    // Reject overlong encodings, surrogates and out-of-range code points.
    if (len == 2 && cp < 0x80) return false;
    if (len == 3 && (cp < 0x800 || (cp >= 0xd800 && cp <= 0xdfff))) return false;
    if (len == 4 && (cp < 0x10000 || cp > 0x10ffff)) return false;
    i += len;
  }
  return true;
}

// Splits the whole text into rows of fields, honouring RFC 4180 quoting
// (embedded commas, quotes and newlines inside quoted fields).
std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_field();
        row_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        row_started = true;
        break;
    }
  }
  if (row_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

}  // namespace

std::pair<std::vector<RawRecord>, std::vector<ParseError>> parse_records(std::string_view csv_text) {
  if (!valid_utf8(csv_text)) throw Error(Errc::non_utf8, "input is not valid UTF-8");

  auto rows = split_csv(csv_text);
  if (rows.empty()) throw Error(Errc::missing_column, "input has no header row");

  const auto& header = rows.front();
  // slot[k] = position of canonical column k in the file's header.
  std::array<int, 15> slot;
  slot.fill(-1);
  for (std::size_t pos = 0; pos < header.size(); ++pos) {
    for (std::size_t k = 0; k < kColumnNames.size(); ++k) {
      if (header[pos] == kColumnNames[k]) {
        if (slot[k] >= 0)
          throw Error(Errc::duplicate_column, "column '" + header[pos] + "' appears twice");
        slot[k] = static_cast<int>(pos);
      }
    }
  }
  for (std::size_t k = 0; k < kColumnNames.size(); ++k) {
    if (slot[k] < 0)
      throw Error(Errc::missing_column, std::string("required column '") + kColumnNames[k] + "' not found");
  }

  std::vector<RawRecord> records;
  std::vector<ParseError> errors;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    std::size_t row_index = r - 1;
    if (cells.size() != header.size()) {
      errors.push_back({row_index, "BadArity: expected " + std::to_string(header.size()) +
                                       " fields, got " + std::to_string(cells.size())});
      continue;
    }
    RawRecord rec;
    rec.row_index = row_index;
    for (std::size_t k = 0; k < 15; ++k) rec.fields[k] = cells[static_cast<std::size_t>(slot[k])];
    records.push_back(std::move(rec));
  }
  return {std::move(records), std::move(errors)};
}

std::string csv_escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string records_to_csv(const std::vector<PropertyRecord>& records) {
  std::string out;
  for (std::size_t k = 0; k < kColumnNames.size(); ++k) {
    if (k) out += ',';
    out += kColumnNames[k];
  }
  out += '\n';
  for (const auto& r : records) {
    out += csv_escape(r.city);
    out += ',';
    out += csv_escape(r.district);
    out += ',';
    out += csv_escape(r.residence);
    out += ',';
    out += std::to_string(r.year);
    out += ',';
    out += csv_escape(to_label(r.building_type));
    out += ',';
    out += format_double(r.price);
    out += ',';
    out += format_double(r.area);
    out += ',';
    out += std::to_string(r.bedroom);
    out += ',';
    out += std::to_string(r.livingroom);
    out += ',';
    out += std::to_string(r.kitchen);
    out += ',';
    out += std::to_string(r.bathroom);
    out += ',';
    out += std::to_string(r.floor);
    out += ',';
    out += csv_escape(r.structure);
    out += ',';
    out += csv_escape(to_label(r.decoration));
    out += ',';
    out += csv_escape(to_label(r.direction));
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_error, "read failure on '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::io_error, "write failure on '" + path + "'");
}

}  // namespace appraisal
