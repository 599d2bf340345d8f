#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "zicure/dataset.hpp"

namespace zicure {

// Shortest round-trip decimal representation (std::to_chars), so numbers
// written here re-read bit-identically and never pick up locale separators.
std::string format_double(double value);

// Strict full-string parse via std::from_chars. `context` prefixes the
// ValidationError message, e.g. "line 7, column 't'".
double parse_double(std::string_view text, const std::string& context);

// Parsed CSV: leading '#' comment lines, a mandatory header row, and the
// data rows as raw strings. row_lines holds the 1-based file line of each
// data row for error reporting.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
};

CsvTable read_csv(std::istream& in, const std::string& source_name);
CsvTable read_csv_file(const std::filesystem::path& path);

// Writes '#'-prefixed comment lines, the header, then rows. Throws
// std::runtime_error mentioning `sink_name` if the stream fails.
void write_csv(std::ostream& out, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const std::string& sink_name);

// Dataset CSV layout: mandatory header with columns `t` and `delta` (any
// order); every other column except `label` is taken as a numeric
// covariate, in header order. Validation failures carry file line numbers.
Dataset read_dataset_csv(std::istream& in, const std::string& source_name);
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::string>& comments,
                       const std::vector<std::string>* labels,
                       const std::string& sink_name);

// FNV-1a over a canonical string, used to stamp outputs with a short
// fingerprint of the run configuration.
std::uint64_t fnv1a64(std::string_view text);
std::string fnv1a64_hex(std::string_view text);

}  // namespace zicure
