#include "zicure/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace zicure {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& context) {
  // from_chars rejects leading whitespace and '+'; trim spaces so padded
  // CSV cells still parse, then insist the whole cell is consumed.
  std::size_t begin = text.find_first_not_of(" \t");
  std::size_t end = text.find_last_not_of(" \t\r");
  if (begin == std::string_view::npos) {
    throw ValidationError(context + ": empty numeric field");
  }
  const std::string_view core = text.substr(begin, end - begin + 1);
  double value = 0.0;
  const char* first = core.data();
  const char* last = core.data() + core.size();
  if (!core.empty() && core.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ValidationError(context + ": cannot parse '" + std::string(core) +
                          "' as a number");
  }
  return value;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(current);
      current.clear();
    } else if (ch != '\r') {
      current += ch;
    }
  }
  fields.push_back(current);
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& source_name) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trimmed(line);
    if (stripped.empty()) continue;
    if (stripped.front() == '#') {
      if (!have_header) table.comments.push_back(trimmed(stripped.substr(1)));
      continue;
    }
    if (!have_header) {
      table.header = split_fields(line);
      for (std::string& h : table.header) h = trimmed(h);
      have_header = true;
      continue;
    }
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != table.header.size()) {
      throw ValidationError(source_name + ", line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.row_lines.push_back(line_no);
  }
  if (!have_header) {
    throw ValidationError(source_name + ": missing header row");
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "' for reading");
  }
  return read_csv(in, path.string());
}

void write_csv(std::ostream& out, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const std::string& sink_name) {
  for (const std::string& c : comments) out << "# " << c << '\n';
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j > 0) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << ',';
      out << row[j];
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed while writing " + sink_name);
  }
}

Dataset read_dataset_csv(std::istream& in, const std::string& source_name) {
  const CsvTable table = read_csv(in, source_name);

  auto column_index = [&](const std::string& name) -> int {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    return it == table.header.end() ? -1 : static_cast<int>(it - table.header.begin());
  };
  const int t_col = column_index("t");
  const int delta_col = column_index("delta");
  if (t_col < 0) {
    throw ValidationError(source_name + ": dataset is missing required column 't'");
  }
  if (delta_col < 0) {
    throw ValidationError(source_name + ": dataset is missing required column 'delta'");
  }

  Dataset data;
  std::vector<int> covariate_cols;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const int col = static_cast<int>(j);
    if (col == t_col || col == delta_col || table.header[j] == "label") continue;
    covariate_cols.push_back(col);
    data.covariate_names.push_back(table.header[j]);
  }

  data.observations.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string line_tag = source_name + ", line " + std::to_string(table.row_lines[i]);
    Observation obs;
    obs.time = parse_double(row[static_cast<std::size_t>(t_col)], line_tag + ", column 't'");
    const double delta_raw =
        parse_double(row[static_cast<std::size_t>(delta_col)], line_tag + ", column 'delta'");
    if (delta_raw != 0.0 && delta_raw != 1.0) {
      throw ValidationError(line_tag + ": delta must be 0 or 1, got " +
                            std::string(row[static_cast<std::size_t>(delta_col)]));
    }
    obs.event = delta_raw == 1.0 ? 1 : 0;
    if (auto problem = check_record(obs.time, obs.event)) {
      throw ValidationError(line_tag + ": " + *problem);
    }
    obs.covariates.resize(static_cast<int>(covariate_cols.size()));
    for (std::size_t j = 0; j < covariate_cols.size(); ++j) {
      obs.covariates[static_cast<int>(j)] =
          parse_double(row[static_cast<std::size_t>(covariate_cols[j])],
                       line_tag + ", column '" + data.covariate_names[j] + "'");
    }
    data.observations.push_back(std::move(obs));
  }
  data.validate();
  return data;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "' for reading");
  }
  return read_dataset_csv(in, path.string());
}

void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::string>& comments,
                       const std::vector<std::string>* labels,
                       const std::string& sink_name) {
  std::vector<std::string> header = {"t", "delta"};
  header.insert(header.end(), data.covariate_names.begin(), data.covariate_names.end());
  if (labels != nullptr) header.push_back("label");

  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& obs = data.observations[i];
    std::vector<std::string> row;
    row.reserve(header.size());
    row.push_back(format_double(obs.time));
    row.push_back(std::to_string(obs.event));
    for (int j = 0; j < obs.covariates.size(); ++j) {
      row.push_back(format_double(obs.covariates[j]));
    }
    if (labels != nullptr) row.push_back((*labels)[i]);
    rows.push_back(std::move(row));
  }
  write_csv(out, comments, header, rows, sink_name);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string fnv1a64_hex(std::string_view text) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(text);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace zicure
