#include "relicmp/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace relicmp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool is_missing_token(const std::string& s) {
  if (s.empty()) return true;
  std::string low;
  for (char c : s) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return low == "na" || low == "nan" || low == "null" || low == ".";
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // raw cells
};

RawTable read_table(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "cannot open '" + path + "'");
  RawTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (header && table.header.empty() && table.rows.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (!table.rows.empty() && fields.size() != table.rows.front().size())
      fail(Errc::non_rectangular, path + ": row " + std::to_string(lineno) + " has " +
                                      std::to_string(fields.size()) + " fields, expected " +
                                      std::to_string(table.rows.front().size()));
    if (!table.header.empty() && fields.size() != table.header.size())
      fail(Errc::non_rectangular, path + ": row " + std::to_string(lineno) +
                                      " does not match the header width");
    table.rows.push_back(std::move(fields));
  }
  if (table.rows.empty()) fail(Errc::parse_error, path + ": no data rows");
  return table;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t row,
                  std::size_t col) {
  if (is_missing_token(cell))
    fail(Errc::missing_data, path + ": missing value at row " + std::to_string(row + 1) +
                                 ", column " + std::to_string(col + 1));
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    fail(Errc::parse_error, path + ": cannot parse '" + cell + "' at row " +
                                std::to_string(row + 1) + ", column " + std::to_string(col + 1));
  return v;
}

Matrix to_matrix(const RawTable& table, const std::string& path,
                 const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  Matrix m(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      m(r, c) = parse_cell(table.rows[rows[r]][cols[c]], path, rows[r], cols[c]);
  return m;
}

std::size_t resolve_group_column(const RawTable& table, const std::string& spec,
                                 const std::string& path) {
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == spec) return c;
  char* end = nullptr;
  const long idx = std::strtol(spec.c_str(), &end, 10);
  const std::size_t width = table.rows.front().size();
  if (end != spec.c_str() && *end == '\0' && idx >= 1 && static_cast<std::size_t>(idx) <= width)
    return static_cast<std::size_t>(idx - 1);
  fail(Errc::parse_error, path + ": group column '" + spec + "' not found");
}

}  // namespace

Matrix ingest_csv(const std::string& path, const CsvOptions& options) {
  if (options.group_col)
    fail(Errc::invalid_request, "use ingest_grouped_csv for group-column input");
  const RawTable table = read_table(path, options.header);
  std::vector<std::size_t> rows(table.rows.size()), cols(table.rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  return to_matrix(table, path, rows, cols);
}

std::vector<NamedMatrix> ingest_grouped_csv(const std::string& path, const CsvOptions& options) {
  if (!options.group_col) fail(Errc::invalid_request, "group column not specified");
  const RawTable table = read_table(path, options.header);
  const std::size_t gcol = resolve_group_column(table, *options.group_col, path);
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < table.rows.front().size(); ++c)
    if (c != gcol) cols.push_back(c);
  if (cols.empty()) fail(Errc::parse_error, path + ": no item columns besides the group column");

  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& label = table.rows[r][gcol];
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      labels.push_back(label);
      members.emplace_back();
      it = labels.end() - 1;
    }
    members[static_cast<std::size_t>(it - labels.begin())].push_back(r);
  }
  std::vector<NamedMatrix> out;
  for (std::size_t g = 0; g < labels.size(); ++g)
    out.push_back({labels[g], to_matrix(table, path, members[g], cols)});
  return out;
}

}  // namespace relicmp
