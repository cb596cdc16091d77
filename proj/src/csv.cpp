#include "muni/csv.hpp"

#include "muni/errors.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace muni {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.emplace_back(trim(field));
  return out;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.10g}", value);
}

CsvTable CsvTable::read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Validation, fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

CsvTable CsvTable::parse(std::string_view text, std::string source) {
  CsvTable t;
  t.source_ = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      t.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header_.size())
      throw Error(ErrorKind::Parse, fmt::format("{}:{}: expected {} fields, found {}", t.source_, line_no,
                                                t.header_.size(), fields.size()));
    t.cells_.push_back(std::move(fields));
    t.line_numbers_.push_back(line_no);
  }
  if (!have_header) throw Error(ErrorKind::Parse, fmt::format("{}: empty file, header expected", t.source_));
  return t;
}

bool CsvTable::has_column(std::string_view name) const {
  for (const auto& h : header_)
    if (h == name) return true;
  return false;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  throw Error(ErrorKind::MissingField, fmt::format("{}: missing column '{}'", source_, name));
}

void CsvTable::require_columns(std::initializer_list<std::string_view> names) const {
  for (auto n : names) (void)column(n);
}

std::string CsvTable::where(std::size_t row) const { return fmt::format("{}:{}", source_, line_numbers_.at(row)); }

std::optional<double> CsvTable::optional_number(std::size_t row, std::string_view name) const {
  auto s = cell(row, name);
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::Parse, fmt::format("{}: column '{}': not a number '{}'", where(row), name, s));
  return v;
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  auto v = optional_number(row, name);
  if (!v) throw Error(ErrorKind::MissingField, fmt::format("{}: column '{}' is blank", where(row), name));
  return *v;
}

long long CsvTable::integer(std::size_t row, std::string_view name) const {
  auto s = cell(row, name);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::Parse, fmt::format("{}: column '{}': not an integer '{}'", where(row), name, s));
  return v;
}

bool CsvTable::flag(std::size_t row, std::string_view name) const {
  auto s = cell(row, name);
  if (s == "1") return true;
  if (s == "0" || s.empty()) return false;
  throw Error(ErrorKind::Parse, fmt::format("{}: column '{}': expected 0/1, found '{}'", where(row), name, s));
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw Error(ErrorKind::Validation, fmt::format("csv row has {} cells, header has {}", cells.size(), width_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote_if_needed(cells[i]);
  }
  out_ << '\n';
}

std::map<std::string, std::string> parse_key_values(std::string_view text, std::string_view source) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Parse, fmt::format("{}:{}: expected key=value", source, line_no));
    kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Validation, fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str(), path.string());
}

std::vector<std::string> split_list(std::string_view text, char delim) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto next = text.find(delim, pos);
    out.emplace_back(trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace muni
