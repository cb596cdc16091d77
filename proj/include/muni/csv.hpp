#pragma once

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace muni {

/// Formats a number with 10 significant digits; NaN becomes an empty cell.
std::string format_number(double value);

/// In-memory comma-separated table with a header row. Quoted fields are
/// supported; embedded newlines are not.
class CsvTable {
public:
  static CsvTable read_file(const std::filesystem::path& path);
  static CsvTable parse(std::string_view text, std::string source = "<memory>");

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return cells_.size(); }
  const std::string& source() const { return source_; }

  bool has_column(std::string_view name) const;
  /// Throws Error(MissingField) naming the file when absent.
  std::size_t column(std::string_view name) const;
  void require_columns(std::initializer_list<std::string_view> names) const;

  std::string_view cell(std::size_t row, std::size_t col) const { return cells_[row][col]; }
  std::string_view cell(std::size_t row, std::string_view name) const { return cell(row, column(name)); }

  /// "file:line" of a data row (header is line 1).
  std::string where(std::size_t row) const;

  /// Blank cell -> nullopt; unparsable cell -> Error(Parse) with file:line.
  std::optional<double> optional_number(std::size_t row, std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
  long long integer(std::size_t row, std::string_view name) const;
  bool flag(std::size_t row, std::string_view name) const;

private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> cells_;
  std::vector<std::size_t> line_numbers_;
};

class CsvWriter {
public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);

private:
  std::ostream& out_;
  std::size_t width_;
};

/// Parses `key=value` lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_key_values(std::string_view text, std::string_view source);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Splits on a delimiter and trims ASCII whitespace; empty input yields no items.
std::vector<std::string> split_list(std::string_view text, char delim = ',');

}  // namespace muni
