#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace netdiff::io {

// Minimal CSV support: comma-separated, no quoting (none of our schemas
// need it).  Empty fields parse as std::nullopt.
std::vector<std::string> split_csv_line(const std::string& line);

// Parses a double; empty -> nullopt; garbage -> ParseError with context.
std::optional<double> parse_field(const std::string& field, const std::string& context);
double parse_required(const std::string& field, const std::string& context);

// Shortest round-trip decimal representation (std::to_chars), so rewriting
// a file from parsed values is byte-stable.
std::string format_double(double v);

struct CsvReader {
  explicit CsvReader(const std::string& path);
  // Returns false at EOF; skips blank lines.
  bool next_row(std::vector<std::string>& fields);
  std::size_t line_number() const { return line_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void raw_line(const std::string& line);
  void row(const std::vector<std::string>& fields);
  ~CsvWriter();

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace netdiff::io
