#include "netdiff/csv.hpp"

#include <charconv>
#include <system_error>

#include "netdiff/errors.hpp"

namespace netdiff::io {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

std::optional<double> parse_field(const std::string& field, const std::string& context) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError(context + ": cannot parse number '" + field + "'");
  return v;
}

double parse_required(const std::string& field, const std::string& context) {
  auto v = parse_field(field, context);
  if (!v) throw ParseError(context + ": missing required value");
  return *v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("cannot format double");
  return std::string(buf, ptr);
}

CsvReader::CsvReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) throw IoError("cannot open: " + path);
}

bool CsvReader::next_row(std::vector<std::string>& fields) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.empty() || line == "\r") continue;
    fields = split_csv_line(line);
    return true;
  }
  return false;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::trunc) {
  if (!out_) throw IoError("cannot open for writing: " + path);
}

void CsvWriter::raw_line(const std::string& line) { out_ << line << '\n'; }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

CsvWriter::~CsvWriter() {
  out_.flush();
}

}  // namespace netdiff::io
