#include "cli/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace gibbs::cli {

std::string format_number(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("csv: refusing to write a non-finite value");
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("csv: cannot open " + path);
  std::vector<Field> fields(header.begin(), header.end());
  row(fields);
}

void CsvWriter::row(const std::vector<Field>& fields) {
  if (fields.size() != columns_) throw std::logic_error("csv: row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quoted(fields[i].text);
  }
  out_ << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("csv: write failed");
}

}  // namespace gibbs::cli
