#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace gibbs::cli {

/// Shortest round-trip decimal form of x ('.' separator, no locale).
std::string format_number(double x);

/// One CSV field: text, a number, or absent (written as an empty field).
struct Field {
  Field() = default;
  Field(double x) : text(format_number(x)) {}
  Field(std::optional<double> x) : text(x ? format_number(*x) : std::string()) {}
  Field(const char* s) : text(s) {}
  Field(std::string s) : text(std::move(s)) {}
  Field(std::size_t k) : text(std::to_string(k)) {}
  Field(int k) : text(std::to_string(k)) {}

  std::string text;
};

/// Comma-separated, header row first, LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header);

  void row(const std::vector<Field>& fields);
  std::size_t columns() const { return columns_; }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace gibbs::cli
