#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace gibbs::cli {

/// Bad or unknown configuration; maps to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A flat JSON object with dotted keys, e.g. {"problem.n": 10}.
class Config {
 public:
  Config() : doc_(nlohmann::json::object()) {}

  static Config from_file(const std::string& path);
  static Config from_json(nlohmann::json doc);

  /// Throws ConfigError naming the first key not in `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  bool has(const std::string& key) const { return doc_.contains(key); }
  void set(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }

  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  std::uint64_t u64(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::vector<double>> matrix(const std::string& key, std::vector<std::vector<double>> fallback) const;

  const nlohmann::json& doc() const { return doc_; }

 private:
  const nlohmann::json& at(const std::string& key) const;
  nlohmann::json doc_;
};

}  // namespace gibbs::cli
