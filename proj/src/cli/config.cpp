#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace gibbs::cli {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

double as_number(const std::string& key, const nlohmann::json& v) {
  if (!v.is_number()) bad(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(key, "must be finite");
  return x;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return from_json(std::move(doc));
}

Config Config::from_json(nlohmann::json doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) bad(key, "nested objects are not allowed; use dotted keys");
  }
  Config c;
  c.doc_ = std::move(doc);
  return c;
}

void Config::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : doc_.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

const nlohmann::json& Config::at(const std::string& key) const { return doc_.at(key); }

double Config::number(const std::string& key, double fallback) const {
  return has(key) ? as_number(key, at(key)) : fallback;
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) bad(key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::uint64_t Config::u64(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    bad(key, "expected an unsigned 64-bit integer");
  }
  return v.get<std::uint64_t>();
}

std::string Config::string(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  if (!at(key).is_string()) bad(key, "expected a string");
  return at(key).get<std::string>();
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  if (!at(key).is_boolean()) bad(key, "expected true or false");
  return at(key).get<bool>();
}

std::vector<double> Config::numbers(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_array()) bad(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(key, x));
  return out;
}

std::vector<std::vector<double>> Config::matrix(const std::string& key,
                                                std::vector<std::vector<double>> fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_array()) bad(key, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) {
    if (!row.is_array()) bad(key, "expected an array of rows");
    std::vector<double> r;
    for (const auto& x : row) r.push_back(as_number(key, x));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace gibbs::cli
