#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace gibbs {

/// Monte-Carlo point estimate. Exact evaluations routed through the same
/// signature carry std_error == 0 and n_samples == 0.
struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;

  static EstimateWithError exact(double v) { return {v, 0.0, 0}; }
  bool is_exact() const noexcept { return n_samples == 0; }

  /// True when |value - target| <= k standard errors (exact: equality).
  bool within(double target, double k) const noexcept {
    return std::abs(value - target) <= k * std_error;
  }
};

/// Sample mean and standard error (sample-std / sqrt(n)), accumulated in
/// index order so that results do not depend on how values were produced.
inline EstimateWithError summarize(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("summarize: need at least two values");
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1.0);
  return {mean, std::sqrt(var / n), values.size()};
}

}  // namespace gibbs
