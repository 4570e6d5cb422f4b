#include "gibbs/random.hpp"

#include <stdexcept>

namespace gibbs {

std::size_t RandomStream::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("categorical: negative or NaN weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("categorical: weights sum to zero");
  const double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // u landed in the rounding gap above the last partial sum
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

std::size_t RandomStream::index(std::size_t count) {
  if (count == 0) throw std::invalid_argument("index: empty range");
  return std::uniform_int_distribution<std::size_t>(0, count - 1)(engine_);
}

}  // namespace gibbs
