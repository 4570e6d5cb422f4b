#pragma once

namespace gibbs {

/// Mutual information, lautum information and their sum, in nats.
struct InfoTriple {
  double mutual = 0.0;
  double lautum = 0.0;
  double skl = 0.0;

  static InfoTriple from(double mutual, double lautum) { return {mutual, lautum, mutual + lautum}; }
};

}  // namespace gibbs
