#pragma once

// Monte-Carlo estimators of the expected generalization error and of the
// symmetrized KL information. Replicate i always draws from substream i of
// the master seed, so the serial reference and the OpenMP kernel agree bit
// for bit and the result does not depend on the worker count.

#include <cstddef>
#include <cstdint>

#include "gibbs/core_model.hpp"
#include "gibbs/estimate.hpp"
#include "gibbs/parallel.hpp"
#include "gibbs/samplers.hpp"

namespace gibbs {

/// E[L_P(W) - L_E(W, S)] over `outer` independent (S, W) draws.
/// fresh_per_risk == 0 evaluates L_P exactly (finite or Gaussian/squared-error
/// models); otherwise L_P is averaged over that many fresh samples.
EstimateWithError mc_gen_error(const DataModel& model, const Learner& learner, const LossFunction& loss,
                               std::size_t outer, std::size_t fresh_per_risk, std::uint64_t seed,
                               Execution exec = Execution::parallel);

/// alpha * (E_{P_W x P_S}[f] - E_{P_{W,S}}[f]), the energy-gap form of the
/// symmetrized KL information. Decoupled pairs are (W_{i+1 mod outer}, S_i).
/// Valid for any energy f, not only the empirical risk.
EstimateWithError iskl_energy_gap(const GibbsSpec& spec, const DataModel& model, const Learner& learner,
                                  std::size_t outer, std::uint64_t seed, Execution exec = Execution::parallel);

/// Same, with the exact Gibbs sampler of a finite prior as the learner.
EstimateWithError iskl_energy_gap(const GibbsSpec& spec, const DataModel& model, std::size_t outer,
                                  std::uint64_t seed, Execution exec = Execution::parallel);

}  // namespace gibbs
