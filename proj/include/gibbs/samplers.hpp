#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gibbs/core_model.hpp"
#include "gibbs/gaussian_mean.hpp"
#include "gibbs/parallel.hpp"

namespace gibbs {

struct ChainConfig {
  std::size_t steps = 10000;
  std::optional<std::size_t> burn_in;  // defaults to 20% of steps
  double step_size = 1e-3;             // Langevin gamma
  std::optional<double> proposal_scale;  // MH; defaults to 2.4 sigma_prior / sqrt(d)
  double noise_scale = 1.0;            // Langevin: 0 gives noise-free gradient descent
  std::optional<Hypothesis> init;      // defaults to a draw from the prior

  std::size_t effective_burn_in() const { return burn_in.value_or(steps / 5); }
  void validate() const;
};

struct ChainResult {
  std::vector<Hypothesis> draws;
  double acceptance_rate = 1.0;  // MH only
  std::vector<double> mean;      // per coordinate
  std::vector<double> variance;  // per coordinate, unbiased

  const Hypothesis& last() const { return draws.back(); }
};

/// Per-coordinate mean and unbiased variance over a set of draws.
void compute_diagnostics(ChainResult& chain);

/// One draw from the conjugate posterior N(mu_post, sigma1^2 I_d).
Hypothesis sample_exact_posterior(const gaussian::GaussianMeanProblem& p, const Dataset& s, RandomStream& stream);

/// Log acceptance ratio of a symmetric proposal from -> to:
/// (log pi(to) - alpha f(to, s)) - (log pi(from) - alpha f(from, s)).
double mh_log_acceptance(const GibbsSpec& spec, const Dataset& s, const Hypothesis& from, const Hypothesis& to);

/// Random-walk Metropolis targeting the Gibbs distribution. Continuous priors
/// use isotropic Gaussian proposals; finite priors propose a uniformly chosen
/// different symbol.
ChainResult mh_gibbs_chain(const GibbsSpec& spec, const Dataset& s, const ChainConfig& cfg, RandomStream& stream);

/// Unadjusted Langevin iteration
///   w <- w - gamma grad(alpha f(w, s) - log pi(w)) + noise_scale sqrt(2 gamma) xi.
/// Throws DivergenceError when ||w|| exceeds 1e6.
ChainResult langevin_chain(const GibbsSpec& spec, const Dataset& s, const EnergyGradient& grad_energy,
                           const ChainConfig& cfg, RandomStream& stream);

/// Gradient of the squared-error empirical risk, for use with langevin_chain.
EnergyGradient squared_error_energy_gradient();

/// Runs `chains` independent chains on substreams of `seed` and pools their
/// post-burn-in draws (in chain order).
ChainResult run_chains(const std::function<ChainResult(RandomStream&)>& chain, std::size_t chains, std::uint64_t seed,
                       Execution exec = Execution::parallel);

/// A randomized learner: S -> W. Must be callable concurrently.
using Learner = std::function<Hypothesis(const Dataset&, RandomStream&)>;

Learner exact_posterior_learner(const gaussian::GaussianMeanProblem& p);

/// Exact draw from the Gibbs row of a finite prior (normalized by summation).
Learner finite_gibbs_learner(const GibbsSpec& spec);

/// Runs a Langevin chain per dataset and returns its final state.
Learner langevin_learner(GibbsSpec spec, EnergyGradient grad, ChainConfig cfg);

/// Runs an MH chain per dataset and returns its final state.
Learner mh_learner(GibbsSpec spec, ChainConfig cfg);

}  // namespace gibbs
