#include "gibbs/samplers.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gibbs/errors.hpp"

namespace gibbs {

namespace {

constexpr double kDivergenceNorm = 1e6;

double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

Hypothesis initial_state(const GibbsSpec& spec, const ChainConfig& cfg, RandomStream& stream) {
  Hypothesis w = cfg.init ? *cfg.init : spec.prior().sample(stream);
  if (w.dim() != spec.prior().dim()) throw std::invalid_argument("chain: initial state has wrong dimension");
  return w;
}

// Drives a Langevin chain, handing every state after a step to `visit(step, w)`.
template <typename Visit>
void run_langevin(const GibbsSpec& spec, const Dataset& s, const EnergyGradient& grad_energy, const ChainConfig& cfg,
                  RandomStream& stream, Visit&& visit) {
  cfg.validate();
  if (spec.prior().is_finite()) throw std::domain_error("langevin_chain: needs a continuous prior");
  if (!grad_energy) throw std::invalid_argument("langevin_chain: missing energy gradient");
  Hypothesis w = initial_state(spec, cfg, stream);
  const double gamma = cfg.step_size;
  const double noise = cfg.noise_scale * std::sqrt(2.0 * gamma);
  const double alpha = spec.alpha();
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const std::vector<double> g_prior = spec.prior().grad_log_density(w);
    std::vector<double> g_energy;
    if (alpha != 0.0) g_energy = grad_energy(w, s);
    for (std::size_t k = 0; k < w.dim(); ++k) {
      const double drift = (alpha != 0.0 ? alpha * g_energy[k] : 0.0) - g_prior[k];
      w.w[k] += -gamma * drift + (noise != 0.0 ? noise * stream.normal() : 0.0);
    }
    const double r = norm2(w.w);
    if (!(r <= kDivergenceNorm)) {
      std::ostringstream msg;
      msg << "langevin_chain: iterate norm exceeded 1e6 at step " << step << "; reduce the step size (gamma = " << gamma
          << ")";
      throw DivergenceError(msg.str());
    }
    visit(step, w);
  }
}

}  // namespace

void ChainConfig::validate() const {
  if (steps == 0) throw std::invalid_argument("ChainConfig: steps must be > 0");
  if (effective_burn_in() >= steps) throw std::invalid_argument("ChainConfig: burn_in must be < steps");
  if (!(step_size > 0.0)) throw std::invalid_argument("ChainConfig: step_size must be > 0");
  if (proposal_scale && !(*proposal_scale > 0.0)) throw std::invalid_argument("ChainConfig: proposal_scale must be > 0");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("ChainConfig: noise_scale must be >= 0");
}

void compute_diagnostics(ChainResult& chain) {
  chain.mean.clear();
  chain.variance.clear();
  if (chain.draws.empty()) return;
  const std::size_t d = chain.draws.front().dim();
  const auto m = static_cast<double>(chain.draws.size());
  chain.mean.assign(d, 0.0);
  chain.variance.assign(d, 0.0);
  for (const auto& w : chain.draws) {
    for (std::size_t k = 0; k < d; ++k) chain.mean[k] += w.w[k];
  }
  for (auto& x : chain.mean) x /= m;
  if (chain.draws.size() < 2) return;
  for (const auto& w : chain.draws) {
    for (std::size_t k = 0; k < d; ++k) {
      const double e = w.w[k] - chain.mean[k];
      chain.variance[k] += e * e;
    }
  }
  for (auto& x : chain.variance) x /= (m - 1.0);
}

Hypothesis sample_exact_posterior(const gaussian::GaussianMeanProblem& p, const Dataset& s, RandomStream& stream) {
  const gaussian::PosteriorParams post = gaussian::posterior_params(p, s);
  const double sd = std::sqrt(post.sigma1_sq);
  std::vector<double> w(p.d);
  for (std::size_t k = 0; k < p.d; ++k) w[k] = post.mean[k] + sd * stream.normal();
  return Hypothesis(std::move(w));
}

double mh_log_acceptance(const GibbsSpec& spec, const Dataset& s, const Hypothesis& from, const Hypothesis& to) {
  return spec.log_weight(to, s) - spec.log_weight(from, s);
}

ChainResult mh_gibbs_chain(const GibbsSpec& spec, const Dataset& s, const ChainConfig& cfg, RandomStream& stream) {
  cfg.validate();
  const Prior& prior = spec.prior();
  const std::size_t burn_in = cfg.effective_burn_in();
  const double scale = cfg.proposal_scale.value_or(
      prior.is_finite() ? 1.0 : 2.4 * std::sqrt(prior.variance()) / std::sqrt(static_cast<double>(prior.dim())));

  Hypothesis current = initial_state(spec, cfg, stream);
  double current_lw = spec.log_weight(current, s);
  if (!std::isfinite(current_lw)) throw std::invalid_argument("mh_gibbs_chain: energy not finite at the initial state");

  ChainResult out;
  out.draws.reserve(cfg.steps - burn_in);
  std::size_t accepted = 0;
  Hypothesis proposal = current;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    if (prior.is_finite()) {
      const std::size_t k = prior.support_size();
      const auto cur = static_cast<std::size_t>(current.w[0]);
      std::size_t next = cur;
      if (k > 1) {
        next = stream.index(k - 1);
        if (next >= cur) ++next;
      }
      proposal.w[0] = static_cast<double>(next);
    } else {
      for (std::size_t j = 0; j < current.dim(); ++j) proposal.w[j] = current.w[j] + scale * stream.normal();
    }
    const double proposal_lw = spec.log_weight(proposal, s);
    const double log_accept = proposal_lw - current_lw;
    if (log_accept >= 0.0 || std::log(stream.uniform()) < log_accept) {
      std::swap(current, proposal);
      current_lw = proposal_lw;
      ++accepted;
    }
    if (step >= burn_in) out.draws.push_back(current);
  }
  if (accepted == 0) throw ZeroAcceptanceError("mh_gibbs_chain: no proposal accepted; the proposal scale is pathological");
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.steps);
  compute_diagnostics(out);
  return out;
}

ChainResult langevin_chain(const GibbsSpec& spec, const Dataset& s, const EnergyGradient& grad_energy,
                           const ChainConfig& cfg, RandomStream& stream) {
  const std::size_t burn_in = cfg.effective_burn_in();
  ChainResult out;
  out.draws.reserve(cfg.steps > burn_in ? cfg.steps - burn_in : 0);
  run_langevin(spec, s, grad_energy, cfg, stream, [&](std::size_t step, const Hypothesis& w) {
    if (step >= burn_in) out.draws.push_back(w);
  });
  compute_diagnostics(out);
  return out;
}

EnergyGradient squared_error_energy_gradient() {
  return [loss = LossFunction::squared_error()](const Hypothesis& w, const Dataset& s) {
    return loss.empirical_risk_gradient(w.w, s);
  };
}

ChainResult run_chains(const std::function<ChainResult(RandomStream&)>& chain, std::size_t chains, std::uint64_t seed,
                       Execution exec) {
  if (chains == 0) throw std::invalid_argument("run_chains: need at least one chain");
  std::vector<ChainResult> results(chains);
  for_each_index(chains, exec, [&](std::size_t i) {
    RandomStream stream = RandomStream::substream(seed, i);
    results[i] = chain(stream);
  });
  ChainResult pooled;
  double acc = 0.0;
  for (auto& r : results) {
    acc += r.acceptance_rate;
    pooled.draws.insert(pooled.draws.end(), r.draws.begin(), r.draws.end());
  }
  pooled.acceptance_rate = acc / static_cast<double>(chains);
  compute_diagnostics(pooled);
  return pooled;
}

Learner exact_posterior_learner(const gaussian::GaussianMeanProblem& p) {
  p.validate();
  return [p](const Dataset& s, RandomStream& stream) { return sample_exact_posterior(p, s, stream); };
}

Learner finite_gibbs_learner(const GibbsSpec& spec) {
  if (!spec.prior().is_finite()) throw std::invalid_argument("finite_gibbs_learner: needs a finite prior");
  return [spec](const Dataset& s, RandomStream& stream) {
    const std::size_t k = spec.prior().support_size();
    std::vector<double> logw(k);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < k; ++w) {
      logw[w] = spec.log_weight(Hypothesis::symbol(w), s);
      m = std::max(m, logw[w]);
    }
    for (auto& x : logw) x = std::exp(x - m);
    return Hypothesis::symbol(stream.categorical(logw));
  };
}

Learner langevin_learner(GibbsSpec spec, EnergyGradient grad, ChainConfig cfg) {
  cfg.validate();
  return [spec = std::move(spec), grad = std::move(grad), cfg](const Dataset& s, RandomStream& stream) {
    Hypothesis last;
    run_langevin(spec, s, grad, cfg, stream, [&](std::size_t step, const Hypothesis& w) {
      if (step + 1 == cfg.steps) last = w;
    });
    return last;
  };
}

Learner mh_learner(GibbsSpec spec, ChainConfig cfg) {
  cfg.validate();
  return [spec = std::move(spec), cfg](const Dataset& s, RandomStream& stream) {
    return mh_gibbs_chain(spec, s, cfg, stream).last();
  };
}

}  // namespace gibbs
