#include "gibbs/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gibbs/errors.hpp"

namespace gibbs::discrete {

DiscreteProblem DiscreteProblem::iid(std::vector<double> pz, std::vector<double> prior,
                                     std::vector<std::vector<double>> loss, std::size_t n, double alpha) {
  return with_data(DataModel::iid_finite(std::move(pz), n), std::move(prior), std::move(loss), alpha);
}

DiscreteProblem DiscreteProblem::with_data(DataModel data, std::vector<double> prior,
                                           std::vector<std::vector<double>> loss, double alpha) {
  DiscreteProblem p;
  p.z_alphabet = data.alphabet_size();
  p.w_alphabet = prior.size();
  p.n = data.n();
  p.data = std::move(data);
  p.prior = std::move(prior);
  p.loss = std::move(loss);
  p.alpha = alpha;
  p.validate();
  return p;
}

void DiscreteProblem::validate() const {
  if (!data.is_finite()) throw std::invalid_argument("DiscreteProblem: data law must be finite");
  if (z_alphabet < 1 || z_alphabet > kMaxAlphabet || w_alphabet < 1 || w_alphabet > kMaxAlphabet) {
    throw std::invalid_argument("DiscreteProblem: alphabet sizes must be in [1, 16]");
  }
  if (n < 1 || n > kMaxSamples) throw std::invalid_argument("DiscreteProblem: n must be in [1, 4]");
  if (data.alphabet_size() != z_alphabet || data.n() != n) throw std::invalid_argument("DiscreteProblem: data law does not match (|Z|, n)");
  if (prior.size() != w_alphabet) throw std::invalid_argument("DiscreteProblem: prior must have |W| entries");
  for (double q : prior) {
    if (!(q > 0.0)) throw std::invalid_argument("DiscreteProblem: prior must be strictly positive");
  }
  if (loss.size() != w_alphabet) throw std::invalid_argument("DiscreteProblem: loss table must have |W| rows");
  for (const auto& row : loss) {
    if (row.size() != z_alphabet) throw std::invalid_argument("DiscreteProblem: loss table must have |Z| columns");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("DiscreteProblem: alpha must be finite and >= 0");
  (void)Prior::finite(prior);  // normalization check
  (void)LossFunction::table(loss);
}

GibbsSpec DiscreteProblem::gibbs_spec() const {
  return GibbsSpec::empirical_risk(alpha, Prior::finite(prior), loss_function());
}

JointTable enumerate_joint(const DiscreteProblem& p, Execution exec) {
  p.validate();
  std::size_t states = 1;
  for (std::size_t i = 0; i < p.n; ++i) states *= p.z_alphabet;
  if (states * p.w_alphabet > kStateSpaceCap) {
    std::ostringstream msg;
    msg << "enumerate_joint: |Z|^n * |W| = " << states * p.w_alphabet << " exceeds the cap " << kStateSpaceCap;
    throw StateSpaceError(msg.str());
  }

  JointTable t;
  t.z_states = states;
  t.w_states = p.w_alphabet;
  t.kernel_ignores_data = p.alpha == 0.0;
  t.p_s = p.data.joint_pmf();
  const std::size_t cells = states * p.w_alphabet;
  t.empirical_risk.resize(cells);
  t.log_p_w_given_s.resize(cells);
  t.p_w_given_s.resize(cells);
  t.p_joint.resize(cells);

  std::vector<double> log_prior(p.w_alphabet);
  for (std::size_t w = 0; w < p.w_alphabet; ++w) log_prior[w] = std::log(p.prior[w]);
  const double inv_n = 1.0 / static_cast<double>(p.n);

  for_each_index(states, exec, [&](std::size_t s) {
    const std::vector<std::size_t> seq = decode_sequence(s, p.z_alphabet, p.n);
    double* risk = &t.empirical_risk[s * p.w_alphabet];
    double* log_row = &t.log_p_w_given_s[s * p.w_alphabet];
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < p.w_alphabet; ++w) {
      double acc = 0.0;
      for (std::size_t z : seq) acc += p.loss[w][z];
      risk[w] = acc * inv_n;
      log_row[w] = log_prior[w] - p.alpha * risk[w];
      peak = std::max(peak, log_row[w]);
    }
    double norm = 0.0;
    for (std::size_t w = 0; w < p.w_alphabet; ++w) norm += std::exp(log_row[w] - peak);
    const double log_v = peak + std::log(norm);
    for (std::size_t w = 0; w < p.w_alphabet; ++w) {
      log_row[w] -= log_v;
      const double q = std::exp(log_row[w]);
      t.p_w_given_s[s * p.w_alphabet + w] = q;
      t.p_joint[s * p.w_alphabet + w] = t.p_s[s] * q;
    }
  });

  t.p_w.assign(p.w_alphabet, 0.0);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t w = 0; w < p.w_alphabet; ++w) t.p_w[w] += t.p_joint[s * p.w_alphabet + w];
  }
  return t;
}

double exact_gen_discrete(const DiscreteProblem& p, const JointTable& t) {
  if (t.w_states != p.w_alphabet || t.p_s.size() != t.z_states) throw std::invalid_argument("exact_gen_discrete: table does not match problem");
  if (t.kernel_ignores_data) return 0.0;
  const LossFunction loss = p.loss_function();
  std::vector<double> risk_p(p.w_alphabet);
  for (std::size_t w = 0; w < p.w_alphabet; ++w) risk_p[w] = p.data.population_risk_exact(loss, Hypothesis::symbol(w));
  double gen = 0.0;
  for (std::size_t s = 0; s < t.z_states; ++s) {
    for (std::size_t w = 0; w < t.w_states; ++w) {
      const double pj = t.at(t.p_joint, s, w);
      if (pj != 0.0) gen += pj * (risk_p[w] - t.at(t.empirical_risk, s, w));
    }
  }
  return gen;
}

InfoTriple exact_info_discrete(const JointTable& t) {
  if (t.kernel_ignores_data) return InfoTriple::from(0.0, 0.0);
  std::vector<double> log_p_w(t.w_states);
  for (std::size_t w = 0; w < t.w_states; ++w) log_p_w[w] = std::log(t.p_w[w]);
  double mutual = 0.0;
  double lautum = 0.0;
  for (std::size_t s = 0; s < t.z_states; ++s) {
    const double ps = t.p_s[s];
    if (ps == 0.0) continue;
    for (std::size_t w = 0; w < t.w_states; ++w) {
      const double product = ps * t.p_w[w];
      if (product == 0.0) continue;
      const double pj = t.at(t.p_joint, s, w);
      if (pj == 0.0) throw std::domain_error("exact_info_discrete: joint vanishes where the product of marginals does not");
      // log(p(s,w) / (p(s) p(w))) = log p(w|s) - log p(w)
      const double log_ratio = t.at(t.log_p_w_given_s, s, w) - log_p_w[w];
      mutual += pj * log_ratio;
      lautum -= product * log_ratio;
    }
  }
  return InfoTriple::from(mutual, lautum);
}

MixtureCheck mixture_concavity_check(const DiscreteProblem& a, const DiscreteProblem& b, double lambda) {
  if (a.z_alphabet != b.z_alphabet || a.w_alphabet != b.w_alphabet || a.n != b.n) {
    throw std::invalid_argument("mixture_concavity_check: mismatched alphabets or n");
  }
  if (a.prior != b.prior || a.loss != b.loss || a.alpha != b.alpha) {
    throw std::invalid_argument("mixture_concavity_check: domains must share the Gibbs learner (prior, loss, alpha)");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("mixture_concavity_check: lambda must be in [0, 1]");

  const double gen_a = exact_gen_discrete(a, enumerate_joint(a));
  const double gen_b = exact_gen_discrete(b, enumerate_joint(b));
  const DiscreteProblem mixed =
      DiscreteProblem::with_data(DataModel::mixture({lambda, 1.0 - lambda}, {a.data, b.data}), a.prior, a.loss, a.alpha);
  MixtureCheck out;
  out.gen_mixture = exact_gen_discrete(mixed, enumerate_joint(mixed));
  out.avg_gen = lambda * gen_a + (1.0 - lambda) * gen_b;
  out.slack = out.gen_mixture - out.avg_gen;
  out.holds = out.slack >= -1e-12;
  return out;
}

std::vector<double> random_pmf(RandomStream& stream, std::size_t size) {
  std::vector<double> pmf(size);
  double total = 0.0;
  for (auto& q : pmf) {
    q = 0.05 + stream.uniform();
    total += q;
  }
  for (auto& q : pmf) q /= total;
  return pmf;
}

DiscreteProblem random_problem(RandomStream& stream, const RandomProblemLimits& limits) {
  if (limits.max_z < 2 || limits.max_w < 2 || limits.max_n < 1 || limits.alphas.empty()) {
    throw std::invalid_argument("random_problem: limits too small");
  }
  const std::size_t z = 2 + stream.index(limits.max_z - 1);
  const std::size_t w = 2 + stream.index(limits.max_w - 1);
  const std::size_t n = 1 + stream.index(limits.max_n);
  const double alpha = limits.alphas[stream.index(limits.alphas.size())];
  std::vector<double> pz = random_pmf(stream, z);
  std::vector<double> prior = random_pmf(stream, w);
  std::vector<std::vector<double>> loss(w, std::vector<double>(z));
  for (auto& row : loss) {
    for (auto& v : row) v = limits.loss_lo + (limits.loss_hi - limits.loss_lo) * stream.uniform();
  }
  return DiscreteProblem::iid(std::move(pz), std::move(prior), std::move(loss), n, alpha);
}

}  // namespace gibbs::discrete
