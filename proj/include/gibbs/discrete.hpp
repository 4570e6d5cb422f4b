#pragma once

// Exact enumeration of the joint law of (S, W) for finite sample and
// hypothesis alphabets. This is the oracle for the generalization identity
// alpha * gen = I(W;S) + L(W;S); it also accepts non-i.i.d. data laws.

#include <cstddef>
#include <vector>

#include "gibbs/core_model.hpp"
#include "gibbs/info.hpp"
#include "gibbs/parallel.hpp"

namespace gibbs::discrete {

inline constexpr std::size_t kMaxAlphabet = 16;
inline constexpr std::size_t kMaxSamples = 4;
inline constexpr std::size_t kStateSpaceCap = 1'000'000;

struct DiscreteProblem {
  std::size_t z_alphabet = 2;
  std::size_t w_alphabet = 2;
  std::size_t n = 1;
  DataModel data;                         // finite law of S over alphabet^n
  std::vector<double> prior;              // pmf over W, strictly positive
  std::vector<std::vector<double>> loss;  // [w][z], finite and >= 0
  double alpha = 1.0;

  /// Z_1..Z_n i.i.d. from pz.
  static DiscreteProblem iid(std::vector<double> pz, std::vector<double> prior, std::vector<std::vector<double>> loss,
                             std::size_t n, double alpha);
  /// S drawn from an arbitrary finite law (joint pmf, mixture, ...).
  static DiscreteProblem with_data(DataModel data, std::vector<double> prior, std::vector<std::vector<double>> loss,
                                   double alpha);

  void validate() const;
  LossFunction loss_function() const { return LossFunction::table(loss); }
  GibbsSpec gibbs_spec() const;
};

struct JointTable {
  std::size_t z_states = 0;  // |Z|^n
  std::size_t w_states = 0;  // |W|
  std::vector<double> p_s;
  std::vector<double> empirical_risk;     // L_E(w, s), row-major [s][w]
  std::vector<double> log_p_w_given_s;    // [s][w]
  std::vector<double> p_w_given_s;        // [s][w]
  std::vector<double> p_joint;            // [s][w]
  std::vector<double> p_w;
  bool kernel_ignores_data = false;  // alpha == 0: every row is the prior

  double at(const std::vector<double>& table, std::size_t s, std::size_t w) const { return table[s * w_states + w]; }
};

/// Exact tables; Gibbs rows are normalized with log-sum-exp.
/// Throws StateSpaceError when |Z|^n * |W| exceeds kStateSpaceCap.
JointTable enumerate_joint(const DiscreteProblem& p, Execution exec = Execution::parallel);

/// sum_{s,w} p(s, w) (L_P(w) - L_E(w, s)) with L_P from the exact data law.
/// Exactly zero when the kernel ignores the data.
double exact_gen_discrete(const DiscreteProblem& p, const JointTable& t);

/// Mutual, lautum and symmetrized KL information of (W, S). Exactly zero
/// when the kernel ignores the data.
InfoTriple exact_info_discrete(const JointTable& t);

struct MixtureCheck {
  double gen_mixture = 0.0;
  double avg_gen = 0.0;
  double slack = 0.0;  // gen_mixture - avg_gen
  bool holds = false;
};

/// Generalization error under P_S = lambda P_a + (1 - lambda) P_b versus the
/// lambda-average of the per-domain errors, for one fixed Gibbs learner.
MixtureCheck mixture_concavity_check(const DiscreteProblem& a, const DiscreteProblem& b, double lambda);

struct RandomProblemLimits {
  std::size_t max_z = 4;
  std::size_t max_w = 5;
  std::size_t max_n = 3;
  std::vector<double> alphas{0.5, 1.0, 2.0};
  double loss_lo = 0.0;
  double loss_hi = 1.0;
};

/// Random i.i.d. instance: alphabets of size >= 2, strictly positive pmfs,
/// losses uniform in [loss_lo, loss_hi].
DiscreteProblem random_problem(RandomStream& stream, const RandomProblemLimits& limits = {});

/// Random pmf with entries bounded away from zero.
std::vector<double> random_pmf(RandomStream& stream, std::size_t size);

}  // namespace gibbs::discrete
