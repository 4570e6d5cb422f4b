#pragma once

// Closed forms for learning the mean of Z ~ N(mu, sigmaZ^2 I_d) from n samples
// with the squared loss, a N(mu0, sigma0^2 I_d) prior and inverse temperature
// alpha = n / (2 sigma^2). These are the analytic oracles for the rest of the
// library.

#include <cstddef>
#include <vector>

#include "gibbs/core_model.hpp"
#include "gibbs/info.hpp"

namespace gibbs::gaussian {

struct GaussianMeanProblem {
  std::size_t d = 1;
  std::size_t n = 1;
  std::vector<double> mu{0.0};
  std::vector<double> mu0{0.0};
  double sigma0_sq = 1.0;
  double sigmaZ_sq = 1.0;
  double sigma_sq = 1.0;

  /// Unit variances with zero means in dimension d.
  static GaussianMeanProblem unit(std::size_t d, std::size_t n);

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  double alpha() const { return static_cast<double>(n) / (2.0 * sigma_sq); }

  /// sigma1^2 = sigma0^2 sigma^2 / (n sigma0^2 + sigma^2)
  double sigma1_sq() const;

  /// The Gibbs learner this problem describes: squared-error empirical risk,
  /// Gaussian prior, inverse temperature alpha().
  GibbsSpec gibbs_spec() const;

  DataModel data_model() const;
};

struct PosteriorParams {
  std::vector<double> mean;
  double sigma1_sq = 0.0;
};

struct ChiSquareParams {
  double sigma_ell_sq = 0.0;
  double eta = 0.0;
  std::size_t degrees = 1;
};

struct HypothesisMarginal {
  std::vector<double> mean;
  double variance = 0.0;
};

/// Parameters of the Gibbs posterior N(mean, sigma1^2 I_d) given s.
PosteriorParams posterior_params(const GaussianMeanProblem& p, const Dataset& s);

/// Expected generalization error 2 d sigma0^2 sigmaZ^2 / (n sigma0^2 + sigma^2).
double gen_error_closed(const GaussianMeanProblem& p);

/// Symmetrized KL information n d sigma1^2 sigmaZ^2 / sigma^4.
double iskl_closed(const GaussianMeanProblem& p);

/// Mutual and lautum information with per-dimension trace t = n sigma1^2 sigmaZ^2 / sigma^4:
/// I = (d/2) log(1 + t), L = d t - I. Their sum equals iskl_closed.
InfoTriple mi_lautum_closed(const GaussianMeanProblem& p);

/// Alternative Gaussian-channel expressions, I = d t - D and L = d t + D with D = (d/2)(t - log(1 + t)).
/// Their sum is 2 d t, twice the value forced by the generalization identity;
/// reported for comparison only.
InfoTriple mi_lautum_printed(const GaussianMeanProblem& p);

/// I(W; Z_i), identical for every i. For n == 1 this is the full mutual information.
double per_sample_mi_closed(const GaussianMeanProblem& p);

/// Law of ||W~ - Z~||^2 under the product of marginals: sigma_ell^2 scaled
/// non-central chi-square with d degrees and squared mean offset eta.
ChiSquareParams chi_square_params(const GaussianMeanProblem& p);

/// Marginal law of the learned hypothesis W.
HypothesisMarginal hypothesis_marginal(const GaussianMeanProblem& p);

}  // namespace gibbs::gaussian
