#include "gibbs/gaussian_mean.hpp"

#include <cmath>
#include <stdexcept>

namespace gibbs::gaussian {

GaussianMeanProblem GaussianMeanProblem::unit(std::size_t d, std::size_t n) {
  GaussianMeanProblem p;
  p.d = d;
  p.n = n;
  p.mu.assign(d, 0.0);
  p.mu0.assign(d, 0.0);
  return p;
}

void GaussianMeanProblem::validate() const {
  if (d < 1) throw std::invalid_argument("GaussianMeanProblem: d must be >= 1");
  if (n < 1) throw std::invalid_argument("GaussianMeanProblem: n must be >= 1");
  if (mu.size() != d || mu0.size() != d) throw std::invalid_argument("GaussianMeanProblem: mean vectors must have dimension d");
  if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) throw std::invalid_argument("GaussianMeanProblem: sigma0^2 must be > 0");
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) throw std::invalid_argument("GaussianMeanProblem: sigma^2 must be > 0");
  if (!(sigmaZ_sq >= 0.0) || !std::isfinite(sigmaZ_sq)) throw std::invalid_argument("GaussianMeanProblem: sigmaZ^2 must be >= 0");
}

double GaussianMeanProblem::sigma1_sq() const {
  return sigma0_sq * sigma_sq / (static_cast<double>(n) * sigma0_sq + sigma_sq);
}

GibbsSpec GaussianMeanProblem::gibbs_spec() const {
  validate();
  return GibbsSpec::empirical_risk(alpha(), Prior::gaussian(mu0, sigma0_sq), LossFunction::squared_error());
}

DataModel GaussianMeanProblem::data_model() const {
  validate();
  return DataModel::iid_gaussian(mu, sigmaZ_sq, n);
}

PosteriorParams posterior_params(const GaussianMeanProblem& p, const Dataset& s) {
  p.validate();
  if (s.dim() != p.d || s.size() != p.n) throw std::invalid_argument("posterior_params: dataset does not match problem (n, d)");
  const double s1 = p.sigma1_sq();
  const std::vector<double> total = s.sum();
  PosteriorParams out;
  out.sigma1_sq = s1;
  out.mean.resize(p.d);
  for (std::size_t k = 0; k < p.d; ++k) out.mean[k] = (s1 / p.sigma0_sq) * p.mu0[k] + (s1 / p.sigma_sq) * total[k];
  return out;
}

double gen_error_closed(const GaussianMeanProblem& p) {
  p.validate();
  const double d = static_cast<double>(p.d);
  const double n = static_cast<double>(p.n);
  return 2.0 * d * p.sigma0_sq * p.sigmaZ_sq / (n * p.sigma0_sq + p.sigma_sq);
}

namespace {

// Per-dimension trace n sigma1^2 sigmaZ^2 / sigma^4.
double channel_trace(const GaussianMeanProblem& p) {
  return static_cast<double>(p.n) * p.sigma1_sq() * p.sigmaZ_sq / (p.sigma_sq * p.sigma_sq);
}

}  // namespace

double iskl_closed(const GaussianMeanProblem& p) {
  p.validate();
  return static_cast<double>(p.d) * channel_trace(p);
}

InfoTriple mi_lautum_closed(const GaussianMeanProblem& p) {
  p.validate();
  if (p.sigmaZ_sq == 0.0) return {};
  const double d = static_cast<double>(p.d);
  const double t = channel_trace(p);
  const double mutual = 0.5 * d * std::log1p(t);
  const double skl = d * t;
  return {mutual, skl - mutual, skl};
}

InfoTriple mi_lautum_printed(const GaussianMeanProblem& p) {
  p.validate();
  if (p.sigmaZ_sq == 0.0) return {};
  const double d = static_cast<double>(p.d);
  const double t = channel_trace(p);
  const double kl = 0.5 * d * (t - std::log1p(t));
  return InfoTriple::from(d * t - kl, d * t + kl);
}

double per_sample_mi_closed(const GaussianMeanProblem& p) {
  p.validate();
  if (p.n == 1) return mi_lautum_closed(p).mutual;
  const double d = static_cast<double>(p.d);
  const double n = static_cast<double>(p.n);
  const double a = p.sigma0_sq * p.sigmaZ_sq;
  return 0.5 * d * std::log1p(a / ((n - 1.0) * a + n * p.sigma0_sq * p.sigma_sq + p.sigma_sq * p.sigma_sq));
}

ChiSquareParams chi_square_params(const GaussianMeanProblem& p) {
  p.validate();
  const double n = static_cast<double>(p.n);
  const double s1 = p.sigma1_sq();
  const double s4 = p.sigma_sq * p.sigma_sq;
  ChiSquareParams out;
  out.degrees = p.d;
  out.sigma_ell_sq = (n * s1 * s1 / s4 + 1.0) * p.sigmaZ_sq + s1;
  // W~ - Z~ has mean (sigma^2 / (n sigma0^2 + sigma^2)) (mu0 - mu); eta is its squared norm.
  const double shrink = p.sigma_sq / (n * p.sigma0_sq + p.sigma_sq);
  double eta = 0.0;
  for (std::size_t k = 0; k < p.d; ++k) {
    const double e = shrink * (p.mu0[k] - p.mu[k]);
    eta += e * e;
  }
  out.eta = eta;
  return out;
}

HypothesisMarginal hypothesis_marginal(const GaussianMeanProblem& p) {
  p.validate();
  const double n = static_cast<double>(p.n);
  const double s1 = p.sigma1_sq();
  HypothesisMarginal out;
  out.mean.resize(p.d);
  for (std::size_t k = 0; k < p.d; ++k) out.mean[k] = (s1 / p.sigma0_sq) * p.mu0[k] + (n * s1 / p.sigma_sq) * p.mu[k];
  out.variance = n * s1 * s1 / (p.sigma_sq * p.sigma_sq) * p.sigmaZ_sq + s1;
  return out;
}

}  // namespace gibbs::gaussian
