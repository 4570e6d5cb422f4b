#include "gibbs/bounds.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace gibbs::bounds {

namespace {

constexpr std::size_t kGridPoints = 200;
constexpr double kGridLow = 1e-6;
constexpr double kGridCap = 1e6;

// -u - log(1 - u), accurate near u = 0.
double neg_u_minus_log1m(double u) {
  if (std::abs(u) < 1e-3) {
    double term = u * u;
    double acc = 0.0;
    for (int k = 2; k <= 12; ++k) {
      acc += term / k;
      term *= u;
    }
    return acc;
  }
  return -u - std::log1p(-u);
}

}  // namespace

void BoundInputs::validate() const {
  if (!(sigma_subg >= 0.0) || !(alpha >= 0.0) || !(c_e >= 0.0)) throw std::invalid_argument("BoundInputs: values must be non-negative");
  if (n < 1) throw std::invalid_argument("BoundInputs: n must be >= 1");
}

double thm2_bound(const BoundInputs& b) {
  b.validate();
  return 2.0 * b.sigma_subg * b.sigma_subg * b.alpha / static_cast<double>(b.n) / (1.0 + b.c_e);
}

PriorBounds prior_bounds(double sigma_subg, double alpha, std::size_t n, std::optional<double> mutual) {
  BoundInputs{sigma_subg, alpha, n, 0.0}.validate();
  const double nn = static_cast<double>(n);
  PriorBounds out;
  out.dp = std::sqrt(alpha / nn);
  out.raginsky = alpha / (2.0 * nn);
  out.kuzborskij = 4.0 * sigma_subg * sigma_subg * alpha / nn;
  if (mutual) {
    if (!(*mutual >= 0.0)) throw std::invalid_argument("prior_bounds: mutual information must be >= 0");
    out.xu_mi = std::sqrt(2.0 * sigma_subg * sigma_subg * *mutual / nn);
  }
  return out;
}

double exact_c_e(const InfoTriple& info) { return info.mutual > 0.0 ? info.lautum / info.mutual : 0.0; }

CgfEnvelope CgfEnvelope::from(const gaussian::ChiSquareParams& chi) {
  const double s = chi.sigma_ell_sq;
  return {static_cast<double>(chi.degrees) * s * s + 2.0 * s * chi.eta};
}

double CgfEnvelope::as_sigma() const { return std::sqrt(2.0 * c); }

double cgf_scaled_noncentral_chisq(double lambda, const gaussian::ChiSquareParams& chi) {
  if (!(chi.sigma_ell_sq > 0.0)) throw std::invalid_argument("cgf: sigma_ell^2 must be > 0");
  const double u = 2.0 * chi.sigma_ell_sq * lambda;
  if (!(u < 1.0)) throw std::domain_error("cgf: lambda must be < 1 / (2 sigma_ell^2)");
  const double d = static_cast<double>(chi.degrees);
  // Same expression regrouped so that no O(lambda) terms cancel.
  return 0.5 * d * neg_u_minus_log1m(u) + 2.0 * chi.sigma_ell_sq * chi.eta * lambda * lambda / (1.0 - u);
}

double subgaussian_envelope(double lambda, const CgfEnvelope& e) {
  if (!(lambda < 0.0)) throw std::domain_error("subgaussian_envelope: lambda must be < 0");
  return e.c * lambda * lambda;
}

double psi_star_inverse_quadratic(double c, double y) {
  if (!(c > 0.0)) throw std::invalid_argument("psi_star_inverse_quadratic: c must be > 0");
  if (!(y >= 0.0)) throw std::invalid_argument("psi_star_inverse_quadratic: y must be >= 0");
  return 2.0 * std::sqrt(c * y);
}

double psi_star_inverse_numeric(const std::function<double(double)>& psi, double lambda_max, double y) {
  if (!(y >= 0.0)) throw std::invalid_argument("psi_star_inverse_numeric: y must be >= 0");
  if (y == 0.0) return 0.0;
  const double hi = 0.999 * std::min(lambda_max, kGridCap);
  if (!(hi > kGridLow)) throw std::domain_error("psi_star_inverse_numeric: empty feasible grid");

  auto objective = [&](double lambda) {
    const double v = (y + psi(lambda)) / lambda;
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  const double log_lo = std::log(kGridLow);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(kGridPoints - 1);
  std::array<double, kGridPoints> grid{};
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    grid[i] = std::exp(log_lo + step * static_cast<double>(i));
    const double v = objective(grid[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (!std::isfinite(best_value)) throw std::domain_error("psi_star_inverse_numeric: empty feasible grid");

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[best + 1 == kGridPoints ? best : best + 1];
  if (best == 0) {
    // Minimizer below the grid (tiny y): walk down by decades until the objective turns.
    double lambda = grid[0];
    for (int i = 0; i < 300; ++i) {
      const double next = lambda / 10.0;
      const double v = objective(next);
      if (!(v < best_value)) break;
      best_value = v;
      lambda = next;
    }
    a = lambda / 10.0;
    b = lambda * 10.0;
  }
  const double refined = boost::math::tools::brent_find_minima(objective, a, b, std::numeric_limits<double>::digits / 2).second;
  return std::min(best_value, refined);
}

double ismi_bound(const gaussian::GaussianMeanProblem& p, IsmiMode mode) {
  p.validate();
  if (p.n < 2) throw std::invalid_argument("ismi_bound: needs n >= 2");
  const gaussian::ChiSquareParams chi = gaussian::chi_square_params(p);
  const double per_sample_mi = gaussian::per_sample_mi_closed(p);
  const CgfEnvelope env = CgfEnvelope::from(chi);
  // Every sample carries the same I(W; Z_i), so the average over i is one term.
  switch (mode) {
    case IsmiMode::printed: {
      const double d = static_cast<double>(p.d);
      const double n = static_cast<double>(p.n);
      const double s = chi.sigma_ell_sq;
      const double a = p.sigma0_sq * p.sigmaZ_sq;
      const double ratio = a / ((n - 1.0) * a + n * p.sigma0_sq * p.sigma_sq + p.sigma_sq * p.sigma_sq);
      return std::sqrt((d * d * s * s + 2.0 * d * s * chi.eta) / 2.0 * std::log1p(ratio));
    }
    case IsmiMode::derived:
      return psi_star_inverse_quadratic(env.c, per_sample_mi);
    case IsmiMode::numeric:
      // psi_-(lambda) = Lambda(-lambda) on lambda > 0; the left tail has no upper limit.
      return psi_star_inverse_numeric([&](double lambda) { return cgf_scaled_noncentral_chisq(-lambda, chi); },
                                      std::numeric_limits<double>::infinity(), per_sample_mi);
  }
  return 0.0;
}

IsmiBounds ismi_all(const gaussian::GaussianMeanProblem& p) {
  return {ismi_bound(p, IsmiMode::printed), ismi_bound(p, IsmiMode::derived), ismi_bound(p, IsmiMode::numeric)};
}

}  // namespace gibbs::bounds
