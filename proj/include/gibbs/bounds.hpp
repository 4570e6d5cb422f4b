#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "gibbs/gaussian_mean.hpp"
#include "gibbs/info.hpp"

namespace gibbs::bounds {

/// Inputs of the left-tail sub-Gaussian bound. sigma_subg follows the
/// convention Lambda(lambda) <= sigma^2 lambda^2 / 2; c_e must satisfy
/// c_e <= L(W;S) / I(W;S) (c_e = 0 is always admissible).
struct BoundInputs {
  double sigma_subg = 0.0;
  double alpha = 0.0;
  std::size_t n = 1;
  double c_e = 0.0;

  void validate() const;
};

/// 2 sigma^2 alpha / ((1 + C_E) n)
double thm2_bound(const BoundInputs& b);

struct PriorBounds {
  double dp = 0.0;          // sqrt(alpha / n), losses in [0, 1]
  double raginsky = 0.0;    // alpha / (2 n), losses in [0, 1]
  double kuzborskij = 0.0;  // 4 sigma^2 alpha / n
  std::optional<double> xu_mi;  // sqrt(2 sigma^2 I / n), when I is supplied
};

PriorBounds prior_bounds(double sigma_subg, double alpha, std::size_t n, std::optional<double> mutual = std::nullopt);

/// Largest admissible C_E from exact information values: L / I, or 0 when I == 0.
double exact_c_e(const InfoTriple& info);

/// Sub-Gaussian parameter (b - a) / 2 of a loss bounded in [a, b].
inline double bounded_sigma(double a, double b) { return 0.5 * (b - a); }

/// Quadratic CGF envelope Lambda(lambda) <= c lambda^2 on lambda < 0.
/// This is the raw coefficient c, not the sigma^2 / 2 convention.
struct CgfEnvelope {
  double c = 0.0;

  /// c = d sigma_ell^4 + 2 sigma_ell^2 eta
  static CgfEnvelope from(const gaussian::ChiSquareParams& chi);
  /// Equivalent sigma in the sigma^2 lambda^2 / 2 convention: sqrt(2 c).
  double as_sigma() const;
};

/// Centered CGF of the sigma_ell^2-scaled non-central chi-square:
///   -(d sigma^2 + eta) lambda + eta lambda / (1 - 2 sigma^2 lambda) - (d/2) log(1 - 2 sigma^2 lambda)
/// for lambda < 1 / (2 sigma_ell^2).
double cgf_scaled_noncentral_chisq(double lambda, const gaussian::ChiSquareParams& chi);

/// c lambda^2 for lambda < 0.
double subgaussian_envelope(double lambda, const CgfEnvelope& e);

/// Inverse of the Legendre dual of psi(lambda) = c lambda^2: 2 sqrt(c y).
double psi_star_inverse_quadratic(double c, double y);

/// inf over lambda in (0, lambda_max) of (y + psi(lambda)) / lambda, found on a
/// 200-point log-spaced grid over [1e-6, 0.999 lambda_max] and refined by
/// golden-section search to a 1e-10 bracket. An infinite lambda_max is capped
/// at 1e6.
double psi_star_inverse_numeric(const std::function<double(double)>& psi, double lambda_max, double y);

enum class IsmiMode { printed, derived, numeric };

/// Individual-sample MI bound for the Gaussian mean problem (n >= 2):
///  printed: sqrt(c I(W;Z_i)), half the envelope inverse; not a guaranteed bound,
///  derived: 2 sqrt(c I(W;Z_i)) from the quadratic envelope,
///  numeric: numeric Legendre inversion of the exact left-tail CGF.
double ismi_bound(const gaussian::GaussianMeanProblem& p, IsmiMode mode);

struct IsmiBounds {
  double printed = 0.0;
  double derived = 0.0;
  double numeric = 0.0;
};

IsmiBounds ismi_all(const gaussian::GaussianMeanProblem& p);

}  // namespace gibbs::bounds
