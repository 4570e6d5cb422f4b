#pragma once

// Domain types shared by every part of the library: hypotheses, datasets,
// losses, priors, data-generating models and the Gibbs kernel
//
//   P(w | s) = pi(w) exp(-alpha f(w, s)) / V(s, alpha).
//
// Finite alphabets are encoded as real vectors of dimension 1 whose single
// coordinate holds the symbol index. That keeps one Hypothesis / Dataset type
// for both the continuous and the enumerable problems.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "gibbs/estimate.hpp"
#include "gibbs/random.hpp"

namespace gibbs {

struct Hypothesis {
  std::vector<double> w;

  Hypothesis() = default;
  explicit Hypothesis(std::vector<double> values) : w(std::move(values)) {}
  static Hypothesis scalar(double v) { return Hypothesis({v}); }
  static Hypothesis symbol(std::size_t index) { return Hypothesis({static_cast<double>(index)}); }

  std::size_t dim() const noexcept { return w.size(); }
  bool operator==(const Hypothesis&) const = default;
};

enum class SampleKind { real_vector, symbol };

/// Ordered training set z_1..z_n stored row-major.
class Dataset {
 public:
  static Dataset real(std::size_t dim, std::vector<double> flat);
  static Dataset real(const std::vector<std::vector<double>>& rows);
  static Dataset scalars(std::vector<double> values) { return real(1, std::move(values)); }
  static Dataset symbols(const std::vector<std::size_t>& indices);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  SampleKind kind() const noexcept { return kind_; }

  std::span<const double> operator[](std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::size_t symbol(std::size_t i) const { return static_cast<std::size_t>(values_[i]); }
  std::span<const double> flat() const noexcept { return values_; }

  /// Coordinate-wise sum of the samples.
  std::vector<double> sum() const;

 private:
  Dataset(SampleKind kind, std::size_t dim, std::vector<double> values);

  SampleKind kind_ = SampleKind::real_vector;
  std::size_t dim_ = 0;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

enum class LossKind { squared_error, zero_one, table };

/// Non-negative, finite loss l(w, z).
class LossFunction {
 public:
  /// ||z - w||_2^2
  static LossFunction squared_error();
  /// 0 when w == z coordinate-wise, 1 otherwise.
  static LossFunction zero_one();
  /// Bounded table indexed [w][z]; rows are hypotheses, columns symbols.
  static LossFunction table(std::vector<std::vector<double>> rows);

  LossKind kind() const noexcept { return kind_; }
  double operator()(std::span<const double> w, std::span<const double> z) const;

  /// Closed interval [a, b] containing every value, when the loss is bounded.
  std::optional<std::pair<double, double>> range() const;

  std::size_t w_alphabet() const noexcept { return rows_; }
  std::size_t z_alphabet() const noexcept { return cols_; }
  double entry(std::size_t w, std::size_t z) const { return table_[w * cols_ + z]; }

  /// Analytic gradient of w -> L_E(w, s). Only the squared error is smooth.
  std::vector<double> empirical_risk_gradient(std::span<const double> w, const Dataset& s) const;

 private:
  explicit LossFunction(LossKind kind) : kind_(kind) {}

  LossKind kind_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> table_;
};

/// Prior pi(w): isotropic Gaussian N(mean, variance I) or a pmf over symbols.
class Prior {
 public:
  static Prior gaussian(std::vector<double> mean, double variance);
  static Prior finite(std::vector<double> pmf);

  bool is_finite() const noexcept { return finite_; }
  std::size_t dim() const noexcept { return finite_ ? 1 : mean_.size(); }
  std::size_t support_size() const noexcept { return pmf_.size(); }

  double log_density(const Hypothesis& w) const;
  std::vector<double> grad_log_density(const Hypothesis& w) const;
  Hypothesis sample(RandomStream& stream) const;

  const std::vector<double>& mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  const std::vector<double>& pmf() const noexcept { return pmf_; }

 private:
  Prior() = default;

  bool finite_ = false;
  std::vector<double> mean_;
  double variance_ = 0.0;
  std::vector<double> pmf_;
};

using Energy = std::function<double(const Hypothesis&, const Dataset&)>;
using EnergyGradient = std::function<std::vector<double>(const Hypothesis&, const Dataset&)>;

/// (alpha, prior, energy)-Gibbs learner.
class GibbsSpec {
 public:
  GibbsSpec(double alpha, Prior prior, Energy energy);

  /// Energy f = L_E for the given loss; records the loss for callers that need it.
  static GibbsSpec empirical_risk(double alpha, Prior prior, LossFunction loss);

  double alpha() const noexcept { return alpha_; }
  const Prior& prior() const noexcept { return prior_; }
  double energy(const Hypothesis& w, const Dataset& s) const { return energy_(w, s); }
  const std::optional<LossFunction>& loss() const noexcept { return loss_; }

  /// log pi(w) - alpha f(w, s), i.e. the unnormalized log density.
  double log_weight(const Hypothesis& w, const Dataset& s) const;

 private:
  double alpha_;
  Prior prior_;
  Energy energy_;
  std::optional<LossFunction> loss_;
};

enum class PartitionMethod { exact_sum, quadrature, importance_sampling, prior_only };

struct LogPartition {
  double log_value = 0.0;
  double rel_error = 0.0;  // estimated relative error of V itself
  PartitionMethod method = PartitionMethod::exact_sum;
};

struct PartitionOptions {
  double prior_sds = 10.0;  // quadrature half-width in prior standard deviations
  double quad_tol = 1e-13;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0x6a09e667f3bcc908ULL;
};

/// log V(s, alpha): exact sum for finite priors, adaptive Gauss-Kronrod for
/// one-dimensional Gaussian priors, importance sampling from the prior otherwise.
LogPartition log_partition(const GibbsSpec& spec, const Dataset& s, const PartitionOptions& opts = {});

double gibbs_log_density(const GibbsSpec& spec, const Hypothesis& w, const Dataset& s);
double gibbs_log_density(const GibbsSpec& spec, const Hypothesis& w, const Dataset& s,
                         const LogPartition& log_v);

/// (1/n) sum_i l(w, z_i)
double empirical_risk(const LossFunction& loss, const Hypothesis& w, const Dataset& s);

/// Symbol sequence with index `code` in lexicographic order over alphabet^n
/// (first sample most significant).
std::vector<std::size_t> decode_sequence(std::size_t code, std::size_t alphabet, std::size_t n);

/// Law of the training set S.
class DataModel {
 public:
  /// Empty placeholder (n == 0); assign one of the factories before use.
  DataModel() = default;

  /// n i.i.d. draws from N(mean, variance I); variance 0 is a point mass.
  static DataModel iid_gaussian(std::vector<double> mean, double variance, std::size_t n);
  /// n i.i.d. symbols from a pmf.
  static DataModel iid_finite(std::vector<double> pmf, std::size_t n);
  /// Arbitrary (possibly non-i.i.d.) pmf over alphabet^n.
  static DataModel finite_joint(std::size_t alphabet, std::size_t n, std::vector<double> pmf);
  /// P_S = sum_k weight_k P_{S|D=k}.
  static DataModel mixture(std::vector<double> weights, std::vector<DataModel> components);

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  SampleKind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == SampleKind::symbol; }
  bool is_iid() const noexcept;
  std::size_t alphabet_size() const noexcept { return alphabet_; }

  Dataset sample(RandomStream& stream) const;

  /// One draw of Z_i from the per-sample law (i.i.d. models only).
  Dataset sample_single(RandomStream& stream) const;

  /// Exact pmf over alphabet^n, indexed as in decode_sequence.
  std::vector<double> joint_pmf() const;

  /// L_P(w) = E[L_E(w, S)] in closed form. Available for finite models and
  /// for Gaussian models under the squared error.
  double population_risk_exact(const LossFunction& loss, const Hypothesis& w) const;

 private:
  struct IidGaussian {
    std::vector<double> mean;
    double variance;
  };
  struct IidFinite {
    std::vector<double> pmf;
  };
  struct FiniteJoint {
    std::vector<double> pmf;
  };
  struct Mixture {
    std::vector<double> weights;
    std::vector<DataModel> components;
  };

  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::size_t alphabet_ = 0;
  SampleKind kind_ = SampleKind::real_vector;
  std::variant<IidGaussian, IidFinite, FiniteJoint, Mixture> law_;
};

/// Selects the exact path or a Monte-Carlo budget behind one signature.
struct RiskBudget {
  bool exact = true;
  std::size_t mc_samples = 0;

  static RiskBudget exact_value() { return {true, 0}; }
  static RiskBudget monte_carlo(std::size_t samples) { return {false, samples}; }
};

/// L_P(w, P_S). Exact mode returns an EstimateWithError with zero error;
/// MC mode averages `mc_samples` fresh draws (single samples for i.i.d.
/// models, whole datasets otherwise).
EstimateWithError population_risk(const LossFunction& loss, const Hypothesis& w, const DataModel& model,
                                  RiskBudget budget, RandomStream& stream);

}  // namespace gibbs
