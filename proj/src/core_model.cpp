#include "gibbs/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gibbs {

namespace {

constexpr double kPmfTolerance = 1e-12;
constexpr std::size_t kJointPmfCap = 10'000'000;

void check_pmf(std::span<const double> pmf, const char* what) {
  if (pmf.empty()) throw std::invalid_argument(std::string(what) + ": empty pmf");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument(std::string(what) + ": pmf entries must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) throw std::invalid_argument(std::string(what) + ": pmf does not sum to 1");
}

bool is_index(double v) { return v >= 0.0 && std::floor(v) == v && v < 1e15; }

std::size_t checked_index(double v, std::size_t bound, const char* what) {
  if (!is_index(v) || static_cast<std::size_t>(v) >= bound) {
    throw std::invalid_argument(std::string(what) + ": symbol index out of range");
  }
  return static_cast<std::size_t>(v);
}

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > kJointPmfCap / std::max<std::size_t>(base, 1)) throw std::invalid_argument("joint pmf too large to enumerate");
    out *= base;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Dataset

Dataset::Dataset(SampleKind kind, std::size_t dim, std::vector<double> values)
    : kind_(kind), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw std::invalid_argument("Dataset: dimension must be >= 1");
  if (values_.empty() || values_.size() % dim_ != 0) throw std::invalid_argument("Dataset: need n >= 1 complete samples");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite sample value");
  }
  n_ = values_.size() / dim_;
}

Dataset Dataset::real(std::size_t dim, std::vector<double> flat) {
  return Dataset(SampleKind::real_vector, dim, std::move(flat));
}

Dataset Dataset::real(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("Dataset: need n >= 1 samples");
  const std::size_t d = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw std::invalid_argument("Dataset: samples of mixed dimension");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Dataset(SampleKind::real_vector, d, std::move(flat));
}

Dataset Dataset::symbols(const std::vector<std::size_t>& indices) {
  std::vector<double> flat(indices.begin(), indices.end());
  return Dataset(SampleKind::symbol, 1, std::move(flat));
}

std::vector<double> Dataset::sum() const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) out[k] += values_[i * dim_ + k];
  }
  return out;
}

// ---------------------------------------------------------------- LossFunction

LossFunction LossFunction::squared_error() { return LossFunction(LossKind::squared_error); }

LossFunction LossFunction::zero_one() { return LossFunction(LossKind::zero_one); }

LossFunction LossFunction::table(std::vector<std::vector<double>> rows) {
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("loss table: empty");
  LossFunction f(LossKind::table);
  f.rows_ = rows.size();
  f.cols_ = rows.front().size();
  f.table_.reserve(f.rows_ * f.cols_);
  for (const auto& r : rows) {
    if (r.size() != f.cols_) throw std::invalid_argument("loss table: ragged rows");
    for (double v : r) {
      if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("loss table: entries must be finite and >= 0");
      f.table_.push_back(v);
    }
  }
  return f;
}

double LossFunction::operator()(std::span<const double> w, std::span<const double> z) const {
  switch (kind_) {
    case LossKind::squared_error: {
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        const double e = z[k] - w[k];
        acc += e * e;
      }
      return acc;
    }
    case LossKind::zero_one:
      return std::equal(w.begin(), w.end(), z.begin()) ? 0.0 : 1.0;
    case LossKind::table:
      return entry(checked_index(w[0], rows_, "loss table (w)"), checked_index(z[0], cols_, "loss table (z)"));
  }
  return 0.0;
}

std::optional<std::pair<double, double>> LossFunction::range() const {
  switch (kind_) {
    case LossKind::squared_error:
      return std::nullopt;
    case LossKind::zero_one:
      return std::pair{0.0, 1.0};
    case LossKind::table: {
      const auto [lo, hi] = std::minmax_element(table_.begin(), table_.end());
      return std::pair{*lo, *hi};
    }
  }
  return std::nullopt;
}

std::vector<double> LossFunction::empirical_risk_gradient(std::span<const double> w, const Dataset& s) const {
  if (kind_ != LossKind::squared_error) throw std::domain_error("loss gradient: only the squared error is differentiable");
  if (w.size() != s.dim()) throw std::invalid_argument("loss gradient: dimension mismatch");
  // d/dw (1/n) sum ||z_i - w||^2 = 2 (w - mean(z))
  std::vector<double> g = s.sum();
  const double inv_n = 1.0 / static_cast<double>(s.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = 2.0 * (w[k] - g[k] * inv_n);
  return g;
}

double empirical_risk(const LossFunction& loss, const Hypothesis& w, const Dataset& s) {
  for (double v : w.w) {
    if (std::isnan(v)) throw std::invalid_argument("empirical_risk: NaN in hypothesis");
  }
  if (w.dim() != s.dim()) throw std::invalid_argument("empirical_risk: dimension mismatch");
  // Running mean: exact when every term is equal.
  double mean = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) mean += (loss(w.w, s[i]) - mean) / static_cast<double>(i + 1);
  return mean;
}

// ---------------------------------------------------------------- Prior

Prior Prior::gaussian(std::vector<double> mean, double variance) {
  if (mean.empty()) throw std::invalid_argument("Prior: dimension must be >= 1");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw std::invalid_argument("Prior: variance must be positive");
  for (double m : mean) {
    if (!std::isfinite(m)) throw std::invalid_argument("Prior: non-finite mean");
  }
  Prior p;
  p.mean_ = std::move(mean);
  p.variance_ = variance;
  return p;
}

Prior Prior::finite(std::vector<double> pmf) {
  check_pmf(pmf, "Prior");
  Prior p;
  p.finite_ = true;
  p.pmf_ = std::move(pmf);
  return p;
}

double Prior::log_density(const Hypothesis& w) const {
  if (w.dim() != dim()) throw std::invalid_argument("Prior: dimension mismatch");
  if (finite_) return std::log(pmf_[checked_index(w.w[0], pmf_.size(), "Prior")]);
  double sq = 0.0;
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    const double e = w.w[k] - mean_[k];
    sq += e * e;
  }
  const double d = static_cast<double>(mean_.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi * variance_) - sq / (2.0 * variance_);
}

std::vector<double> Prior::grad_log_density(const Hypothesis& w) const {
  if (finite_) throw std::domain_error("Prior: finite prior has no gradient");
  if (w.dim() != dim()) throw std::invalid_argument("Prior: dimension mismatch");
  std::vector<double> g(mean_.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = -(w.w[k] - mean_[k]) / variance_;
  return g;
}

Hypothesis Prior::sample(RandomStream& stream) const {
  if (finite_) return Hypothesis::symbol(stream.categorical(pmf_));
  const double sd = std::sqrt(variance_);
  std::vector<double> w(mean_.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = mean_[k] + sd * stream.normal();
  return Hypothesis(std::move(w));
}

// ---------------------------------------------------------------- GibbsSpec

GibbsSpec::GibbsSpec(double alpha, Prior prior, Energy energy)
    : alpha_(alpha), prior_(std::move(prior)), energy_(std::move(energy)) {
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) throw std::invalid_argument("GibbsSpec: alpha must be finite and >= 0");
  if (!energy_) throw std::invalid_argument("GibbsSpec: missing energy");
}

GibbsSpec GibbsSpec::empirical_risk(double alpha, Prior prior, LossFunction loss) {
  GibbsSpec spec(alpha, std::move(prior),
                 [loss](const Hypothesis& w, const Dataset& s) { return gibbs::empirical_risk(loss, w, s); });
  spec.loss_ = std::move(loss);
  return spec;
}

double GibbsSpec::log_weight(const Hypothesis& w, const Dataset& s) const {
  const double lp = prior_.log_density(w);
  if (alpha_ == 0.0) return lp;
  return lp - alpha_ * energy_(w, s);
}

LogPartition log_partition(const GibbsSpec& spec, const Dataset& s, const PartitionOptions& opts) {
  const Prior& prior = spec.prior();
  if (spec.alpha() == 0.0) return {0.0, 0.0, PartitionMethod::prior_only};

  LogPartition out;
  if (prior.is_finite()) {
    std::vector<double> terms;
    terms.reserve(prior.support_size());
    for (std::size_t w = 0; w < prior.support_size(); ++w) {
      if (prior.pmf()[w] > 0.0) terms.push_back(spec.log_weight(Hypothesis::symbol(w), s));
    }
    out = {log_sum_exp(terms), 0.0, PartitionMethod::exact_sum};
  } else if (prior.dim() == 1) {
    const double center = prior.mean()[0];
    const double half = opts.prior_sds * std::sqrt(prior.variance());
    const double lo = center - half;
    const double hi = center + half;
    auto log_w = [&](double x) { return spec.log_weight(Hypothesis::scalar(x), s); };
    double shift = -std::numeric_limits<double>::infinity();
    constexpr int kGrid = 400;
    for (int i = 0; i <= kGrid; ++i) shift = std::max(shift, log_w(lo + (hi - lo) * i / kGrid));
    if (!std::isfinite(shift)) throw std::domain_error("log_partition: non-finite integrand");
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [&](double x) { return std::exp(log_w(x) - shift); }, lo, hi, 25, opts.quad_tol, &err);
    out = {shift + std::log(integral), integral > 0.0 ? err / integral : 0.0, PartitionMethod::quadrature};
  } else {
    if (opts.mc_samples < 2) throw std::invalid_argument("log_partition: need at least two importance samples");
    RandomStream stream(opts.seed);
    std::vector<double> log_terms(opts.mc_samples);
    for (auto& t : log_terms) t = -spec.alpha() * spec.energy(prior.sample(stream), s);
    const double m = *std::max_element(log_terms.begin(), log_terms.end());
    if (!std::isfinite(m)) throw std::domain_error("log_partition: non-finite integrand");
    std::vector<double> scaled(log_terms.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = std::exp(log_terms[i] - m);
    const EstimateWithError est = summarize(scaled);
    out = {m + std::log(est.value), est.std_error / est.value, PartitionMethod::importance_sampling};
  }
  if (!std::isfinite(out.log_value)) throw std::domain_error("log_partition: partition function is not finite");
  return out;
}

double gibbs_log_density(const GibbsSpec& spec, const Hypothesis& w, const Dataset& s, const LogPartition& log_v) {
  return spec.log_weight(w, s) - log_v.log_value;
}

double gibbs_log_density(const GibbsSpec& spec, const Hypothesis& w, const Dataset& s) {
  return gibbs_log_density(spec, w, s, log_partition(spec, s));
}

std::vector<std::size_t> decode_sequence(std::size_t code, std::size_t alphabet, std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = n; i-- > 0;) {
    out[i] = code % alphabet;
    code /= alphabet;
  }
  return out;
}

// ---------------------------------------------------------------- DataModel

DataModel DataModel::iid_gaussian(std::vector<double> mean, double variance, std::size_t n) {
  if (n == 0) throw std::invalid_argument("DataModel: n must be >= 1");
  if (mean.empty()) throw std::invalid_argument("DataModel: dimension must be >= 1");
  if (!(variance >= 0.0) || !std::isfinite(variance)) throw std::invalid_argument("DataModel: variance must be >= 0");
  DataModel m;
  m.n_ = n;
  m.dim_ = mean.size();
  m.kind_ = SampleKind::real_vector;
  m.law_ = IidGaussian{std::move(mean), variance};
  return m;
}

DataModel DataModel::iid_finite(std::vector<double> pmf, std::size_t n) {
  if (n == 0) throw std::invalid_argument("DataModel: n must be >= 1");
  check_pmf(pmf, "DataModel");
  DataModel m;
  m.n_ = n;
  m.dim_ = 1;
  m.alphabet_ = pmf.size();
  m.kind_ = SampleKind::symbol;
  m.law_ = IidFinite{std::move(pmf)};
  return m;
}

DataModel DataModel::finite_joint(std::size_t alphabet, std::size_t n, std::vector<double> pmf) {
  if (n == 0 || alphabet == 0) throw std::invalid_argument("DataModel: empty alphabet or n == 0");
  if (pmf.size() != checked_power(alphabet, n)) throw std::invalid_argument("DataModel: joint pmf has wrong length");
  check_pmf(pmf, "DataModel");
  DataModel m;
  m.n_ = n;
  m.dim_ = 1;
  m.alphabet_ = alphabet;
  m.kind_ = SampleKind::symbol;
  m.law_ = FiniteJoint{std::move(pmf)};
  return m;
}

DataModel DataModel::mixture(std::vector<double> weights, std::vector<DataModel> components) {
  if (components.empty() || weights.size() != components.size()) throw std::invalid_argument("DataModel: mixture weights/components mismatch");
  check_pmf(weights, "DataModel mixture");
  const DataModel& first = components.front();
  for (const auto& c : components) {
    if (c.n_ != first.n_ || c.dim_ != first.dim_ || c.kind_ != first.kind_ || c.alphabet_ != first.alphabet_) {
      throw std::invalid_argument("DataModel: mixture components must share n, dimension and alphabet");
    }
  }
  DataModel m;
  m.n_ = first.n_;
  m.dim_ = first.dim_;
  m.alphabet_ = first.alphabet_;
  m.kind_ = first.kind_;
  m.law_ = Mixture{std::move(weights), std::move(components)};
  return m;
}

bool DataModel::is_iid() const noexcept {
  return std::holds_alternative<IidGaussian>(law_) || std::holds_alternative<IidFinite>(law_);
}

Dataset DataModel::sample_single(RandomStream& stream) const {
  if (const auto* g = std::get_if<IidGaussian>(&law_)) {
    const double sd = std::sqrt(g->variance);
    std::vector<double> z(dim_);
    for (std::size_t k = 0; k < dim_; ++k) z[k] = g->mean[k] + sd * stream.normal();
    return Dataset::real(dim_, std::move(z));
  }
  if (const auto* f = std::get_if<IidFinite>(&law_)) return Dataset::symbols({stream.categorical(f->pmf)});
  throw std::domain_error("DataModel: single-sample draws need an i.i.d. model");
}

Dataset DataModel::sample(RandomStream& stream) const {
  if (const auto* g = std::get_if<IidGaussian>(&law_)) {
    const double sd = std::sqrt(g->variance);
    std::vector<double> flat(n_ * dim_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < dim_; ++k) flat[i * dim_ + k] = g->mean[k] + sd * stream.normal();
    }
    return Dataset::real(dim_, std::move(flat));
  }
  if (const auto* f = std::get_if<IidFinite>(&law_)) {
    std::vector<std::size_t> syms(n_);
    for (auto& z : syms) z = stream.categorical(f->pmf);
    return Dataset::symbols(syms);
  }
  if (const auto* j = std::get_if<FiniteJoint>(&law_)) {
    return Dataset::symbols(decode_sequence(stream.categorical(j->pmf), alphabet_, n_));
  }
  const auto& mix = std::get<Mixture>(law_);
  return mix.components[stream.categorical(mix.weights)].sample(stream);
}

std::vector<double> DataModel::joint_pmf() const {
  if (!is_finite()) throw std::domain_error("DataModel: joint pmf needs a finite alphabet");
  if (const auto* j = std::get_if<FiniteJoint>(&law_)) return j->pmf;
  const std::size_t total = checked_power(alphabet_, n_);
  if (const auto* f = std::get_if<IidFinite>(&law_)) {
    std::vector<double> out(total);
    for (std::size_t code = 0; code < total; ++code) {
      double p = 1.0;
      std::size_t c = code;
      for (std::size_t i = 0; i < n_; ++i) {
        p *= f->pmf[c % alphabet_];
        c /= alphabet_;
      }
      out[code] = p;
    }
    return out;
  }
  const auto& mix = std::get<Mixture>(law_);
  std::vector<double> out(total, 0.0);
  for (std::size_t k = 0; k < mix.components.size(); ++k) {
    const auto part = mix.components[k].joint_pmf();
    for (std::size_t code = 0; code < total; ++code) out[code] += mix.weights[k] * part[code];
  }
  return out;
}

double DataModel::population_risk_exact(const LossFunction& loss, const Hypothesis& w) const {
  if (w.dim() != dim_) throw std::invalid_argument("population_risk: dimension mismatch");
  if (const auto* g = std::get_if<IidGaussian>(&law_)) {
    if (loss.kind() != LossKind::squared_error) throw std::domain_error("population_risk: exact Gaussian risk needs the squared error");
    // E||Z - w||^2 = d sigma_Z^2 + ||mu - w||^2
    double acc = static_cast<double>(dim_) * g->variance;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double e = g->mean[k] - w.w[k];
      acc += e * e;
    }
    return acc;
  }
  if (const auto* f = std::get_if<IidFinite>(&law_)) {
    double acc = 0.0;
    for (std::size_t z = 0; z < f->pmf.size(); ++z) {
      const double zs = static_cast<double>(z);
      acc += f->pmf[z] * loss(w.w, std::span<const double>(&zs, 1));
    }
    return acc;
  }
  if (const auto* m = std::get_if<Mixture>(&law_)) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m->components.size(); ++k) acc += m->weights[k] * m->components[k].population_risk_exact(loss, w);
    return acc;
  }
  const auto& j = std::get<FiniteJoint>(law_);
  // sum_s p(s) (1/n) sum_i l(w, s_i) via per-position marginals
  std::vector<double> marginal(alphabet_, 0.0);
  for (std::size_t code = 0; code < j.pmf.size(); ++code) {
    if (j.pmf[code] == 0.0) continue;
    std::size_t c = code;
    for (std::size_t i = 0; i < n_; ++i) {
      marginal[c % alphabet_] += j.pmf[code];
      c /= alphabet_;
    }
  }
  double acc = 0.0;
  for (std::size_t z = 0; z < alphabet_; ++z) {
    const double zs = static_cast<double>(z);
    acc += marginal[z] * loss(w.w, std::span<const double>(&zs, 1));
  }
  return acc / static_cast<double>(n_);
}

EstimateWithError population_risk(const LossFunction& loss, const Hypothesis& w, const DataModel& model,
                                  RiskBudget budget, RandomStream& stream) {
  if (budget.exact) return EstimateWithError::exact(model.population_risk_exact(loss, w));
  if (budget.mc_samples == 0) throw std::invalid_argument("population_risk: zero Monte-Carlo budget");
  if (budget.mc_samples < 2) throw std::invalid_argument("population_risk: need at least two Monte-Carlo samples");
  std::vector<double> values(budget.mc_samples);
  if (model.is_iid()) {
    for (auto& v : values) {
      const Dataset z = model.sample_single(stream);
      v = loss(w.w, z[0]);
    }
  } else {
    for (auto& v : values) v = empirical_risk(loss, w, model.sample(stream));
  }
  return summarize(values);
}

}  // namespace gibbs
