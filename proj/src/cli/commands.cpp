#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>

#include "cli/csv.hpp"
#include "cli/svg.hpp"
#include "gibbs/bounds.hpp"
#include "gibbs/discrete.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/estimators.hpp"
#include "gibbs/gaussian_mean.hpp"
#include "gibbs/samplers.hpp"

namespace gibbs::cli {

namespace fs = std::filesystem;
using gaussian::GaussianMeanProblem;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// ------------------------------------------------------------ config keys

const std::set<std::string> kCommonKeys{"command", "seed", "out", "workers"};
const std::set<std::string> kGaussianKeys{"problem.kind",      "problem.d",         "problem.n",
                                          "problem.mu",        "problem.mu0",       "problem.sigma0_sq",
                                          "problem.sigmaZ_sq", "problem.sigma_sq"};
const std::set<std::string> kDiscreteKeys{"problem.kind",  "problem.n",     "problem.pz",
                                          "problem.prior", "problem.loss",  "problem.alpha"};
const std::set<std::string> kRandomKeys{"random.instances", "random.max_z",   "random.max_w", "random.max_n",
                                        "random.alphas",    "random.loss_lo", "random.loss_hi"};
const std::set<std::string> kMcKeys{"mc.outer", "mc.fresh_per_risk"};
const std::set<std::string> kSweepKeys{"sweep.axis", "sweep.values"};
const std::set<std::string> kMixtureKeys{"mixture.pairs", "mixture.lambdas", "mixture.identical"};
const std::set<std::string> kChainKeys{"chain.steps",  "chain.burn_in",     "chain.step_size",    "chain.noise_scale",
                                       "chain.chains", "chain.checkpoints", "chain.learner_steps"};

std::set<std::string> merge(std::initializer_list<const std::set<std::string>*> parts) {
  std::set<std::string> out;
  for (const auto* p : parts) out.insert(p->begin(), p->end());
  return out;
}

// ------------------------------------------------------------ problems

std::vector<double> vector_or_scalar(const Config& cfg, const std::string& key, std::size_t d, double fallback) {
  if (!cfg.has(key)) return std::vector<double>(d, fallback);
  if (cfg.doc().at(key).is_number()) return std::vector<double>(d, cfg.number(key, fallback));
  std::vector<double> v = cfg.numbers(key, {});
  if (v.size() != d) throw ConfigError("config key '" + key + "': expected " + std::to_string(d) + " entries");
  return v;
}

std::string problem_kind(const Config& cfg) {
  const std::string kind = cfg.string("problem.kind", "gaussian");
  if (kind != "gaussian" && kind != "discrete") {
    throw ConfigError("config key 'problem.kind': expected \"gaussian\" or \"discrete\"");
  }
  return kind;
}

GaussianMeanProblem gaussian_problem(const Config& cfg, std::size_t d_default, std::size_t n_default) {
  GaussianMeanProblem p;
  p.d = cfg.count("problem.d", d_default);
  p.n = cfg.count("problem.n", n_default);
  if (p.d < 1) throw ConfigError("config key 'problem.d': must be >= 1");
  if (p.n < 1) throw ConfigError("config key 'problem.n': must be >= 1");
  p.mu = vector_or_scalar(cfg, "problem.mu", p.d, 0.0);
  p.mu0 = vector_or_scalar(cfg, "problem.mu0", p.d, 0.0);
  p.sigma0_sq = cfg.number("problem.sigma0_sq", 1.0);
  p.sigmaZ_sq = cfg.number("problem.sigmaZ_sq", 1.0);
  p.sigma_sq = cfg.number("problem.sigma_sq", 1.0);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

struct DiscreteSetup {
  std::vector<double> pz;
  std::vector<double> prior;
  std::vector<std::vector<double>> loss;
  std::size_t n = 1;
  double alpha = 1.0;

  discrete::DiscreteProblem build() const {
    try {
      return discrete::DiscreteProblem::iid(pz, prior, loss, n, alpha);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

DiscreteSetup discrete_setup(const Config& cfg) {
  DiscreteSetup s;
  s.pz = cfg.numbers("problem.pz", {0.5, 0.5});
  s.prior = cfg.numbers("problem.prior", std::vector<double>(s.pz.size(), 1.0 / static_cast<double>(s.pz.size())));
  s.loss = cfg.matrix("problem.loss", {{0.0, 1.0}, {1.0, 0.0}});
  s.n = cfg.count("problem.n", 1);
  s.alpha = cfg.number("problem.alpha", 1.0);
  (void)s.build();
  return s;
}

discrete::RandomProblemLimits random_limits(const Config& cfg) {
  discrete::RandomProblemLimits l;
  l.max_z = cfg.count("random.max_z", l.max_z);
  l.max_w = cfg.count("random.max_w", l.max_w);
  l.max_n = cfg.count("random.max_n", l.max_n);
  l.alphas = cfg.numbers("random.alphas", l.alphas);
  l.loss_lo = cfg.number("random.loss_lo", l.loss_lo);
  l.loss_hi = cfg.number("random.loss_hi", l.loss_hi);
  if (l.max_z < 2 || l.max_z > discrete::kMaxAlphabet) throw ConfigError("config key 'random.max_z': must be in [2, 16]");
  if (l.max_w < 2 || l.max_w > discrete::kMaxAlphabet) throw ConfigError("config key 'random.max_w': must be in [2, 16]");
  if (l.max_n < 1 || l.max_n > discrete::kMaxSamples) throw ConfigError("config key 'random.max_n': must be in [1, 4]");
  if (l.alphas.empty()) throw ConfigError("config key 'random.alphas': must not be empty");
  for (double a : l.alphas) {
    if (a < 0.0) throw ConfigError("config key 'random.alphas': entries must be >= 0");
  }
  if (!(l.loss_lo >= 0.0) || !(l.loss_hi >= l.loss_lo)) {
    throw ConfigError("config keys 'random.loss_lo/hi': need 0 <= loss_lo <= loss_hi");
  }
  return l;
}

// ------------------------------------------------------------ result rows

const std::vector<std::string> kResultHeader{
    "axis",     "value",    "exact_gen",  "mc_gen",   "mc_se",       "iskl",         "mutual",      "lautum",
    "thm2",     "thm2_exact_ce", "dp",    "raginsky", "kuzborskij",  "xu_mi",        "ismi_printed", "ismi_derived",
    "ismi_numeric"};
constexpr std::size_t kFirstNumericColumn = 2;

using Row = std::vector<std::optional<double>>;  // columns from exact_gen on

Row gaussian_row(const GaussianMeanProblem& p, std::size_t outer, std::size_t fresh, std::uint64_t seed) {
  Row r(kResultHeader.size() - kFirstNumericColumn);
  const InfoTriple info = gaussian::mi_lautum_closed(p);
  const double alpha = p.alpha();
  const double sigma = bounds::CgfEnvelope::from(gaussian::chi_square_params(p)).as_sigma();
  const bounds::PriorBounds prior = bounds::prior_bounds(sigma, alpha, p.n, info.mutual);
  r[0] = gaussian::gen_error_closed(p);
  if (outer > 0) {
    const EstimateWithError mc = mc_gen_error(p.data_model(), exact_posterior_learner(p),
                                              LossFunction::squared_error(), outer, fresh, seed);
    r[1] = mc.value;
    r[2] = mc.std_error;
  }
  r[3] = gaussian::iskl_closed(p);
  r[4] = info.mutual;
  r[5] = info.lautum;
  r[6] = bounds::thm2_bound({sigma, alpha, p.n, 0.0});
  r[7] = bounds::thm2_bound({sigma, alpha, p.n, bounds::exact_c_e(info)});
  // dp and raginsky need losses in [0, 1]; the squared loss is unbounded.
  r[10] = prior.kuzborskij;
  r[11] = prior.xu_mi;
  if (p.n >= 2) {
    const bounds::IsmiBounds ismi = bounds::ismi_all(p);
    r[12] = ismi.printed;
    r[13] = ismi.derived;
    r[14] = ismi.numeric;
  }
  return r;
}

Row discrete_row(const discrete::DiscreteProblem& p, std::size_t outer, std::uint64_t seed) {
  Row r(kResultHeader.size() - kFirstNumericColumn);
  const discrete::JointTable t = discrete::enumerate_joint(p);
  const InfoTriple info = discrete::exact_info_discrete(t);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : p.loss) {
    lo = std::min(lo, *std::min_element(row.begin(), row.end()));
    hi = std::max(hi, *std::max_element(row.begin(), row.end()));
  }
  const double sigma = bounds::bounded_sigma(lo, hi);
  const bounds::PriorBounds prior = bounds::prior_bounds(sigma, p.alpha, p.n, info.mutual);
  r[0] = discrete::exact_gen_discrete(p, t);
  if (outer > 0) {
    const EstimateWithError mc =
        mc_gen_error(p.data, finite_gibbs_learner(p.gibbs_spec()), p.loss_function(), outer, 0, seed);
    r[1] = mc.value;
    r[2] = mc.std_error;
  }
  r[3] = info.skl;
  r[4] = info.mutual;
  r[5] = info.lautum;
  r[6] = bounds::thm2_bound({sigma, p.alpha, p.n, 0.0});
  r[7] = bounds::thm2_bound({sigma, p.alpha, p.n, bounds::exact_c_e(info)});
  if (lo >= 0.0 && hi <= 1.0) {
    r[8] = prior.dp;
    r[9] = prior.raginsky;
  }
  r[10] = prior.kuzborskij;
  r[11] = prior.xu_mi;
  return r;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<std::optional<double>>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] && *y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(*y[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

// ------------------------------------------------------------ context

struct Context {
  std::string command;
  const Config& cfg;
  std::uint64_t seed;
  fs::path out;
  std::ostream& log;

  std::string path(const std::string& file) const { return (out / file).string(); }
};

class Timing {
 public:
  explicit Timing(const std::string& path) : csv_(path, {"row", "wall_ms"}) {}
  void record(std::size_t row, double ms) { csv_.row({row, ms}); }

 private:
  CsvWriter csv_;
};

std::vector<Field> to_fields(std::vector<Field> head, const Row& r) {
  for (const auto& v : r) head.emplace_back(v);
  return head;
}

// ------------------------------------------------------------ commands

int verify_thm1_discrete(const Context& ctx) {
  const std::size_t instances = ctx.cfg.count("random.instances", 100);
  if (instances < 1) throw ConfigError("config key 'random.instances': must be >= 1");
  const discrete::RandomProblemLimits limits = random_limits(ctx.cfg);

  struct Result {
    std::size_t z, w, n;
    double alpha, gen, residual, ms;
    InfoTriple info;
  };
  std::vector<Result> results(instances);
  for_each_index(instances, Execution::parallel, [&](std::size_t i) {
    const auto start = Clock::now();
    RandomStream stream = RandomStream::substream(ctx.seed, i);
    const discrete::DiscreteProblem p = discrete::random_problem(stream, limits);
    const discrete::JointTable t = discrete::enumerate_joint(p, Execution::serial);
    Result& r = results[i];
    r.z = p.z_alphabet;
    r.w = p.w_alphabet;
    r.n = p.n;
    r.alpha = p.alpha;
    r.gen = discrete::exact_gen_discrete(p, t);
    r.info = discrete::exact_info_discrete(t);
    r.residual = std::abs(p.alpha * r.gen - r.info.skl);
    r.ms = elapsed_ms(start);
  });

  CsvWriter csv(ctx.path("verify-thm1-discrete.csv"),
                {"instance", "z_alphabet", "w_alphabet", "n", "alpha", "gen", "mutual", "lautum", "skl", "residual"});
  Timing timing(ctx.path("timing.csv"));
  std::size_t worst = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const Result& r = results[i];
    csv.row({i, r.z, r.w, r.n, r.alpha, r.gen, r.info.mutual, r.info.lautum, r.info.skl, r.residual});
    timing.record(i, r.ms);
    if (r.residual > results[worst].residual) worst = i;
  }
  const double max_residual = results[worst].residual;
  ctx.log << "verify-thm1-discrete: " << instances << " instances, max |alpha*gen - I_SKL| = "
          << format_number(max_residual) << "\n";
  if (max_residual > 1e-10) {
    ctx.log << "FAIL: worst instance " << worst << " (substream " << worst << " of seed " << ctx.seed
            << "), residual " << format_number(max_residual) << " > 1e-10\n";
    return kExitAssertion;
  }
  return kExitPass;
}

int verify_thm1_gaussian(const Context& ctx) {
  const GaussianMeanProblem p = gaussian_problem(ctx.cfg, 2, 10);
  const std::size_t outer = ctx.cfg.count("mc.outer", 200000);
  const std::size_t fresh = ctx.cfg.count("mc.fresh_per_risk", 0);
  if (outer < 100) throw ConfigError("config key 'mc.outer': must be >= 100");
  if (fresh == 1) throw ConfigError("config key 'mc.fresh_per_risk': must be 0 (exact) or >= 2");

  const auto start = Clock::now();
  const double exact = gaussian::gen_error_closed(p);
  const double iskl_over_alpha = gaussian::iskl_closed(p) / p.alpha();
  const EstimateWithError mc =
      mc_gen_error(p.data_model(), exact_posterior_learner(p), LossFunction::squared_error(), outer, fresh, ctx.seed);
  const double diff = std::abs(mc.value - exact);
  const std::optional<double> z = mc.std_error > 0.0 ? std::optional<double>(diff / mc.std_error) : std::nullopt;
  const bool pass = diff <= 3.0 * mc.std_error;

  CsvWriter csv(ctx.path("verify-thm1-gaussian.csv"),
                {"d", "n", "alpha", "exact_gen", "mc_gen", "mc_se", "iskl_over_alpha", "z_score", "within_3se"});
  csv.row({p.d, p.n, p.alpha(), exact, mc.value, mc.std_error, iskl_over_alpha, z, pass ? "true" : "false"});
  Timing timing(ctx.path("timing.csv"));
  timing.record(0, elapsed_ms(start));

  ctx.log << "verify-thm1-gaussian: exact " << format_number(exact) << ", mc " << format_number(mc.value) << " +- "
          << format_number(mc.std_error) << "\n";
  if (!pass) {
    ctx.log << "FAIL: |mc_gen - exact_gen| = " << format_number(diff) << " exceeds 3 SE\n";
    return kExitAssertion;
  }
  return kExitPass;
}

int sweep(const Context& ctx) {
  const std::string kind = problem_kind(ctx.cfg);
  if (kind == "gaussian") {
    ctx.cfg.reject_unknown(merge({&kCommonKeys, &kGaussianKeys, &kSweepKeys, &kMcKeys}));
  } else {
    ctx.cfg.reject_unknown(merge({&kCommonKeys, &kDiscreteKeys, &kSweepKeys, &kMcKeys}));
  }
  const std::string axis = ctx.cfg.string("sweep.axis", "n");
  if (axis != "n" && axis != "alpha") throw ConfigError("config key 'sweep.axis': expected \"n\" or \"alpha\"");
  std::vector<double> default_values;
  if (axis == "n" && kind == "gaussian") {
    for (int n = 4; n <= 128; n += 4) default_values.push_back(n);
  } else if (axis == "n") {
    default_values = {1, 2, 3, 4};
  } else {
    default_values = {0.25, 0.5, 1, 2, 4, 8};
  }
  const std::vector<double> values = ctx.cfg.numbers("sweep.values", default_values);
  if (values.size() < 2) throw ConfigError("config key 'sweep.values': a sweep needs at least 2 points");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && !(values[i] > values[i - 1])) throw ConfigError("config key 'sweep.values': must be strictly increasing");
    if (axis == "n" && (values[i] < 1.0 || values[i] != std::floor(values[i]))) {
      throw ConfigError("config key 'sweep.values': n values must be positive integers");
    }
    if (axis == "alpha" && !(values[i] > 0.0)) throw ConfigError("config key 'sweep.values': alpha values must be > 0");
  }
  const std::size_t outer = ctx.cfg.count("mc.outer", 0);
  const std::size_t fresh = ctx.cfg.count("mc.fresh_per_risk", 0);
  if (outer > 0 && outer < 100) throw ConfigError("config key 'mc.outer': must be 0 (skip) or >= 100");
  if (fresh == 1) throw ConfigError("config key 'mc.fresh_per_risk': must be 0 (exact) or >= 2");

  std::vector<Row> rows;
  std::vector<double> ms;
  if (kind == "gaussian") {
    const GaussianMeanProblem base = gaussian_problem(ctx.cfg, 2, 10);
    for (std::size_t j = 0; j < values.size(); ++j) {
      const auto start = Clock::now();
      GaussianMeanProblem p = base;
      if (axis == "n") {
        p.n = static_cast<std::size_t>(values[j]);
      } else {
        // alpha = n / (2 sigma^2) fixes sigma^2
        p.sigma_sq = static_cast<double>(p.n) / (2.0 * values[j]);
      }
      rows.push_back(gaussian_row(p, outer, fresh, substream_seed(ctx.seed, j)));
      ms.push_back(elapsed_ms(start));
    }
  } else {
    const DiscreteSetup base = discrete_setup(ctx.cfg);
    for (std::size_t j = 0; j < values.size(); ++j) {
      const auto start = Clock::now();
      DiscreteSetup s = base;
      if (axis == "n") {
        s.n = static_cast<std::size_t>(values[j]);
      } else {
        s.alpha = values[j];
      }
      rows.push_back(discrete_row(s.build(), outer, substream_seed(ctx.seed, j)));
      ms.push_back(elapsed_ms(start));
    }
  }

  CsvWriter csv(ctx.path("sweep.csv"), kResultHeader);
  Timing timing(ctx.path("timing.csv"));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    csv.row(to_fields({axis, values[j]}, rows[j]));
    timing.record(j, ms[j]);
  }
  Row slopes(rows.front().size());
  for (std::size_t c = 0; c < slopes.size(); ++c) {
    std::vector<std::optional<double>> column;
    for (const auto& r : rows) column.push_back(r[c]);
    slopes[c] = loglog_slope(values, column);
  }
  csv.row(to_fields({"slope", std::optional<double>()}, slopes));

  std::vector<Series> series;
  for (std::size_t c = 0; c < rows.front().size(); ++c) {
    const std::string& name = kResultHeader[c + kFirstNumericColumn];
    if (name == "mc_se" || name == "iskl" || name == "mutual" || name == "lautum") continue;
    Series s{name, {}};
    for (const auto& r : rows) s.y.push_back(r[c]);
    if (std::any_of(s.y.begin(), s.y.end(), [](const auto& v) { return v.has_value(); })) series.push_back(std::move(s));
  }
  const std::string title = (kind == "gaussian" ? "Gaussian mean" : "discrete") + std::string(": generalization error and bounds");
  try {
    if (!write_loglog_chart(ctx.path("sweep.svg"), title, axis, values, series)) {
      ctx.log << "warning: sweep.svg not written\n";
    }
  } catch (const std::exception& e) {
    ctx.log << "warning: sweep.svg not written: " << e.what() << "\n";
  }

  ctx.log << "sweep over " << axis << ": " << rows.size() << " points; exact_gen slope "
          << (slopes[0] ? format_number(*slopes[0]) : std::string("n/a"));
  if (slopes[13]) ctx.log << ", ismi_derived slope " << format_number(*slopes[13]);
  ctx.log << "\n";
  return kExitPass;
}

int mixture_concavity(const Context& ctx) {
  const std::size_t pairs = ctx.cfg.count("mixture.pairs", 50);
  if (pairs < 1) throw ConfigError("config key 'mixture.pairs': must be >= 1");
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
  const std::vector<double> lambdas = ctx.cfg.numbers("mixture.lambdas", grid);
  if (lambdas.empty()) throw ConfigError("config key 'mixture.lambdas': must not be empty");
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("config key 'mixture.lambdas': entries must be in [0, 1]");
  }
  const bool identical = ctx.cfg.flag("mixture.identical", false);
  const discrete::RandomProblemLimits limits = random_limits(ctx.cfg);

  std::vector<std::vector<discrete::MixtureCheck>> checks(pairs);
  std::vector<double> ms(pairs);
  for_each_index(pairs, Execution::parallel, [&](std::size_t i) {
    const auto start = Clock::now();
    RandomStream stream = RandomStream::substream(ctx.seed, i);
    const discrete::DiscreteProblem a = discrete::random_problem(stream, limits);
    const discrete::DiscreteProblem b =
        identical ? a
                  : discrete::DiscreteProblem::iid(discrete::random_pmf(stream, a.z_alphabet), a.prior, a.loss, a.n,
                                                   a.alpha);
    for (double l : lambdas) checks[i].push_back(discrete::mixture_concavity_check(a, b, l));
    ms[i] = elapsed_ms(start);
  });

  CsvWriter csv(ctx.path("mixture-concavity.csv"), {"pair", "lambda", "gen_mixture", "avg_gen", "slack", "holds"});
  Timing timing(ctx.path("timing.csv"));
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_pair = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      const auto& m = checks[i][k];
      csv.row({i, lambdas[k], m.gen_mixture, m.avg_gen, m.slack, m.holds ? "true" : "false"});
      if (m.slack < worst) {
        worst = m.slack;
        worst_pair = i;
      }
    }
    timing.record(i, ms[i]);
  }
  ctx.log << "mixture-concavity: " << pairs << " pairs x " << lambdas.size() << " weights, min slack "
          << format_number(worst) << "\n";
  if (worst < -1e-12) {
    ctx.log << "FAIL: pair " << worst_pair << " (substream " << worst_pair << " of seed " << ctx.seed
            << ") has slack " << format_number(worst) << " < -1e-12\n";
    return kExitAssertion;
  }
  return kExitPass;
}

int sgld_converge(const Context& ctx) {
  const GaussianMeanProblem p = gaussian_problem(ctx.cfg, 1, 10);
  ChainConfig cfg;
  cfg.steps = ctx.cfg.count("chain.steps", 200000);
  cfg.step_size = ctx.cfg.number("chain.step_size", 1e-3);
  cfg.noise_scale = ctx.cfg.number("chain.noise_scale", 1.0);
  if (ctx.cfg.has("chain.burn_in")) cfg.burn_in = ctx.cfg.count("chain.burn_in", 0);
  const std::size_t chains = ctx.cfg.count("chain.chains", 8);
  const std::size_t checkpoints = ctx.cfg.count("chain.checkpoints", 10);
  const std::size_t learner_steps = ctx.cfg.count("chain.learner_steps", 5000);
  const std::size_t outer = ctx.cfg.count("mc.outer", 4000);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (chains < 1) throw ConfigError("config key 'chain.chains': must be >= 1");
  if (checkpoints < 1 || checkpoints > cfg.steps) throw ConfigError("config key 'chain.checkpoints': must be in [1, steps]");
  if (learner_steps < checkpoints) throw ConfigError("config key 'chain.learner_steps': must be >= checkpoints");
  if (outer < 100) throw ConfigError("config key 'mc.outer': must be >= 100");

  const GibbsSpec spec = p.gibbs_spec();
  const EnergyGradient grad = squared_error_energy_gradient();
  RandomStream data_stream = RandomStream::substream(ctx.seed, 0);
  const Dataset s = p.data_model().sample(data_stream);
  const gaussian::PosteriorParams post = gaussian::posterior_params(p, s);
  const double post_sd = std::sqrt(post.sigma1_sq);

  std::vector<ChainResult> runs(chains);
  const std::uint64_t chain_seed = substream_seed(ctx.seed, 1);
  for_each_index(chains, Execution::parallel, [&](std::size_t c) {
    RandomStream stream = RandomStream::substream(chain_seed, c);
    runs[c] = langevin_chain(spec, s, grad, cfg, stream);
  });

  const double gibbs_gen = gaussian::iskl_closed(p) / p.alpha();
  const std::size_t burn_in = cfg.effective_burn_in();
  CsvWriter csv(ctx.path("sgld-converge.csv"),
                {"checkpoint", "steps", "mean_err_sd", "var_rel_err", "learner_steps", "mc_gen", "mc_se", "gibbs_gen",
                 "gap", "gap_z"});
  Timing timing(ctx.path("timing.csv"));
  for (std::size_t k = 1; k <= checkpoints; ++k) {
    const auto start = Clock::now();
    const std::size_t steps_k = cfg.steps * k / checkpoints;
    std::optional<double> mean_err;
    std::optional<double> var_err;
    if (steps_k > burn_in + 1) {
      ChainResult pooled;
      for (const auto& r : runs) pooled.draws.insert(pooled.draws.end(), r.draws.begin(), r.draws.begin() + (steps_k - burn_in));
      compute_diagnostics(pooled);
      double me = 0.0;
      double ve = 0.0;
      for (std::size_t j = 0; j < p.d; ++j) {
        me = std::max(me, std::abs(pooled.mean[j] - post.mean[j]) / post_sd);
        ve = std::max(ve, std::abs(pooled.variance[j] / post.sigma1_sq - 1.0));
      }
      mean_err = me;
      var_err = ve;
    }
    ChainConfig lcfg = cfg;
    lcfg.steps = learner_steps * k / checkpoints;
    lcfg.burn_in = 0;
    const EstimateWithError mc = mc_gen_error(p.data_model(), langevin_learner(spec, grad, lcfg),
                                              LossFunction::squared_error(), outer, 0, substream_seed(ctx.seed, 1 + k));
    const double gap = mc.value - gibbs_gen;
    const std::optional<double> gap_z = mc.std_error > 0.0 ? std::optional<double>(gap / mc.std_error) : std::nullopt;
    csv.row({k, steps_k, mean_err, var_err, lcfg.steps, mc.value, mc.std_error, gibbs_gen, gap, gap_z});
    timing.record(k - 1, elapsed_ms(start));
    if (k == checkpoints) {
      ctx.log << "sgld-converge: final mean error " << (mean_err ? format_number(*mean_err) : "n/a")
              << " posterior sd, variance error " << (var_err ? format_number(*var_err) : "n/a") << ", mc_gen "
              << format_number(mc.value) << " +- " << format_number(mc.std_error) << " vs "
              << format_number(gibbs_gen) << "\n";
    }
  }
  return kExitPass;
}

int bounds_compare(const Context& ctx) {
  const std::string kind = problem_kind(ctx.cfg);
  if (kind == "gaussian") {
    ctx.cfg.reject_unknown(merge({&kCommonKeys, &kGaussianKeys}));
  } else {
    ctx.cfg.reject_unknown(merge({&kCommonKeys, &kDiscreteKeys}));
  }
  const auto start = Clock::now();
  const Row r = kind == "gaussian" ? gaussian_row(gaussian_problem(ctx.cfg, 2, 10), 0, 0, ctx.seed)
                                   : discrete_row(discrete_setup(ctx.cfg).build(), 0, ctx.seed);
  const double gen = *r[0];
  // ismi_printed is reported, not guaranteed.
  const std::set<std::string> guaranteed{"thm2", "thm2_exact_ce", "dp",     "raginsky",
                                         "kuzborskij", "xu_mi",   "ismi_derived", "ismi_numeric"};
  CsvWriter csv(ctx.path("bounds-compare.csv"), {"quantity", "value", "exact_gen", "ratio_to_gen", "dominates", "guaranteed"});
  bool ok = true;
  for (std::size_t c = 0; c < r.size(); ++c) {
    const std::string& name = kResultHeader[c + kFirstNumericColumn];
    if (name == "mc_gen" || name == "mc_se") continue;
    const bool is_bound = c >= 6;
    const std::optional<double> ratio =
        r[c] && gen > 0.0 ? std::optional<double>(*r[c] / gen) : std::nullopt;
    std::string dominates;
    if (is_bound && r[c]) {
      const bool d = *r[c] >= gen - 1e-12;
      dominates = d ? "true" : "false";
      if (!d && guaranteed.count(name)) {
        ok = false;
        ctx.log << "FAIL: bound " << name << " = " << format_number(*r[c]) << " < exact gen " << format_number(gen) << "\n";
      }
    }
    csv.row({name, r[c], gen, ratio, dominates, is_bound ? (guaranteed.count(name) ? "true" : "false") : ""});
  }
  Timing timing(ctx.path("timing.csv"));
  timing.record(0, elapsed_ms(start));
  ctx.log << "bounds-compare (" << kind << "): exact gen " << format_number(gen) << "\n";
  return ok ? kExitPass : kExitAssertion;
}

struct Command {
  std::function<int(const Context&)> fn;
  std::set<std::string> keys;  // empty: the command validates keys itself
};

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"verify-thm1-discrete", {verify_thm1_discrete, merge({&kCommonKeys, &kRandomKeys})}},
      {"verify-thm1-gaussian", {verify_thm1_gaussian, merge({&kCommonKeys, &kGaussianKeys, &kMcKeys})}},
      {"sweep", {sweep, {}}},
      {"mixture-concavity", {mixture_concavity, merge({&kCommonKeys, &kRandomKeys, &kMixtureKeys})}},
      {"sgld-converge", {sgld_converge, merge({&kCommonKeys, &kGaussianKeys, &kChainKeys, &kMcKeys})}},
      {"bounds-compare", {bounds_compare, {}}},
  };
  return table;
}

void write_manifest(const Context& ctx) {
  nlohmann::json m;
  m["schema"] = kSchemaVersion;
  m["command"] = ctx.command;
  m["seed"] = ctx.seed;
  m["config"] = ctx.cfg.doc();
  std::ofstream out(ctx.path("run.json"), std::ios::binary | std::ios::trunc);
  out << m.dump(2) << '\n';
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, cmd] : commands()) v.push_back(name);
    return v;
  }();
  return names;
}

int run(const std::string& command, Config cfg, std::ostream& log) {
  try {
    const auto it = commands().find(command);
    if (it == commands().end()) throw ConfigError("unknown command '" + command + "'");
    if (cfg.has("command") && cfg.string("command", "") != command) {
      throw ConfigError("config is for command '" + cfg.string("command", "") + "', not '" + command + "'");
    }
    if (!it->second.keys.empty()) cfg.reject_unknown(it->second.keys);
    if (!cfg.has("seed")) throw ConfigError("a seed is required (--seed or config key 'seed')");
    const std::uint64_t seed = cfg.u64("seed");
    if (cfg.has("workers")) {
      const std::size_t workers = cfg.count("workers", 0);
      if (workers < 1) throw ConfigError("config key 'workers': must be >= 1");
      set_worker_count(static_cast<int>(workers));
    }
    const fs::path out = cfg.string("out", "out/" + command);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());

    const Context ctx{command, cfg, seed, out, log};
    const int status = it->second.fn(ctx);
    write_manifest(ctx);
    return status;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StateSpaceError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DivergenceError& e) {
    log << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const ZeroAcceptanceError& e) {
    log << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    log << "numeric error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run(const Options& opts, std::ostream& log) {
  Config cfg;
  try {
    if (opts.config_path) cfg = Config::from_file(*opts.config_path);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (opts.seed) cfg.set("seed", *opts.seed);
  if (opts.out_dir) cfg.set("out", *opts.out_dir);
  if (opts.workers) cfg.set("workers", *opts.workers);
  return run(opts.command, std::move(cfg), log);
}

}  // namespace gibbs::cli
