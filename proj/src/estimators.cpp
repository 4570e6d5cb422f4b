#include "gibbs/estimators.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace gibbs {

EstimateWithError mc_gen_error(const DataModel& model, const Learner& learner, const LossFunction& loss,
                               std::size_t outer, std::size_t fresh_per_risk, std::uint64_t seed, Execution exec) {
  if (outer < 100) throw std::invalid_argument("mc_gen_error: outer must be >= 100");
  if (!learner) throw std::invalid_argument("mc_gen_error: missing learner");
  const RiskBudget budget = fresh_per_risk == 0 ? RiskBudget::exact_value() : RiskBudget::monte_carlo(fresh_per_risk);
  std::vector<double> diffs(outer);
  for_each_index(outer, exec, [&](std::size_t i) {
    RandomStream stream = RandomStream::substream(seed, i);
    const Dataset s = model.sample(stream);
    const Hypothesis w = learner(s, stream);
    const double risk_p = population_risk(loss, w, model, budget, stream).value;
    diffs[i] = risk_p - empirical_risk(loss, w, s);
  });
  return summarize(diffs);
}

EstimateWithError iskl_energy_gap(const GibbsSpec& spec, const DataModel& model, const Learner& learner,
                                  std::size_t outer, std::uint64_t seed, Execution exec) {
  if (outer < 2) throw std::invalid_argument("iskl_energy_gap: outer must be >= 2");
  if (!learner) throw std::invalid_argument("iskl_energy_gap: missing learner");
  std::vector<Dataset> datasets;
  std::vector<Hypothesis> hypotheses(outer);
  {
    std::vector<std::optional<Dataset>> slots(outer);
    for_each_index(outer, exec, [&](std::size_t i) {
      RandomStream stream = RandomStream::substream(seed, i);
      slots[i] = model.sample(stream);
      hypotheses[i] = learner(*slots[i], stream);
    });
    datasets.reserve(outer);
    for (auto& s : slots) datasets.push_back(std::move(*s));
  }
  std::vector<double> gaps(outer);
  for_each_index(outer, exec, [&](std::size_t i) {
    const Hypothesis& shifted = hypotheses[(i + 1) % outer];
    gaps[i] = spec.energy(shifted, datasets[i]) - spec.energy(hypotheses[i], datasets[i]);
  });
  EstimateWithError est = summarize(gaps);
  est.value *= spec.alpha();
  est.std_error *= spec.alpha();
  return est;
}

EstimateWithError iskl_energy_gap(const GibbsSpec& spec, const DataModel& model, std::size_t outer,
                                  std::uint64_t seed, Execution exec) {
  return iskl_energy_gap(spec, model, finite_gibbs_learner(spec), outer, seed, exec);
}

}  // namespace gibbs
