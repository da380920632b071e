#include "dxmcp/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <optional>
#include <set>
#include <thread>

#include "dxmcp/estimation.hpp"

namespace dxmcp {

namespace {

struct RepetitionRecord {
  bool ok = false;
  std::string error;
  std::uint64_t fingerprint = 0;
  std::vector<std::vector<bool>> decisions;  // [method][test]
};

class AnyGenerator {
 public:
  explicit AnyGenerator(const GeneratorSpec& spec) {
    if (const auto* lfc = std::get_if<LfcScenario>(&spec))
      lfc_.emplace(*lfc);
    else
      marker_.emplace(std::get<BiomarkerScenario>(spec));
  }
  StudyData generate(std::uint64_t seed) const {
    return lfc_ ? lfc_->generate(seed) : marker_->generate(seed);
  }
  const TruthSet& truth() const { return lfc_ ? lfc_->truth() : marker_->truth(); }
  double epsilon() const {
    return lfc_ ? lfc_->regularization_epsilon() : marker_->regularization_epsilon();
  }

 private:
  std::optional<LfcGenerator> lfc_;
  std::optional<BiomarkerGenerator> marker_;
};

std::pair<std::size_t, std::size_t> group_sizes(const GeneratorSpec& g) {
  return std::visit([](const auto& s) { return std::pair{s.n1, s.n0}; }, g);
}

}  // namespace

void ScenarioSpec::validate() const {
  if (label.empty()) throw std::invalid_argument("scenario label must not be empty");
  if (n_sim == 0) throw std::invalid_argument("n_sim must be positive");
  if (methods.empty()) throw std::invalid_argument("at least one method is required");
  hyp.validate();
  for (const auto& m : methods) m.validate();
  std::visit([](const auto& g) { g.validate(); }, generator);
}

double mc_standard_error(double p, std::size_t n_sim) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n_sim));
}

TruthSet generator_truth(const GeneratorSpec& generator) {
  if (const auto* lfc = std::get_if<LfcScenario>(&generator)) return lfc_params(*lfc);
  return biomarker_params(std::get<BiomarkerScenario>(generator));
}

std::vector<MethodSummary> aggregate_decisions(const std::vector<bool>& true_null,
                                               const DecisionTable& decisions,
                                               const std::vector<std::string>& method_names) {
  const std::size_t m = true_null.size();
  const bool has_true = std::find(true_null.begin(), true_null.end(), true) != true_null.end();
  const bool has_false = std::find(true_null.begin(), true_null.end(), false) != true_null.end();
  std::vector<MethodSummary> out(method_names.size());
  for (std::size_t k = 0; k < method_names.size(); ++k) {
    out[k].method = method_names[k];
    out[k].rejection_counts.assign(m, 0);
  }
  for (const auto& rep : decisions) {
    for (std::size_t k = 0; k < method_names.size(); ++k) {
      bool false_rejection = false;
      bool true_rejection = false;
      for (std::size_t j = 0; j < m; ++j) {
        if (!rep[k][j]) continue;
        ++out[k].rejection_counts[j];
        (true_null[j] ? false_rejection : true_rejection) = true;
      }
      out[k].fwer_events += false_rejection;
      out[k].power_events += true_rejection;
    }
  }
  const std::size_t n = decisions.size();
  if (n == 0) return out;
  for (auto& s : out) {
    if (has_true) {
      s.fwer_hat = static_cast<double>(s.fwer_events) / static_cast<double>(n);
      s.fwer_mc_se = mc_standard_error(*s.fwer_hat, n);
    }
    if (has_false) {
      s.power_hat = static_cast<double>(s.power_events) / static_cast<double>(n);
      s.power_mc_se = mc_standard_error(*s.power_hat, n);
    }
  }
  return out;
}

std::uint64_t repetition_seed(std::uint64_t base_seed, const std::string& label, std::size_t r) {
  return derive_seed(base_seed, fnv1a64(label), r);
}

SimulationSummary run_scenario(const ScenarioSpec& spec, std::size_t jobs) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const AnyGenerator generator(spec.generator);
  const TruthSet& truth = generator.truth();
  const std::size_t m = truth.m();

  std::vector<bool> true_null(m);
  for (std::size_t j = 0; j < m; ++j) true_null[j] = null_is_true(truth, spec.hyp, j);

  std::vector<RepetitionRecord> records(spec.n_sim);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < spec.n_sim; r = next++) {
      RepetitionRecord& rec = records[r];
      try {
        const std::uint64_t seed = repetition_seed(spec.base_seed, spec.label, r);
        const StudyData data = generator.generate(seed);
        rec.fingerprint = dataset_fingerprint(data);
        const AccuracySummary summary = summarize(data, spec.hyp, spec.pseudo_count);
        for (std::size_t k = 0; k < spec.methods.size(); ++k) {
          MethodSpec method = spec.methods[k];
          method.seed = derive_seed(seed, k + 1, method.seed);
          rec.decisions.push_back(decide(data, summary, spec.hyp, method).reject);
        }
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.decisions.clear();
        rec.error = e.what();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, spec.n_sim);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SimulationSummary out;
  out.label = spec.label;
  std::tie(out.n1, out.n0) = group_sizes(spec.generator);
  out.m = m;
  out.n_true_nulls = static_cast<std::size_t>(std::count(true_null.begin(), true_null.end(), true));
  out.n_false_nulls = m - out.n_true_nulls;
  out.regularization_epsilon = generator.epsilon();

  DecisionTable decisions;
  for (auto& rec : records) {
    if (rec.ok) {
      decisions.push_back(std::move(rec.decisions));
      out.dataset_fingerprints.push_back(rec.fingerprint);
    } else {
      ++out.n_failed;
      if (out.failures.size() < 5) out.failures.push_back(rec.error);
    }
  }
  out.n_sim = decisions.size();
  if (out.n_failed * 100 > spec.n_sim) {
    throw SimulationError("scenario '" + spec.label + "': " + std::to_string(out.n_failed) +
                          " of " + std::to_string(spec.n_sim) +
                          " repetitions failed; first error: " + out.failures.front());
  }
  std::vector<std::string> names;
  for (const auto& method : spec.methods) names.push_back(method_label(method));
  out.methods = aggregate_decisions(true_null, decisions, names);
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<GridOutcome> run_grid(const std::vector<ScenarioSpec>& specs, std::size_t parallelism,
                                  const GridObserver& observer) {
  std::set<std::string> labels;
  for (const auto& s : specs)
    if (!labels.insert(s.label).second)
      throw std::invalid_argument("duplicate scenario label '" + s.label + "'");

  std::vector<GridOutcome> outcomes;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    GridOutcome outcome;
    outcome.label = specs[i].label;
    try {
      outcome.summary = run_scenario(specs[i], parallelism);
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
    if (observer) observer(i, outcome);
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

void write_results_header(std::ostream& out) {
  out << "label,method,metric,estimate,mc_se,n_sim,n,n1,n0,m\n";
}

void write_results_rows(std::ostream& out, const SimulationSummary& s) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(10);
  auto row = [&](const MethodSummary& ms, const char* metric, double est, double se) {
    out << s.label << ',' << ms.method << ',' << metric << ',' << est << ',' << se << ','
        << s.n_sim << ',' << s.n1 + s.n0 << ',' << s.n1 << ',' << s.n0 << ',' << s.m << '\n';
  };
  for (const auto& ms : s.methods) {
    if (ms.fwer_hat) row(ms, "fwer", *ms.fwer_hat, *ms.fwer_mc_se);
    if (ms.power_hat) row(ms, "power", *ms.power_hat, *ms.power_mc_se);
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace dxmcp
