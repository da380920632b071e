#pragma once

// Monte-Carlo experiments: every repetition draws one dataset, applies every
// configured method to that same dataset, and records family-wise error and
// disjunctive power events.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "dxmcp/datagen.hpp"
#include "dxmcp/model.hpp"
#include "dxmcp/procedures.hpp"

namespace dxmcp {

using GeneratorSpec = std::variant<LfcScenario, BiomarkerScenario>;

struct ScenarioSpec {
  std::string label;
  GeneratorSpec generator;
  HypothesisSpec hyp;  // may differ from the generator's boundary values
  std::vector<MethodSpec> methods;
  std::size_t n_sim = 1000;
  std::uint64_t base_seed = kDefaultSeed;
  double pseudo_count = kDefaultPseudoCount;

  void validate() const;
};

struct MethodSummary {
  std::string method;
  std::size_t fwer_events = 0;   // repetitions with >= 1 true null rejected
  std::size_t power_events = 0;  // repetitions with >= 1 false null rejected
  std::optional<double> fwer_hat, fwer_mc_se;    // absent without true nulls
  std::optional<double> power_hat, power_mc_se;  // absent without false nulls
  std::vector<std::size_t> rejection_counts;     // per test
};

struct SimulationSummary {
  std::string label;
  std::size_t n_sim = 0;        // completed repetitions
  std::size_t n_failed = 0;
  std::vector<std::string> failures;  // first few messages
  std::size_t n1 = 0, n0 = 0, m = 0;
  std::size_t n_true_nulls = 0, n_false_nulls = 0;
  double regularization_epsilon = 0.0;
  double runtime_seconds = 0.0;
  std::vector<MethodSummary> methods;
  std::vector<std::uint64_t> dataset_fingerprints;  // one per completed repetition
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (p (1 - p) / n_sim)^(1/2).
double mc_standard_error(double p, std::size_t n_sim);

/// Per-repetition rejection decisions: decisions[rep][method][test].
using DecisionTable = std::vector<std::vector<std::vector<bool>>>;

/// Counts FWER and power events. true_null[j] marks tests whose combined null holds.
std::vector<MethodSummary> aggregate_decisions(const std::vector<bool>& true_null,
                                               const DecisionTable& decisions,
                                               const std::vector<std::string>& method_names);

/// Seed of repetition r (0-based) of a scenario.
std::uint64_t repetition_seed(std::uint64_t base_seed, const std::string& label, std::size_t r);

/// Runs all repetitions, evaluated on `jobs` threads; the result does not
/// depend on `jobs`. Throws SimulationError if more than 1% of the
/// repetitions fail.
SimulationSummary run_scenario(const ScenarioSpec& spec, std::size_t jobs = 1);

struct GridOutcome {
  std::string label;
  std::optional<SimulationSummary> summary;
  std::string error;  // set when summary is absent
};

/// Called after each scenario finishes, in input order.
using GridObserver = std::function<void(std::size_t index, const GridOutcome&)>;

/// Runs scenarios in order. Labels must be unique (std::invalid_argument
/// otherwise); a failing scenario is reported in its outcome and does not
/// stop the grid.
std::vector<GridOutcome> run_grid(const std::vector<ScenarioSpec>& specs, std::size_t parallelism,
                                  const GridObserver& observer = {});

/// `label,method,metric,estimate,mc_se,n_sim,n,n1,n0,m`; metrics without
/// defined estimates are omitted.
void write_results_header(std::ostream& out);
void write_results_rows(std::ostream& out, const SimulationSummary& summary);

TruthSet generator_truth(const GeneratorSpec& generator);

}  // namespace dxmcp
