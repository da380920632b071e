// dxmcp: multiplicity-adjusted evaluation of diagnostic tests with
// co-primary endpoints (sensitivity, specificity).
//
//   dxmcp analyze --data study.csv --se0 0.9 --sp0 0.7 --method pairs_boot
//   dxmcp ingest-wdbc --input wdbc.data --preset scenario-a --output tests.csv
//   dxmcp simulate --config grid.json --output results.csv

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dxmcp/commands.hpp"

int main(int argc, char** argv) {
  using namespace dxmcp;

  CLI::App app{"Multiple comparison procedures for diagnostic accuracy studies"};
  app.require_subcommand(1);
  std::uint64_t seed = kDefaultSeed;

  // analyze
  AnalysisConfig analysis;
  std::string method_name = "pairs_boot";
  std::string weights_name = "mammen";
  std::string calibration_name = "lfc";
  std::vector<std::string> region_names{"comparison", "confidence"};
  auto* analyze = app.add_subcommand("analyze", "Evaluate binary test results against acceptance criteria");
  analyze->add_option("--data", analysis.data_path, "CSV with header label,<test1>,...")->required();
  analyze->add_option("--se0", analysis.hyp.se0, "Minimal acceptable sensitivity")->capture_default_str();
  analyze->add_option("--sp0", analysis.hyp.sp0, "Minimal acceptable specificity")->capture_default_str();
  analyze->add_option("--alpha", analysis.hyp.alpha, "One-sided family-wise level")->capture_default_str();
  analyze->add_option("--method", method_name, "none|bonferroni|maxt|pairs_boot|wild_boot")->capture_default_str();
  analyze->add_option("--b-boot", analysis.method.b_boot, "Bootstrap replicates")->capture_default_str();
  analyze->add_option("--mc-draws", analysis.method.mc_draws, "Normal draws for maxT")->capture_default_str();
  analyze->add_option("--wild-weights", weights_name, "rademacher|mammen")->capture_default_str();
  analyze->add_option("--calibration", calibration_name, "lfc|max_min|equicoordinate_2m")->capture_default_str();
  analyze->add_option("--pseudo-count", analysis.pseudo_count, "Shrinkage pseudo-count per outcome")->capture_default_str();
  analyze->add_option("--regions", region_names, "Region kinds to report")->delimiter(',')->capture_default_str();
  analyze->add_option("--output", analysis.output_json, "Result JSON (default: stdout)");
  analyze->add_option("--plot-prefix", analysis.plot_prefix, "Write <prefix>_<kind>.csv region plot data");
  analyze->add_option("--seed", seed, "Random seed")->capture_default_str();

  // ingest-wdbc
  IngestConfig ingest;
  std::vector<std::string> selections;
  std::string preset;
  auto* ingest_cmd = app.add_subcommand("ingest-wdbc", "Turn UCI wdbc.data into threshold tests");
  ingest_cmd->add_option("--input", ingest.input_path, "wdbc.data (UCI layout)")->required();
  ingest_cmd->add_option("--select", selections, "feature=t1,t2,... (repeatable)");
  ingest_cmd->add_option("--preset", preset, "Named selection: scenario-a");
  ingest_cmd->add_option("--output", ingest.output_path, "Output CSV (default: stdout)");
  ingest_cmd->add_option("--seed", seed, "Accepted for uniformity; ingestion is deterministic");

  // simulate
  SimulateConfig simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a simulation grid");
  simulate_cmd->add_option("--config", simulate.config_path, "Grid JSON")->required();
  simulate_cmd->add_option("--output", simulate.output_csv, "Results CSV (default: stdout)");
  simulate_cmd->add_option("--effective-config", simulate.effective_config,
                           "Where to echo the resolved config (default: <output>.config.json)");
  simulate_cmd->add_option("--jobs", simulate.jobs, "Worker threads")->capture_default_str();
  simulate_cmd->add_option("--seed", seed, "Base seed for scenarios without base_seed")->capture_default_str();
  bool quiet = false;
  simulate_cmd->add_flag("--quiet", quiet, "Suppress progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (analyze->parsed()) {
    const auto kind = parse_method_kind(method_name);
    const auto weights = parse_wild_weights(weights_name);
    const auto calibration = parse_calibration(calibration_name);
    if (!kind || !weights || !calibration) {
      std::cerr << "error: unknown " << (!kind ? "method '" + method_name + "'"
                                        : !weights ? "wild weights '" + weights_name + "'"
                                                   : "calibration '" + calibration_name + "'")
                << '\n';
      return kExitUsage;
    }
    analysis.method.kind = *kind;
    analysis.method.wild_weights = *weights;
    analysis.method.calibration = *calibration;
    analysis.method.seed = seed;
    analysis.regions.clear();
    for (const auto& name : region_names) {
      if (name == "comparison") analysis.regions.push_back(RegionKind::kComparison);
      else if (name == "confidence") analysis.regions.push_back(RegionKind::kConfidence);
      else {
        std::cerr << "error: unknown region kind '" << name << "'\n";
        return kExitUsage;
      }
    }
    return cmd_analyze(analysis, std::cout, std::cerr);
  }

  if (ingest_cmd->parsed()) {
    if (!preset.empty()) {
      if (preset != "scenario-a") {
        std::cerr << "error: unknown preset '" << preset << "' (available: scenario-a)\n";
        return kExitUsage;
      }
      ingest.spec = wdbc::scenario_a();
    }
    for (const auto& text : selections) {
      const auto sel = parse_feature_selection(text);
      if (!sel) {
        std::cerr << "error: cannot parse selection '" << text << "' (expected feature=t1,t2,...)\n";
        return kExitUsage;
      }
      ingest.spec.selections.push_back(*sel);
    }
    if (ingest.spec.selections.empty()) {
      std::cerr << "error: give --preset or at least one --select\n";
      return kExitUsage;
    }
    return cmd_ingest_wdbc(ingest, std::cout, std::cerr);
  }

  simulate.seed = seed;
  simulate.progress = !quiet;
  return cmd_simulate(simulate, std::cout, std::cerr);
}
