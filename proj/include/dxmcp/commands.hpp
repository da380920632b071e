#pragma once

// Command implementations behind the `dxmcp` executable. Each returns a
// process exit code: 0 success, 2 usage/config/data error, 3 numerical failure.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dxmcp/estimation.hpp"
#include "dxmcp/procedures.hpp"
#include "dxmcp/regions.hpp"
#include "dxmcp/wdbc.hpp"

namespace dxmcp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

struct AnalysisConfig {
  std::string data_path;
  HypothesisSpec hyp{0.9, 0.7, 0.025};
  MethodSpec method;
  double pseudo_count = kDefaultPseudoCount;
  std::vector<RegionKind> regions{RegionKind::kComparison, RegionKind::kConfidence};
  std::string output_json;   // empty: stdout
  std::string plot_prefix;   // empty: no plot CSVs
};

struct AnalysisResult {
  AccuracySummary summary;
  ProcedureResult procedure;
  std::vector<RegionSet> regions;
};

AnalysisResult analyze_study(const StudyData& data, const AnalysisConfig& config);

nlohmann::json analysis_json(const StudyData& data, const AnalysisConfig& config,
                             const AnalysisResult& result);

int cmd_analyze(const AnalysisConfig& config, std::ostream& out, std::ostream& err);

struct IngestConfig {
  std::string input_path;
  wdbc::IngestSpec spec;
  std::string output_path;  // empty: stdout
};

/// Parses `feature=t1,t2,...`.
std::optional<wdbc::FeatureThresholds> parse_feature_selection(const std::string& text);

int cmd_ingest_wdbc(const IngestConfig& config, std::ostream& out, std::ostream& err);

struct SimulateConfig {
  std::string config_path;
  std::string output_csv;        // empty: stdout
  std::string effective_config;  // empty: <output_csv>.config.json, or stderr when stdout
  std::size_t jobs = 1;
  std::uint64_t seed = kDefaultSeed;
  bool progress = true;
};

int cmd_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& err);

}  // namespace dxmcp
