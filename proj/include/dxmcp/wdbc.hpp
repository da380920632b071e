#pragma once

// Wisconsin Diagnostic Breast Cancer data in the UCI `wdbc.data` layout:
// id, diagnosis (M/B), then 30 real-valued features, no header.

#include <array>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "dxmcp/study_csv.hpp"

namespace dxmcp::wdbc {

inline constexpr std::size_t kFeatureCount = 30;
inline constexpr std::size_t kExpectedRows = 569;

/// Feature names in file order (mean, standard error, worst of ten measurements).
const std::array<std::string_view, kFeatureCount>& feature_names();

struct Record {
  std::string id;
  int diagnosis = 0;  // M -> 1, B -> 0
  std::array<double, kFeatureCount> features{};
};

/// Throws CsvError on a row with other than 32 columns, an unknown diagnosis,
/// a non-numeric feature, or (if expected_rows > 0) a different row count.
std::vector<Record> read_records(std::istream& in, std::size_t expected_rows = kExpectedRows);

struct FeatureThresholds {
  std::string feature;
  std::vector<double> thresholds;
};

struct IngestSpec {
  std::vector<FeatureThresholds> selections;
};

/// Largest cell area, compactness and concavity, five thresholds each near
/// the 30-70% quantiles; the area thresholds include 700.
IngestSpec scenario_a();

/// Shortest decimal representation, e.g. 700 or 0.21.
std::string format_threshold(double t);

/// One binary column `<feature>_gt_<threshold>` per (feature, threshold),
/// positive when the feature exceeds the threshold. Throws CsvError for an
/// unknown feature (listing valid names) or a non-finite threshold.
LabeledPredictions ingest(const std::vector<Record>& records, const IngestSpec& spec);

}  // namespace dxmcp::wdbc
