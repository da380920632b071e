#include "dxmcp/wdbc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace dxmcp::wdbc {

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "radius_mean",       "texture_mean",          "perimeter_mean",
      "area_mean",         "smoothness_mean",       "compactness_mean",
      "concavity_mean",    "concave_points_mean",   "symmetry_mean",
      "fractal_dimension_mean",
      "radius_se",         "texture_se",            "perimeter_se",
      "area_se",           "smoothness_se",         "compactness_se",
      "concavity_se",      "concave_points_se",     "symmetry_se",
      "fractal_dimension_se",
      "radius_worst",      "texture_worst",         "perimeter_worst",
      "area_worst",        "smoothness_worst",      "compactness_worst",
      "concavity_worst",   "concave_points_worst",  "symmetry_worst",
      "fractal_dimension_worst"};
  return names;
}

std::vector<Record> read_records(std::istream& in, std::size_t expected_rows) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != kFeatureCount + 2) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << kFeatureCount + 2 << " columns, found "
          << cells.size();
      throw CsvError(msg.str());
    }
    Record r;
    r.id = cells[0];
    if (cells[1] == "M") {
      r.diagnosis = 1;
    } else if (cells[1] == "B") {
      r.diagnosis = 0;
    } else {
      throw CsvError("line " + std::to_string(line_no) + ", column 2: diagnosis must be M or B, got '" +
                     cells[1] + "'");
    }
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const std::string& cell = cells[k + 2];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "line " << line_no << ", column " << k + 3 << ": not a number: '" << cell << "'";
        throw CsvError(msg.str());
      }
      r.features[k] = v;
    }
    records.push_back(std::move(r));
  }
  if (expected_rows > 0 && records.size() != expected_rows) {
    throw CsvError("expected " + std::to_string(expected_rows) + " rows, found " +
                   std::to_string(records.size()));
  }
  return records;
}

IngestSpec scenario_a() {
  return {{{"area_worst", {550, 600, 700, 800, 900}},
           {"compactness_worst", {0.16, 0.18, 0.21, 0.25, 0.30}},
           {"concavity_worst", {0.14, 0.18, 0.23, 0.29, 0.35}}}};
}

std::string format_threshold(double t) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, t);
  return std::string(buf, ptr);
}

LabeledPredictions ingest(const std::vector<Record>& records, const IngestSpec& spec) {
  const auto& names = feature_names();
  LabeledPredictions table;
  std::vector<std::pair<std::size_t, double>> columns;
  for (const auto& sel : spec.selections) {
    const auto it = std::find(names.begin(), names.end(), sel.feature);
    if (it == names.end()) {
      std::string valid;
      for (auto n : names) valid += (valid.empty() ? "" : ", ") + std::string(n);
      throw CsvError("unknown feature '" + sel.feature + "'; valid names: " + valid);
    }
    for (double t : sel.thresholds) {
      if (!std::isfinite(t)) throw CsvError("threshold for '" + sel.feature + "' is not finite");
      columns.emplace_back(static_cast<std::size_t>(it - names.begin()), t);
      table.test_names.push_back(sel.feature + "_gt_" + format_threshold(t));
    }
  }
  if (columns.empty()) throw CsvError("no (feature, threshold) pairs selected");
  for (const auto& r : records) {
    table.label.push_back(r.diagnosis);
    std::vector<int> row;
    for (const auto& [k, t] : columns) row.push_back(r.features[k] > t ? 1 : 0);
    table.predictions.push_back(std::move(row));
  }
  return table;
}

}  // namespace dxmcp::wdbc
