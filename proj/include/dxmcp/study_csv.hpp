#pragma once

// Analysis input: `label,<test1>,<test2>,...` with one row per subject,
// label 1 = diseased, and binary cells meaning "test positive".

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dxmcp/model.hpp"

namespace dxmcp {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LabeledPredictions {
  std::vector<std::string> test_names;
  std::vector<int> label;                     // 1 diseased, 0 non-diseased
  std::vector<std::vector<int>> predictions;  // 1 test positive
};

/// Throws CsvError naming the offending line (1-based) and column.
LabeledPredictions read_labeled_csv(std::istream& in);

void write_labeled_csv(std::ostream& out, const LabeledPredictions& table);

/// Correctness matrices: diseased rows keep the prediction, non-diseased rows
/// store 1 - prediction.
RawStudy to_raw_study(const LabeledPredictions& table);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace dxmcp
