#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dxmcp {

/// Dense 0/1 matrix, row-major; one row per subject, one column per test.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols, std::uint8_t fill = 0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint8_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::uint8_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const std::uint8_t* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::size_t column_sum(std::size_t j) const;

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Correctness matrices of a within-subject accuracy study. q1(i, j) = 1 iff
/// test j classified diseased subject i correctly (test positive); q0 the
/// same for non-diseased subjects (test negative).
struct StudyData {
  BinaryMatrix q1;
  BinaryMatrix q0;
  std::vector<std::string> test_names;

  std::size_t m() const noexcept { return q1.cols(); }
  std::size_t n1() const noexcept { return q1.rows(); }
  std::size_t n0() const noexcept { return q0.rows(); }

  friend bool operator==(const StudyData&, const StudyData&) = default;
};

/// Minimal acceptance criteria and significance level. Hypotheses are
/// one-sided: H0_j: Se_j <= se0 or Sp_j <= sp0.
struct HypothesisSpec {
  double se0 = 0.8;
  double sp0 = 0.8;
  double alpha = 0.025;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct TruthSet {
  std::vector<double> se;
  std::vector<double> sp;

  std::size_t m() const noexcept { return se.size(); }
};

/// True iff test j (0-based) satisfies the combined null hypothesis.
/// Parameters equal to a threshold belong to the null.
bool null_is_true(const TruthSet& truth, const HypothesisSpec& hyp, std::size_t j);

// -- validation of untrusted input -------------------------------------------

/// Unchecked study as read from a file: any integers, possibly ragged.
struct RawStudy {
  std::vector<std::vector<long long>> q1;
  std::vector<std::vector<long long>> q0;
  std::vector<std::string> test_names;  // may be empty; defaults to test_1..test_m
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ValidatedStudy {
  StudyData data;
  std::vector<std::size_t> constant_columns_q1;  // all-0 or all-1 among diseased
  std::vector<std::size_t> constant_columns_q0;
};

/// Checks binary entries, rectangular shape, non-empty groups and a common
/// column count. Every offending position is listed in the thrown error.
ValidatedStudy validate_study(const RawStudy& raw);

RawStudy to_raw(const StudyData& data);

/// Stable 64-bit fingerprint of the study contents.
std::uint64_t dataset_fingerprint(const StudyData& data);

}  // namespace dxmcp
