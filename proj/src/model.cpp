#include "dxmcp/model.hpp"

#include <cmath>
#include <sstream>

#include "dxmcp/rng.hpp"

namespace dxmcp {

std::size_t BinaryMatrix::column_sum(std::size_t j) const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < rows_; ++i) s += data_[i * cols_ + j];
  return s;
}

void HypothesisSpec::validate() const {
  if (!(se0 > 0.0 && se0 < 1.0)) throw std::invalid_argument("se0 must lie in (0, 1)");
  if (!(sp0 > 0.0 && sp0 < 1.0)) throw std::invalid_argument("sp0 must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must lie in (0, 0.5)");
}

bool null_is_true(const TruthSet& truth, const HypothesisSpec& hyp, std::size_t j) {
  if (j >= truth.se.size() || j >= truth.sp.size())
    throw std::out_of_range("test index " + std::to_string(j) + " out of range");
  return truth.se[j] <= hyp.se0 || truth.sp[j] <= hyp.sp0;
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

void check_group(const std::vector<std::vector<long long>>& rows, const char* group,
                 std::size_t expected_cols, std::vector<std::string>& problems) {
  if (rows.empty()) {
    problems.push_back(std::string("group ") + group + " has no rows");
    return;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != expected_cols) {
      std::ostringstream msg;
      msg << "group " << group << " row " << i << " has " << rows[i].size()
          << " columns, expected " << expected_cols;
      problems.push_back(msg.str());
      continue;
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      const long long v = rows[i][j];
      if (v != 0 && v != 1) {
        std::ostringstream msg;
        msg << "non-binary entry " << v << " at (group " << group << ", row " << i
            << ", col " << j << ")";
        problems.push_back(msg.str());
      }
    }
  }
}

BinaryMatrix to_matrix(const std::vector<std::vector<long long>>& rows, std::size_t cols) {
  BinaryMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = static_cast<std::uint8_t>(rows[i][j]);
  return m;
}

std::vector<std::size_t> constant_columns(const BinaryMatrix& q) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    const std::size_t s = q.column_sum(j);
    if (s == 0 || s == q.rows()) out.push_back(j);
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error("invalid study data: " + join(problems)), problems_(std::move(problems)) {}

ValidatedStudy validate_study(const RawStudy& raw) {
  std::vector<std::string> problems;
  const std::size_t m = raw.q1.empty() ? (raw.q0.empty() ? 0 : raw.q0.front().size())
                                       : raw.q1.front().size();
  if (!raw.q1.empty() && !raw.q0.empty() && raw.q1.front().size() != raw.q0.front().size()) {
    std::ostringstream msg;
    msg << "column count mismatch: q1 has " << raw.q1.front().size() << ", q0 has "
        << raw.q0.front().size();
    problems.push_back(msg.str());
  }
  if (m == 0 && (!raw.q1.empty() || !raw.q0.empty())) problems.push_back("no test columns");
  check_group(raw.q1, "1", m, problems);
  check_group(raw.q0, "0", m, problems);
  if (!raw.test_names.empty() && raw.test_names.size() != m) {
    std::ostringstream msg;
    msg << raw.test_names.size() << " test names given for " << m << " columns";
    problems.push_back(msg.str());
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  ValidatedStudy out;
  out.data.q1 = to_matrix(raw.q1, m);
  out.data.q0 = to_matrix(raw.q0, m);
  out.data.test_names = raw.test_names;
  if (out.data.test_names.empty())
    for (std::size_t j = 0; j < m; ++j) out.data.test_names.push_back("test_" + std::to_string(j + 1));
  out.constant_columns_q1 = constant_columns(out.data.q1);
  out.constant_columns_q0 = constant_columns(out.data.q0);
  return out;
}

RawStudy to_raw(const StudyData& data) {
  RawStudy raw;
  auto convert = [](const BinaryMatrix& q) {
    std::vector<std::vector<long long>> rows(q.rows(), std::vector<long long>(q.cols()));
    for (std::size_t i = 0; i < q.rows(); ++i)
      for (std::size_t j = 0; j < q.cols(); ++j) rows[i][j] = q(i, j);
    return rows;
  };
  raw.q1 = convert(data.q1);
  raw.q0 = convert(data.q0);
  raw.test_names = data.test_names;
  return raw;
}

std::uint64_t dataset_fingerprint(const StudyData& data) {
  std::uint64_t h = mix64(data.m() * 0x9E3779B97F4A7C15ULL + data.n1());
  auto absorb = [&h](const BinaryMatrix& q) {
    h = mix64(h ^ q.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
      std::uint64_t word = 0;
      for (std::size_t j = 0; j < q.cols(); ++j) {
        word = (word << 1) | q(i, j);
        if ((j + 1) % 64 == 0) {
          h = mix64(h ^ word);
          word = 0;
        }
      }
      h = mix64(h ^ word ^ (i << 1));
    }
  };
  absorb(data.q1);
  absorb(data.q0);
  return h;
}

}  // namespace dxmcp
