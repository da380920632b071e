#include "dxmcp/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dxmcp {

double shrink_estimate(std::size_t successes, std::size_t n, double pseudo_count) {
  if (n == 0) throw numerics::DomainError("proportion over an empty group");
  if (successes > n)
    throw numerics::DomainError("successes (" + std::to_string(successes) +
                                ") exceed group size (" + std::to_string(n) + ")");
  if (!(pseudo_count >= 0.0)) throw numerics::DomainError("pseudo_count must be non-negative");
  return (static_cast<double>(successes) + pseudo_count) /
         (static_cast<double>(n) + 2.0 * pseudo_count);
}

double AccuracySummary::min_z(std::size_t j) const { return std::min(z_se[j], z_sp[j]); }

numerics::CorrelationMatrix binary_correlation(const BinaryMatrix& q) {
  const std::size_t m = q.cols();
  const std::size_t n = q.rows();
  std::vector<double> sums(m, 0.0);
  numerics::SquareMatrix joint(m);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* row = q.row(i);
    for (std::size_t a = 0; a < m; ++a) {
      if (!row[a]) continue;
      sums[a] += 1.0;
      for (std::size_t b = a + 1; b < m; ++b) joint(a, b) += row[b];
    }
  }
  numerics::SquareMatrix r = numerics::SquareMatrix::identity(m);
  const double dn = static_cast<double>(n);
  for (std::size_t a = 0; a < m; ++a) {
    const double pa = sums[a] / dn;
    for (std::size_t b = a + 1; b < m; ++b) {
      const double pb = sums[b] / dn;
      const double var = pa * (1.0 - pa) * pb * (1.0 - pb);
      double rho = 0.0;
      if (var > 0.0) rho = std::clamp((joint(a, b) / dn - pa * pb) / std::sqrt(var), -1.0, 1.0);
      r(a, b) = rho;
      r(b, a) = rho;
    }
  }
  return numerics::CorrelationMatrix(std::move(r));
}

AccuracySummary summarize(const StudyData& data, const HypothesisSpec& hyp, double pseudo_count) {
  const std::size_t m = data.m();
  AccuracySummary s;
  s.n1 = data.n1();
  s.n0 = data.n0();
  s.pseudo_count = pseudo_count;
  s.se_hat.resize(m);
  s.sp_hat.resize(m);
  s.se_se.resize(m);
  s.sp_se.resize(m);
  s.z_se.resize(m);
  s.z_sp.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    s.se_hat[j] = shrink_estimate(data.q1.column_sum(j), s.n1, pseudo_count);
    s.sp_hat[j] = shrink_estimate(data.q0.column_sum(j), s.n0, pseudo_count);
    s.se_se[j] = std::sqrt(s.se_hat[j] * (1.0 - s.se_hat[j]) / static_cast<double>(s.n1));
    s.sp_se[j] = std::sqrt(s.sp_hat[j] * (1.0 - s.sp_hat[j]) / static_cast<double>(s.n0));
    s.z_se[j] = (s.se_hat[j] - hyp.se0) / s.se_se[j];
    s.z_sp[j] = (s.sp_hat[j] - hyp.sp0) / s.sp_se[j];
  }

  const auto r1 = binary_correlation(data.q1);
  const auto r0 = binary_correlation(data.q0);
  numerics::SquareMatrix r = numerics::SquareMatrix::identity(2 * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      r(a, b) = r1(a, b);
      r(m + a, m + b) = r0(a, b);
    }
  }
  s.r_hat = numerics::CorrelationMatrix(std::move(r));
  return s;
}

}  // namespace dxmcp
