#pragma once

#include <cstddef>
#include <vector>

#include "dxmcp/model.hpp"
#include "dxmcp/numerics.hpp"

namespace dxmcp {

/// Pseudo-observations added to each outcome (success and failure) when
/// estimating a proportion. 0.5 is one pseudo-subject split evenly, which
/// pulls estimates towards 1/2 by (x + 0.5) / (n + 1); 1 gives Laplace's rule.
inline constexpr double kDefaultPseudoCount = 0.5;

/// (successes + c) / (n + 2c). Throws numerics::DomainError if successes > n,
/// n == 0 or c < 0.
double shrink_estimate(std::size_t successes, std::size_t n,
                       double pseudo_count = kDefaultPseudoCount);

/// Shrunk accuracy estimates with their Wald statistics against (se0, sp0).
/// Coordinates of r_hat are ordered (Se_1..Se_m, Sp_1..Sp_m); the two
/// diagonal blocks come from different subjects, so cross-block entries are 0.
struct AccuracySummary {
  std::vector<double> se_hat, sp_hat;
  std::vector<double> se_se, sp_se;
  std::vector<double> z_se, z_sp;
  numerics::CorrelationMatrix r_hat;
  std::size_t n1 = 0;
  std::size_t n0 = 0;
  double pseudo_count = kDefaultPseudoCount;

  std::size_t m() const noexcept { return se_hat.size(); }
  double min_z(std::size_t j) const;
};

AccuracySummary summarize(const StudyData& data, const HypothesisSpec& hyp,
                          double pseudo_count = kDefaultPseudoCount);

/// Pearson correlation matrix of the columns of q; a constant column gets
/// zero correlation with everything else.
numerics::CorrelationMatrix binary_correlation(const BinaryMatrix& q);

}  // namespace dxmcp
