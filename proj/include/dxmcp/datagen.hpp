#pragma once

// Synthetic study generators: least-favorable configurations built from
// thresholded latent Gaussians, and a binormal multi-marker model split at
// cutpoints.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dxmcp/model.hpp"
#include "dxmcp/numerics.hpp"

namespace dxmcp {

/// Each test sits on the boundary of exactly one endpoint: b[j] = 1 puts
/// sensitivity at se0 (specificity 1), b[j] = 0 puts specificity at sp0.
/// Non-degenerate endpoints are equicorrelated within each group.
struct LfcScenario {
  std::size_t m = 10;
  std::vector<int> b;  // empty: alternating 1, 0, 1, 0, ...
  double se0 = 0.8;
  double sp0 = 0.8;
  double rho_se = 0.0;
  double rho_sp = 0.0;
  std::size_t n1 = 100;
  std::size_t n0 = 300;

  std::vector<int> effective_b() const;
  void validate() const;
};

struct MarkerCut {
  std::size_t marker = 0;
  double cutpoint = 0.0;
};

/// Markers V ~ N(mu, R1) among diseased and N(0, R0) among non-diseased, unit
/// variances, equicorrelated; test j is positive iff V[marker_j] > cutpoint_j.
struct BiomarkerScenario {
  std::vector<double> auc;
  double rho0 = 0.0;
  double rho1 = 0.0;
  std::vector<MarkerCut> tests;
  std::size_t n1 = 100;
  std::size_t n0 = 300;

  std::size_t m() const noexcept { return tests.size(); }
  void validate() const;
};

TruthSet lfc_params(const LfcScenario& scenario);

/// Latent normal correlation whose thresholding at (Phi^-1(p1), Phi^-1(p2))
/// yields binary variables with correlation rho_target. Throws
/// numerics::DomainError (with the feasible range) if no such value exists.
double latent_correlation(double p1, double p2, double rho_target);

/// Feasible binary correlation range for margins (p1, p2).
std::pair<double, double> binary_correlation_range(double p1, double p2);

double auc_to_mean(double auc);

TruthSet biomarker_params(const BiomarkerScenario& scenario);

/// Precomputes latent factors once; generate() is then cheap and pure.
class LfcGenerator {
 public:
  explicit LfcGenerator(const LfcScenario& scenario);

  StudyData generate(std::uint64_t seed) const;
  const TruthSet& truth() const noexcept { return truth_; }
  /// Largest regularization weight applied to a latent correlation matrix.
  double regularization_epsilon() const noexcept;

 private:
  struct Block {
    std::vector<std::size_t> columns;  // non-degenerate test indices
    double threshold = 0.0;            // Z <= threshold means correct
    numerics::CholeskyFactor factor;
  };
  static Block make_block(const std::vector<std::size_t>& columns, double p, double rho);
  static BinaryMatrix draw(const Block& block, std::size_t n, std::size_t m, std::uint64_t seed);

  LfcScenario scenario_;
  TruthSet truth_;
  Block se_block_;
  Block sp_block_;
};

class BiomarkerGenerator {
 public:
  explicit BiomarkerGenerator(const BiomarkerScenario& scenario);

  StudyData generate(std::uint64_t seed) const;
  const TruthSet& truth() const noexcept { return truth_; }
  double regularization_epsilon() const noexcept;

 private:
  BiomarkerScenario scenario_;
  TruthSet truth_;
  std::vector<double> mean1_;
  numerics::CholeskyFactor factor1_;
  numerics::CholeskyFactor factor0_;
};

StudyData generate_lfc(const LfcScenario& scenario, std::uint64_t seed);
StudyData generate_biomarker(const BiomarkerScenario& scenario, std::uint64_t seed);

}  // namespace dxmcp
