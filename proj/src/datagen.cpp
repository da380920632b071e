#include "dxmcp/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dxmcp/rng.hpp"

namespace dxmcp {

namespace {

using numerics::bivariate_normal_cdf;
using numerics::DomainError;
using numerics::std_normal_cdf;
using numerics::std_normal_quantile;

// Regularization floor for latent matrices; small enough not to perturb the
// target correlations visibly.
constexpr double kLatentEps0 = 1e-10;

void require_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
}

std::vector<std::string> default_names(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < m; ++j) names.push_back("test_" + std::to_string(j + 1));
  return names;
}

}  // namespace

// -- LFC ---------------------------------------------------------------------

std::vector<int> LfcScenario::effective_b() const {
  if (!b.empty()) return b;
  std::vector<int> alt(m);
  for (std::size_t j = 0; j < m; ++j) alt[j] = j % 2 == 0 ? 1 : 0;
  return alt;
}

void LfcScenario::validate() const {
  if (m == 0) throw std::invalid_argument("m must be positive");
  if (!b.empty() && b.size() != m) throw std::invalid_argument("b must have length m");
  for (int v : b)
    if (v != 0 && v != 1) throw std::invalid_argument("b entries must be 0 or 1");
  require_probability(se0, "se0");
  require_probability(sp0, "sp0");
  if (!(rho_se >= 0.0 && rho_se < 1.0)) throw std::invalid_argument("rho_se must lie in [0, 1)");
  if (!(rho_sp >= 0.0 && rho_sp < 1.0)) throw std::invalid_argument("rho_sp must lie in [0, 1)");
  if (n1 == 0 || n0 == 0) throw std::invalid_argument("group sizes must be positive");
}

TruthSet lfc_params(const LfcScenario& scenario) {
  scenario.validate();
  const auto b = scenario.effective_b();
  TruthSet t;
  for (int bj : b) {
    t.se.push_back(bj == 1 ? scenario.se0 : 1.0);
    t.sp.push_back(bj == 0 ? scenario.sp0 : 1.0);
  }
  return t;
}

std::pair<double, double> binary_correlation_range(double p1, double p2) {
  const double scale = std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2));
  const double lo = (std::max(0.0, p1 + p2 - 1.0) - p1 * p2) / scale;
  const double hi = (std::min(p1, p2) - p1 * p2) / scale;
  return {lo, hi};
}

double latent_correlation(double p1, double p2, double rho_target) {
  if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0))
    throw DomainError("latent_correlation: margins must lie in (0, 1)");
  const auto [lo, hi] = binary_correlation_range(p1, p2);
  constexpr double kSlack = 1e-12;
  if (!(rho_target >= lo - kSlack && rho_target <= hi + kSlack)) {
    std::ostringstream msg;
    msg << "binary correlation " << rho_target << " is infeasible for margins (" << p1 << ", "
        << p2 << "); feasible range is [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
  if (rho_target == 0.0) return 0.0;

  const double joint =
      p1 * p2 + rho_target * std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2));
  const double x = std_normal_quantile(p1);
  const double y = std_normal_quantile(p2);
  // P(Z1 <= x, Z2 <= y; r) is increasing in r.
  double a = -1.0;
  double b = 1.0;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double mid = 0.5 * (a + b);
    const double f = bivariate_normal_cdf(x, y, mid) - joint;
    if (f == 0.0) return mid;
    (f < 0.0 ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

LfcGenerator::Block LfcGenerator::make_block(const std::vector<std::size_t>& columns, double p,
                                             double rho) {
  Block block;
  block.columns = columns;
  block.threshold = std_normal_quantile(p);
  if (!columns.empty()) {
    const double latent = latent_correlation(p, p, rho);
    block.factor = numerics::regularize_and_factor(
        numerics::CorrelationMatrix::equicorrelation(columns.size(), latent), kLatentEps0);
  }
  return block;
}

LfcGenerator::LfcGenerator(const LfcScenario& scenario)
    : scenario_(scenario), truth_(lfc_params(scenario)) {
  const auto b = scenario.effective_b();
  std::vector<std::size_t> se_cols;
  std::vector<std::size_t> sp_cols;
  for (std::size_t j = 0; j < scenario.m; ++j) (b[j] == 1 ? se_cols : sp_cols).push_back(j);
  se_block_ = make_block(se_cols, scenario.se0, scenario.rho_se);
  sp_block_ = make_block(sp_cols, scenario.sp0, scenario.rho_sp);
}

BinaryMatrix LfcGenerator::draw(const Block& block, std::size_t n, std::size_t m,
                                std::uint64_t seed) {
  BinaryMatrix q(n, m, 1);
  if (block.columns.empty()) return q;
  numerics::MvnSampler sampler(block.factor, seed);
  std::vector<double> z(block.columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    sampler.draw(z);
    for (std::size_t k = 0; k < z.size(); ++k) q(i, block.columns[k]) = z[k] <= block.threshold;
  }
  return q;
}

StudyData LfcGenerator::generate(std::uint64_t seed) const {
  StudyData d;
  d.q1 = draw(se_block_, scenario_.n1, scenario_.m, derive_seed(seed, 1));
  d.q0 = draw(sp_block_, scenario_.n0, scenario_.m, derive_seed(seed, 0));
  d.test_names = default_names(scenario_.m);
  return d;
}

double LfcGenerator::regularization_epsilon() const noexcept {
  double eps = 0.0;
  if (!se_block_.columns.empty()) eps = std::max(eps, se_block_.factor.epsilon);
  if (!sp_block_.columns.empty()) eps = std::max(eps, sp_block_.factor.epsilon);
  return eps;
}

StudyData generate_lfc(const LfcScenario& scenario, std::uint64_t seed) {
  return LfcGenerator(scenario).generate(seed);
}

// -- biomarker ---------------------------------------------------------------

void BiomarkerScenario::validate() const {
  if (auc.empty()) throw std::invalid_argument("at least one marker is required");
  for (double a : auc) require_probability(a, "auc");
  if (tests.empty()) throw std::invalid_argument("at least one test is required");
  if (tests.size() < auc.size()) throw std::invalid_argument("need at least one test per marker");
  for (const auto& t : tests) {
    if (t.marker >= auc.size()) throw std::invalid_argument("test refers to an unknown marker");
    if (!std::isfinite(t.cutpoint)) throw std::invalid_argument("cutpoints must be finite");
  }
  if (!(rho0 > -1.0 && rho0 < 1.0) || !(rho1 > -1.0 && rho1 < 1.0))
    throw std::invalid_argument("marker correlations must lie in (-1, 1)");
  if (n1 == 0 || n0 == 0) throw std::invalid_argument("group sizes must be positive");
}

double auc_to_mean(double auc) {
  if (!(auc > 0.0 && auc < 1.0)) throw DomainError("auc must lie in (0, 1)");
  return std::numbers::sqrt2 * std_normal_quantile(auc);
}

TruthSet biomarker_params(const BiomarkerScenario& scenario) {
  scenario.validate();
  TruthSet t;
  for (const auto& test : scenario.tests) {
    const double mu = auc_to_mean(scenario.auc[test.marker]);
    t.se.push_back(std_normal_cdf(mu - test.cutpoint));
    t.sp.push_back(std_normal_cdf(test.cutpoint));
  }
  return t;
}

BiomarkerGenerator::BiomarkerGenerator(const BiomarkerScenario& scenario)
    : scenario_(scenario), truth_(biomarker_params(scenario)) {
  for (double a : scenario.auc) mean1_.push_back(auc_to_mean(a));
  const std::size_t l = scenario.auc.size();
  factor1_ = numerics::regularize_and_factor(
      numerics::CorrelationMatrix::equicorrelation(l, scenario.rho1), kLatentEps0);
  factor0_ = numerics::regularize_and_factor(
      numerics::CorrelationMatrix::equicorrelation(l, scenario.rho0), kLatentEps0);
}

StudyData BiomarkerGenerator::generate(std::uint64_t seed) const {
  const std::size_t l = scenario_.auc.size();
  const std::size_t m = scenario_.m();
  StudyData d;
  d.q1 = BinaryMatrix(scenario_.n1, m);
  d.q0 = BinaryMatrix(scenario_.n0, m);
  std::vector<double> v(l);

  numerics::MvnSampler diseased(factor1_, derive_seed(seed, 1));
  for (std::size_t i = 0; i < scenario_.n1; ++i) {
    diseased.draw(v);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& t = scenario_.tests[j];
      d.q1(i, j) = mean1_[t.marker] + v[t.marker] > t.cutpoint;
    }
  }
  numerics::MvnSampler healthy(factor0_, derive_seed(seed, 0));
  for (std::size_t i = 0; i < scenario_.n0; ++i) {
    healthy.draw(v);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& t = scenario_.tests[j];
      d.q0(i, j) = !(v[t.marker] > t.cutpoint);
    }
  }
  d.test_names = default_names(m);
  return d;
}

double BiomarkerGenerator::regularization_epsilon() const noexcept {
  return std::max(factor1_.epsilon, factor0_.epsilon);
}

StudyData generate_biomarker(const BiomarkerScenario& scenario, std::uint64_t seed) {
  return BiomarkerGenerator(scenario).generate(seed);
}

}  // namespace dxmcp
