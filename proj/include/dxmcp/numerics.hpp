#pragma once

// Probability and small dense linear-algebra kernel: normal distribution
// functions, regularized Cholesky factors, multivariate normal sampling and
// Monte-Carlo calibrated max-type quantiles.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dxmcp/rng.hpp"

namespace dxmcp::numerics {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense square matrix, row-major.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t dim, double fill = 0.0)
      : dim_(dim), data_(dim * dim, fill) {}

  static SquareMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix with unit diagonal and entries in [-1, 1].
/// Positive semi-definiteness is not checked here; regularize_and_factor
/// deals with indefinite input.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  explicit CorrelationMatrix(SquareMatrix entries);  // validates

  static CorrelationMatrix identity(std::size_t dim);
  static CorrelationMatrix equicorrelation(std::size_t dim, double rho);

  std::size_t dim() const noexcept { return entries_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const SquareMatrix& entries() const noexcept { return entries_; }

  /// Sets entries (i, j) and (j, i); i != j.
  void set(std::size_t i, std::size_t j, double rho);

  /// Principal submatrix on the given coordinates (in the given order).
  CorrelationMatrix select(std::span<const std::size_t> coords) const;

  friend bool operator==(const CorrelationMatrix&, const CorrelationMatrix&) = default;

 private:
  SquareMatrix entries_;
};

struct CholeskyFactor {
  SquareMatrix lower;      // lower triangular, strictly upper part is zero
  double epsilon = 0.0;    // regularization weight that was applied
};

// -- univariate and bivariate normal -------------------------------------

double std_normal_pdf(double x) noexcept;
double std_normal_cdf(double x) noexcept;
/// Inverse of std_normal_cdf; throws DomainError unless 0 < p < 1.
double std_normal_quantile(double p);

/// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double x, double y, double rho);

// -- factorization and sampling ------------------------------------------

/// Cholesky factor of (1 - eps) R + eps I for the smallest eps in
/// {eps0, 10 eps0, ...} not exceeding 0.1 that factors.
CholeskyFactor regularize_and_factor(const CorrelationMatrix& r, double eps0 = 1e-4);

/// Streams draws Z * L^T with Z i.i.d. standard normal.
class MvnSampler {
 public:
  MvnSampler(const CholeskyFactor& factor, std::uint64_t seed);

  std::size_t dim() const noexcept { return dim_; }
  void draw(std::span<double> out);

 private:
  std::size_t dim_;
  // nonzero entries of each factor row, as (column, value)
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
  std::vector<double> z_;
  CounterRng rng_;
};

/// n_draws x dim draws, row-major.
std::vector<double> mvn_sample(const CholeskyFactor& factor, std::size_t n_draws,
                               std::uint64_t seed);

// -- quantiles -------------------------------------------------------------

enum class MaxStatistic {
  kMaxAll,       // max_k X_k
  kMaxMinPairs,  // max_j min(X_{2j}, X_{2j+1}), coordinates paired (Se_j, Sp_j)
};

struct QuantileRequest {
  double level = 0.975;
  MaxStatistic statistic = MaxStatistic::kMaxAll;
  std::size_t mc_draws = 100000;
  std::uint64_t seed = 0;
};

/// Monte-Carlo `level` quantile of the requested max statistic under N(0, R).
double calibrated_quantile(const CorrelationMatrix& r, const QuantileRequest& req);

/// Sorted Monte-Carlo draws of the requested statistic (for p-values).
std::vector<double> max_statistic_draws(const CorrelationMatrix& r, const QuantileRequest& req);

/// Type-1 (inverse ECDF) quantile: the ceil(level * n)-th order statistic,
/// clamped to [1, n]. Throws DomainError on empty input.
double empirical_quantile(std::span<const double> values, double level);

/// Same convention on data that is already sorted ascending.
double sorted_quantile(std::span<const double> sorted, double level);

/// Order-statistic index (0-based) used by the type-1 convention.
std::size_t type1_index(std::size_t n, double level);

}  // namespace dxmcp::numerics
