#include "dxmcp/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dxmcp::numerics {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_unit_interval(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream msg;
    msg << "probability must lie in (0, 1), got " << p;
    throw DomainError(msg.str());
  }
}

// Gauss-Legendre nodes/weights on [-1, 1] (positive half), orders 6, 12, 20.
constexpr std::array<double, 3> kGl6x = {0.9324695142031522, 0.6612093864662647,
                                         0.2386191860831970};
constexpr std::array<double, 3> kGl6w = {0.1713244923791705, 0.3607615730481384,
                                         0.4679139345726904};
constexpr std::array<double, 6> kGl12x = {0.9815606342467191, 0.9041172563704750,
                                          0.7699026741943050, 0.5873179542866171,
                                          0.3678314989981802, 0.1252334085114692};
constexpr std::array<double, 6> kGl12w = {0.04717533638651177, 0.1069393259953183,
                                          0.1600783285433464, 0.2031674267230659,
                                          0.2334925365383547, 0.2491470458134029};
constexpr std::array<double, 10> kGl20x = {
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
    0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
    0.2277858511416451, 0.07652652113349733};
constexpr std::array<double, 10> kGl20w = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
    0.1491729864726037,  0.1527533871307259};

// Upper orthant P(X > h, Y > k) with correlation r; Drezner-Wesolowsky
// integration as refined by Genz (2004).
double upper_orthant(double h, double k, double r) {
  std::span<const double> x;
  std::span<const double> w;
  if (std::abs(r) < 0.3) {
    x = kGl6x;
    w = kGl6w;
  } else if (std::abs(r) < 0.75) {
    x = kGl12x;
    w = kGl12w;
  } else {
    x = kGl20x;
    w = kGl20w;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double sn = std::sin(asr * (sign * x[i] + 1.0) / 2.0);
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return bvn * asr / (2.0 * kTwoPi) + std_normal_cdf(-h) * std_normal_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * std_normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double xs = (a * (sign * x[i] + 1.0)) * (a * (sign * x[i] + 1.0));
        const double rs = std::sqrt(1.0 - xs);
        const double asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          bvn += a * w[i] * std::exp(asr) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                  (1.0 + c * xs * (1.0 + d * xs)));
        }
      }
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0.0) return bvn + std_normal_cdf(-std::max(h, k));
  if (h >= k) return -bvn;
  const double band = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h)
                              : std_normal_cdf(-h) - std_normal_cdf(-k);
  return band - bvn;
}

void fill_max_statistic(std::span<const double> x, MaxStatistic stat, double& out) {
  double best = -INFINITY;
  if (stat == MaxStatistic::kMaxAll) {
    for (double v : x) best = std::max(best, v);
  } else {
    for (std::size_t j = 0; j + 1 < x.size(); j += 2) best = std::max(best, std::min(x[j], x[j + 1]));
  }
  out = best;
}

}  // namespace

// -- matrices ---------------------------------------------------------------

SquareMatrix SquareMatrix::identity(std::size_t dim) {
  SquareMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CorrelationMatrix::CorrelationMatrix(SquareMatrix entries) : entries_(std::move(entries)) {
  const std::size_t n = entries_.dim();
  if (n == 0) throw DomainError("correlation matrix must have positive dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (entries_(i, i) != 1.0) throw DomainError("correlation matrix diagonal must be 1");
    for (std::size_t j = 0; j < i; ++j) {
      const double v = entries_(i, j);
      if (v != entries_(j, i)) throw DomainError("correlation matrix must be symmetric");
      if (!(v >= -1.0 && v <= 1.0)) throw DomainError("correlation entries must lie in [-1, 1]");
    }
  }
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t dim) {
  return CorrelationMatrix(SquareMatrix::identity(dim));
}

CorrelationMatrix CorrelationMatrix::equicorrelation(std::size_t dim, double rho) {
  SquareMatrix m(dim, rho);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return CorrelationMatrix(std::move(m));
}

void CorrelationMatrix::set(std::size_t i, std::size_t j, double rho) {
  if (i == j) throw DomainError("cannot overwrite a diagonal entry");
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("correlation entries must lie in [-1, 1]");
  entries_(i, j) = rho;
  entries_(j, i) = rho;
}

CorrelationMatrix CorrelationMatrix::select(std::span<const std::size_t> coords) const {
  SquareMatrix m(coords.size());
  for (std::size_t a = 0; a < coords.size(); ++a)
    for (std::size_t b = 0; b < coords.size(); ++b) m(a, b) = entries_(coords[a], coords[b]);
  return CorrelationMatrix(std::move(m));
}

// -- univariate / bivariate normal -----------------------------------------

double std_normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

double std_normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double p) {
  check_unit_interval(p);

  // Acklam's rational approximation (relative error ~1e-9) ...
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // ... refined by two Newton steps on the erfc-based CDF.
  for (int step = 0; step < 2; ++step) {
    const double pdf = std_normal_pdf(x);
    if (pdf <= 0.0) break;
    const double err = p < 0.5 ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
    x -= err / pdf;
  }
  return x;
}

double bivariate_normal_cdf(double x, double y, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("rho must lie in [-1, 1]");
  if (std::isinf(x) || std::isinf(y)) {
    if (x == -INFINITY || y == -INFINITY) return 0.0;
    if (x == INFINITY) return std_normal_cdf(y);
    return std_normal_cdf(x);
  }
  const double p = upper_orthant(-x, -y, rho);
  return std::clamp(p, 0.0, 1.0);
}

// -- factorization and sampling ---------------------------------------------

CholeskyFactor regularize_and_factor(const CorrelationMatrix& r, double eps0) {
  if (!(eps0 > 0.0 && eps0 <= 0.1)) throw DomainError("eps0 must lie in (0, 0.1]");
  const std::size_t n = r.dim();
  for (double eps = eps0; eps <= 0.1 * (1.0 + 1e-9); eps *= 10.0) {
    SquareMatrix lower(n);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double sum = (1.0 - eps) * r(i, j) + (i == j ? eps : 0.0);
        for (std::size_t k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
        if (i == j) {
          if (!(sum > 0.0)) {
            ok = false;
            break;
          }
          lower(i, i) = std::sqrt(sum);
        } else {
          lower(i, j) = sum / lower(j, j);
        }
      }
    }
    if (ok) return {std::move(lower), eps};
  }
  throw SingularMatrixError("correlation matrix is not positive definite even after "
                            "regularization with eps = 0.1");
}

MvnSampler::MvnSampler(const CholeskyFactor& factor, std::uint64_t seed)
    : dim_(factor.lower.dim()), rows_(dim_), z_(dim_), rng_(seed) {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (factor.lower(i, j) != 0.0) rows_[i].emplace_back(j, factor.lower(i, j));
}

void MvnSampler::draw(std::span<double> out) {
  for (double& z : z_) z = rng_.normal();
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (const auto& [j, v] : rows_[i]) s += v * z_[j];
    out[i] = s;
  }
}

std::vector<double> mvn_sample(const CholeskyFactor& factor, std::size_t n_draws,
                               std::uint64_t seed) {
  MvnSampler sampler(factor, seed);
  const std::size_t dim = sampler.dim();
  std::vector<double> out(n_draws * dim);
  for (std::size_t t = 0; t < n_draws; ++t) sampler.draw({out.data() + t * dim, dim});
  return out;
}

// -- quantiles ----------------------------------------------------------------

std::vector<double> max_statistic_draws(const CorrelationMatrix& r, const QuantileRequest& req) {
  if (!(req.level > 0.0 && req.level < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  if (req.mc_draws == 0) throw DomainError("mc_draws must be positive");
  if (req.statistic == MaxStatistic::kMaxMinPairs && r.dim() % 2 != 0)
    throw DomainError("paired max-min statistic needs an even dimension");

  MvnSampler sampler(regularize_and_factor(r), req.seed);
  std::vector<double> x(r.dim());
  std::vector<double> stats(req.mc_draws);
  for (double& s : stats) {
    sampler.draw(x);
    fill_max_statistic(x, req.statistic, s);
  }
  std::sort(stats.begin(), stats.end());
  return stats;
}

double calibrated_quantile(const CorrelationMatrix& r, const QuantileRequest& req) {
  return sorted_quantile(max_statistic_draws(r, req), req.level);
}

std::size_t type1_index(std::size_t n, double level) {
  // the slack keeps e.g. 0.95 * 2000 from rounding up to 1901
  const double pos = std::ceil(level * static_cast<double>(n) - 1e-9);
  const auto k = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(n)));
  return k - 1;
}

double sorted_quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw DomainError("empirical quantile of an empty sample");
  return sorted[type1_index(sorted.size(), level)];
}

double empirical_quantile(std::span<const double> values, double level) {
  if (values.empty()) throw DomainError("empirical quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t k = type1_index(sorted.size(), level);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  return sorted[k];
}

}  // namespace dxmcp::numerics
