#include "dxmcp/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "dxmcp/numerics.hpp"

namespace dxmcp {

namespace {

using numerics::std_normal_cdf;
using numerics::std_normal_quantile;

ProcedureResult threshold_decisions(const AccuracySummary& s, double c_comparison,
                                    double c_confidence, const MethodSpec& method) {
  ProcedureResult r;
  r.c_comparison = c_comparison;
  r.c_confidence = c_confidence;
  r.method = method;
  r.reject.resize(s.m());
  r.p_adj.resize(s.m());
  for (std::size_t j = 0; j < s.m(); ++j) r.reject[j] = s.min_z(j) > c_comparison;
  return r;
}

MethodSpec plain_method(MethodKind kind) {
  MethodSpec spec;
  spec.kind = kind;
  return spec;
}

// Rows of one group sorted lexicographically and collapsed to distinct
// patterns, so resampling cost scales with the number of patterns.
struct PatternTable {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::uint8_t> patterns;       // U x m
  std::vector<std::size_t> multiplicity;    // U
  std::vector<std::uint32_t> pattern_of;    // canonical subject -> pattern

  std::size_t size() const { return multiplicity.size(); }
  std::uint8_t at(std::size_t p, std::size_t j) const { return patterns[p * m + j]; }

  explicit PatternTable(const BinaryMatrix& q) : n(q.rows()), m(q.cols()) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::memcmp(q.row(a), q.row(b), m) < 0;
    });
    pattern_of.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint8_t* row = q.row(order[k]);
      if (k == 0 || std::memcmp(row, q.row(order[k - 1]), m) != 0) {
        patterns.insert(patterns.end(), row, row + m);
        multiplicity.push_back(0);
      }
      ++multiplicity.back();
      pattern_of[k] = static_cast<std::uint32_t>(multiplicity.size() - 1);
    }
  }
};

// Collects the comparison and all-coordinate maxima of each replicate.
class ReplicateStatistics {
 public:
  ReplicateStatistics(const AccuracySummary& s, Calibration calibration, std::size_t b)
      : m_(s.m()), calibration_(calibration), binding_(binding_coordinates(s)) {
    comparison_.reserve(b);
    all_.reserve(b);
  }

  void add(std::span<const double> z_se, std::span<const double> z_sp) {
    double all = -INFINITY;
    double comp = -INFINITY;
    for (std::size_t j = 0; j < m_; ++j) {
      all = std::max({all, z_se[j], z_sp[j]});
      switch (calibration_) {
        case Calibration::kLeastFavorable:
          comp = std::max(comp, binding_[j] < m_ ? z_se[j] : z_sp[j]);
          break;
        case Calibration::kMaxMin:
          comp = std::max(comp, std::min(z_se[j], z_sp[j]));
          break;
        case Calibration::kEquicoordinate2m:
          break;
      }
    }
    if (calibration_ == Calibration::kEquicoordinate2m) comp = all;
    comparison_.push_back(comp);
    all_.push_back(all);
  }

  ProcedureResult finish(const AccuracySummary& s, const HypothesisSpec& hyp,
                         const MethodSpec& method) {
    std::sort(comparison_.begin(), comparison_.end());
    std::sort(all_.begin(), all_.end());
    const double level = 1.0 - hyp.alpha;
    ProcedureResult r = threshold_decisions(s, numerics::sorted_quantile(comparison_, level),
                                            numerics::sorted_quantile(all_, level), method);
    const double b = static_cast<double>(comparison_.size());
    for (std::size_t j = 0; j < m_; ++j) {
      const auto first = std::lower_bound(comparison_.begin(), comparison_.end(), s.min_z(j));
      const double exceed = static_cast<double>(comparison_.end() - first);
      r.p_adj[j] = (exceed + 1.0) / (b + 1.0);
    }
    return r;
  }

 private:
  std::size_t m_;
  Calibration calibration_;
  std::vector<std::size_t> binding_;
  std::vector<double> comparison_;
  std::vector<double> all_;
};

double mammen_weight(CounterRng& rng) {
  static const double sqrt5 = std::sqrt(5.0);
  const double p_low = (sqrt5 + 1.0) / (2.0 * sqrt5);
  return rng.uniform() < p_low ? -(sqrt5 - 1.0) / 2.0 : (sqrt5 + 1.0) / 2.0;
}

double rademacher_weight(CounterRng& rng) { return (rng.next() >> 63) ? 1.0 : -1.0; }

}  // namespace

// -- names ---------------------------------------------------------------------

std::string_view to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::kNone: return "none";
    case MethodKind::kBonferroni: return "bonferroni";
    case MethodKind::kMaxT: return "maxt";
    case MethodKind::kPairsBootstrap: return "pairs_boot";
    case MethodKind::kWildBootstrap: return "wild_boot";
  }
  return "?";
}

std::string_view to_string(WildWeights weights) {
  return weights == WildWeights::kRademacher ? "rademacher" : "mammen";
}

std::string_view to_string(Calibration calibration) {
  switch (calibration) {
    case Calibration::kLeastFavorable: return "lfc";
    case Calibration::kMaxMin: return "max_min";
    case Calibration::kEquicoordinate2m: return "equicoordinate_2m";
  }
  return "?";
}

std::string method_label(const MethodSpec& method) {
  std::string label(to_string(method.kind));
  std::vector<std::string_view> options;
  const bool calibrated = method.kind == MethodKind::kMaxT ||
                          method.kind == MethodKind::kPairsBootstrap ||
                          method.kind == MethodKind::kWildBootstrap;
  if (calibrated && method.calibration != Calibration::kLeastFavorable)
    options.push_back(to_string(method.calibration));
  if (method.kind == MethodKind::kWildBootstrap && method.wild_weights != WildWeights::kMammen)
    options.push_back(to_string(method.wild_weights));
  for (std::size_t i = 0; i < options.size(); ++i)
    label += (i == 0 ? "[" : "+") + std::string(options[i]);
  if (!options.empty()) label += ']';
  return label;
}

std::optional<MethodKind> parse_method_kind(std::string_view name) {
  for (auto k : {MethodKind::kNone, MethodKind::kBonferroni, MethodKind::kMaxT,
                 MethodKind::kPairsBootstrap, MethodKind::kWildBootstrap})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::optional<WildWeights> parse_wild_weights(std::string_view name) {
  for (auto w : {WildWeights::kRademacher, WildWeights::kMammen})
    if (to_string(w) == name) return w;
  return std::nullopt;
}

std::optional<Calibration> parse_calibration(std::string_view name) {
  for (auto c : {Calibration::kLeastFavorable, Calibration::kMaxMin,
                 Calibration::kEquicoordinate2m})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

void MethodSpec::validate() const {
  if (b_boot < 100) throw std::invalid_argument("b_boot must be at least 100");
  if (mc_draws < 10000) throw std::invalid_argument("mc_draws must be at least 10000");
}

std::size_t ProcedureResult::rejections() const {
  return static_cast<std::size_t>(std::count(reject.begin(), reject.end(), true));
}

// -- helpers ---------------------------------------------------------------------

numerics::CorrelationMatrix interleave_pairs(const numerics::CorrelationMatrix& blocked) {
  const std::size_t m = blocked.dim() / 2;
  std::vector<std::size_t> coords(2 * m);
  for (std::size_t j = 0; j < m; ++j) {
    coords[2 * j] = j;
    coords[2 * j + 1] = m + j;
  }
  return blocked.select(coords);
}

std::vector<std::size_t> binding_coordinates(const AccuracySummary& summary) {
  const std::size_t m = summary.m();
  std::vector<std::size_t> coords(m);
  for (std::size_t j = 0; j < m; ++j) coords[j] = summary.z_sp[j] < summary.z_se[j] ? m + j : j;
  return coords;
}

// -- parametric procedures -----------------------------------------------------

ProcedureResult decide_none(const AccuracySummary& summary, const HypothesisSpec& hyp) {
  ProcedureResult r = threshold_decisions(summary, std_normal_quantile(1.0 - hyp.alpha),
                                          std_normal_quantile(1.0 - hyp.alpha / 2.0),
                                          plain_method(MethodKind::kNone));
  for (std::size_t j = 0; j < summary.m(); ++j)
    r.p_adj[j] = std_normal_cdf(-summary.min_z(j));
  return r;
}

ProcedureResult decide_bonferroni(const AccuracySummary& summary, const HypothesisSpec& hyp) {
  const auto m = static_cast<double>(summary.m());
  ProcedureResult r = threshold_decisions(summary, std_normal_quantile(1.0 - hyp.alpha / m),
                                          std_normal_quantile(1.0 - hyp.alpha / (2.0 * m)),
                                          plain_method(MethodKind::kBonferroni));
  for (std::size_t j = 0; j < summary.m(); ++j)
    r.p_adj[j] = std::min(1.0, m * std_normal_cdf(-summary.min_z(j)));
  return r;
}

ProcedureResult decide_maxt(const AccuracySummary& summary, const HypothesisSpec& hyp,
                            const MethodSpec& method) {
  method.validate();
  const std::size_t m = summary.m();
  // Draws live in interleaved (Se_j, Sp_j) coordinates.
  const auto r_pairs = interleave_pairs(summary.r_hat);
  const auto factor = numerics::regularize_and_factor(r_pairs);
  numerics::MvnSampler sampler(factor, method.seed);

  std::vector<std::size_t> binding = binding_coordinates(summary);
  for (std::size_t j = 0; j < m; ++j) binding[j] = binding[j] < m ? 2 * j : 2 * j + 1;

  std::vector<double> comparison(method.mc_draws);
  std::vector<double> all(method.mc_draws);
  std::vector<double> x(2 * m);
  for (std::size_t t = 0; t < method.mc_draws; ++t) {
    sampler.draw(x);
    double best_all = -INFINITY;
    double best_comp = -INFINITY;
    for (std::size_t j = 0; j < m; ++j) {
      best_all = std::max({best_all, x[2 * j], x[2 * j + 1]});
      if (method.calibration == Calibration::kLeastFavorable)
        best_comp = std::max(best_comp, x[binding[j]]);
      else if (method.calibration == Calibration::kMaxMin)
        best_comp = std::max(best_comp, std::min(x[2 * j], x[2 * j + 1]));
    }
    all[t] = best_all;
    comparison[t] = method.calibration == Calibration::kEquicoordinate2m ? best_all : best_comp;
  }
  const double level = 1.0 - hyp.alpha;
  auto quantile = [&](std::vector<double>& v) {
    const auto k = numerics::type1_index(v.size(), level);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
  };
  MethodSpec used = method;
  used.kind = MethodKind::kMaxT;
  const double c_all = quantile(all);
  ProcedureResult r = threshold_decisions(summary, quantile(comparison), c_all, used);
  const auto draws = static_cast<double>(method.mc_draws);
  for (std::size_t j = 0; j < m; ++j) {
    const double z = summary.min_z(j);
    const auto exceed = std::count_if(comparison.begin(), comparison.end(), [z](double t) { return t >= z; });
    r.p_adj[j] = static_cast<double>(exceed) / draws;
  }
  return r;
}

// -- bootstrap procedures ------------------------------------------------------

ProcedureResult decide_pairs_bootstrap(const StudyData& data, const AccuracySummary& summary,
                                       const HypothesisSpec& hyp, const MethodSpec& method) {
  method.validate();
  const std::size_t m = summary.m();
  const PatternTable g1(data.q1);
  const PatternTable g0(data.q0);
  const double c = summary.pseudo_count;

  std::vector<std::size_t> mult1(g1.size());
  std::vector<std::size_t> mult0(g0.size());
  std::vector<std::size_t> count(m);
  std::vector<double> z_se(m);
  std::vector<double> z_sp(m);
  ReplicateStatistics stats(summary, method.calibration, method.b_boot);

  // Centered Wald statistic of one resampled group.
  auto centered = [&](const PatternTable& g, std::vector<std::size_t>& mult,
                      const std::vector<double>& est, std::vector<double>& z, CounterRng& rng) {
    std::fill(mult.begin(), mult.end(), 0);
    for (std::size_t i = 0; i < g.n; ++i) ++mult[g.pattern_of[rng.below(g.n)]];
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (mult[p] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) count[j] += g.at(p, j) * mult[p];
    }
    const auto n = static_cast<double>(g.n);
    for (std::size_t j = 0; j < m; ++j) {
      const double p = shrink_estimate(count[j], g.n, c);
      const double se = std::sqrt(p * (1.0 - p) / n);
      z[j] = se > 0.0 ? (p - est[j]) / se : 0.0;
    }
  };

  for (std::size_t b = 0; b < method.b_boot; ++b) {
    CounterRng rng(derive_seed(method.seed, b));
    centered(g1, mult1, summary.se_hat, z_se, rng);
    centered(g0, mult0, summary.sp_hat, z_sp, rng);
    stats.add(z_se, z_sp);
  }
  MethodSpec used = method;
  used.kind = MethodKind::kPairsBootstrap;
  return stats.finish(summary, hyp, used);
}

ProcedureResult decide_wild_bootstrap(const StudyData& data, const AccuracySummary& summary,
                                      const HypothesisSpec& hyp, const MethodSpec& method) {
  const WeightDraw draw = method.wild_weights == WildWeights::kMammen ? WeightDraw(mammen_weight)
                                                                      : WeightDraw(rademacher_weight);
  return decide_wild_bootstrap(data, summary, hyp, method, draw);
}

ProcedureResult decide_wild_bootstrap(const StudyData& data, const AccuracySummary& summary,
                                      const HypothesisSpec& hyp, const MethodSpec& method,
                                      const WeightDraw& draw_weight) {
  method.validate();
  const std::size_t m = summary.m();

  struct Group {
    PatternTable table;
    std::vector<double> mean;       // column means of the observed responses
    std::vector<double> residual;   // U x m, pattern value minus column mean
    std::vector<double> w_sum;      // per pattern, sum of weights
    std::vector<double> w_sq_sum;   // per pattern, sum of squared weights

    Group(const BinaryMatrix& q, std::size_t m)
        : table(q), mean(m), residual(table.size() * m), w_sum(table.size()), w_sq_sum(table.size()) {
      for (std::size_t j = 0; j < m; ++j)
        mean[j] = static_cast<double>(q.column_sum(j)) / static_cast<double>(q.rows());
      for (std::size_t p = 0; p < table.size(); ++p)
        for (std::size_t j = 0; j < m; ++j) residual[p * m + j] = table.at(p, j) - mean[j];
    }
  };
  Group g1(data.q1, m);
  Group g0(data.q0, m);

  std::vector<double> z_se(m);
  std::vector<double> z_sp(m);
  ReplicateStatistics stats(summary, method.calibration, method.b_boot);

  auto perturbed = [&](Group& g, std::vector<double>& z, CounterRng& rng) {
    std::fill(g.w_sum.begin(), g.w_sum.end(), 0.0);
    std::fill(g.w_sq_sum.begin(), g.w_sq_sum.end(), 0.0);
    for (std::size_t i = 0; i < g.table.n; ++i) {
      const double w = draw_weight(rng);
      const std::uint32_t p = g.table.pattern_of[i];
      g.w_sum[p] += w;
      g.w_sq_sum[p] += w * w;
    }
    const auto n = static_cast<double>(g.table.n);
    for (std::size_t j = 0; j < m; ++j) {
      double shift = 0.0;
      double sq = 0.0;
      for (std::size_t p = 0; p < g.table.size(); ++p) {
        const double d = g.residual[p * m + j];
        shift += g.w_sum[p] * d;
        sq += g.w_sq_sum[p] * d * d;
      }
      shift /= n;
      // sample variance of the pseudo-responses q̄ + w_i (q_ij - q̄)
      const double var = g.table.n > 1 ? (sq - n * shift * shift) / (n - 1.0) : 0.0;
      const double se = var > 0.0 ? std::sqrt(var / n) : 0.0;
      z[j] = se > 0.0 ? shift / se : 0.0;
    }
  };

  for (std::size_t b = 0; b < method.b_boot; ++b) {
    CounterRng rng(derive_seed(method.seed, b));
    perturbed(g1, z_se, rng);
    perturbed(g0, z_sp, rng);
    stats.add(z_se, z_sp);
  }
  MethodSpec used = method;
  used.kind = MethodKind::kWildBootstrap;
  return stats.finish(summary, hyp, used);
}

ProcedureResult decide(const StudyData& data, const AccuracySummary& summary,
                       const HypothesisSpec& hyp, const MethodSpec& method) {
  switch (method.kind) {
    case MethodKind::kNone: {
      ProcedureResult r = decide_none(summary, hyp);
      r.method = method;
      return r;
    }
    case MethodKind::kBonferroni: {
      ProcedureResult r = decide_bonferroni(summary, hyp);
      r.method = method;
      return r;
    }
    case MethodKind::kMaxT: return decide_maxt(summary, hyp, method);
    case MethodKind::kPairsBootstrap: return decide_pairs_bootstrap(data, summary, hyp, method);
    case MethodKind::kWildBootstrap: return decide_wild_bootstrap(data, summary, hyp, method);
  }
  throw std::invalid_argument("unknown method kind");
}

}  // namespace dxmcp
