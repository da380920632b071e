#pragma once

// Single-step multiple comparison procedures for m index tests with
// co-primary endpoints. Test j is rejected iff min(z_se[j], z_sp[j]) exceeds
// the procedure's comparison critical value; the confidence critical value
// covers all 2m parameters simultaneously and is never smaller.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dxmcp/estimation.hpp"
#include "dxmcp/model.hpp"
#include "dxmcp/rng.hpp"

namespace dxmcp {

inline constexpr std::uint64_t kDefaultSeed = 20231026;

enum class MethodKind { kNone, kBonferroni, kMaxT, kPairsBootstrap, kWildBootstrap };

enum class WildWeights { kRademacher, kMammen };

// Which null distribution calibrates the comparison critical value of maxT
// and the bootstrap procedures.
//   kLeastFavorable: for each test only the endpoint with the smaller observed
//     Wald statistic enters the maximum; the other endpoint is treated as far
//     from its boundary, which is the least-favorable configuration.
//   kMaxMin: max_j min(Se_j, Sp_j) with both endpoints centered at zero.
//   kEquicoordinate2m: the 2m-dimensional quantile, i.e. decisions use the
//     confidence critical value.
enum class Calibration { kLeastFavorable, kMaxMin, kEquicoordinate2m };

struct MethodSpec {
  MethodKind kind = MethodKind::kNone;
  std::size_t b_boot = 2000;
  std::size_t mc_draws = 100000;
  // mammen: matches the skew of the binomial statistic; rademacher is anti-conservative near 0.8
  WildWeights wild_weights = WildWeights::kMammen;
  Calibration calibration = Calibration::kLeastFavorable;
  std::uint64_t seed = kDefaultSeed;

  /// Throws std::invalid_argument for b_boot < 100 or mc_draws < 10^4.
  void validate() const;
};

struct ProcedureResult {
  double c_comparison = 0.0;
  double c_confidence = 0.0;
  std::vector<bool> reject;
  std::vector<double> p_adj;
  MethodSpec method;

  std::size_t rejections() const;
};

std::string_view to_string(MethodKind kind);
std::string_view to_string(WildWeights weights);
std::string_view to_string(Calibration calibration);
/// Kind name, plus non-default options in brackets, e.g. "maxt[max_min]".
std::string method_label(const MethodSpec& method);
std::optional<MethodKind> parse_method_kind(std::string_view name);
std::optional<WildWeights> parse_wild_weights(std::string_view name);
std::optional<Calibration> parse_calibration(std::string_view name);

ProcedureResult decide_none(const AccuracySummary& summary, const HypothesisSpec& hyp);

ProcedureResult decide_bonferroni(const AccuracySummary& summary, const HypothesisSpec& hyp);

ProcedureResult decide_maxt(const AccuracySummary& summary, const HypothesisSpec& hyp,
                            const MethodSpec& method);

ProcedureResult decide_pairs_bootstrap(const StudyData& data, const AccuracySummary& summary,
                                       const HypothesisSpec& hyp, const MethodSpec& method);

ProcedureResult decide_wild_bootstrap(const StudyData& data, const AccuracySummary& summary,
                                      const HypothesisSpec& hyp, const MethodSpec& method);

/// Wild bootstrap with a caller-supplied weight draw (one call per subject
/// and replicate, in canonical subject order).
using WeightDraw = std::function<double(CounterRng&)>;
ProcedureResult decide_wild_bootstrap(const StudyData& data, const AccuracySummary& summary,
                                      const HypothesisSpec& hyp, const MethodSpec& method,
                                      const WeightDraw& draw_weight);

/// Dispatch on method.kind.
ProcedureResult decide(const StudyData& data, const AccuracySummary& summary,
                       const HypothesisSpec& hyp, const MethodSpec& method);

/// Reorders a (Se block, Sp block) correlation matrix into interleaved
/// (Se_1, Sp_1, Se_2, Sp_2, ...) coordinates.
numerics::CorrelationMatrix interleave_pairs(const numerics::CorrelationMatrix& blocked);

/// For each test, the coordinate (in Se-block/Sp-block layout) of the endpoint
/// with the smaller Wald statistic; ties go to sensitivity.
std::vector<std::size_t> binding_coordinates(const AccuracySummary& summary);

}  // namespace dxmcp
