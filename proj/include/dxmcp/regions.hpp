#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dxmcp/estimation.hpp"
#include "dxmcp/model.hpp"
#include "dxmcp/procedures.hpp"

namespace dxmcp {

enum class RegionKind { kComparison, kConfidence };

std::string_view to_string(RegionKind kind);

/// One-sided rectangles (lower_se, 1] x (lower_sp, 1] per test.
struct RegionSet {
  RegionKind kind = RegionKind::kComparison;
  double critical_value = 0.0;
  std::vector<double> lower_se, lower_sp;  // clamped to [0, 1] for display
  std::vector<double> min_z;               // decision statistic per test
  std::vector<bool> reject;
  HypothesisSpec hyp;

  std::size_t m() const noexcept { return lower_se.size(); }
};

/// Lower bounds estimate - c * SE with c the comparison or confidence
/// critical value of `result`. Comparison decisions are copied from the
/// result; confidence decisions are recomputed by containment.
RegionSet build_regions(const AccuracySummary& summary, const ProcedureResult& result,
                        const HypothesisSpec& hyp, RegionKind kind);

/// Whether region j lies inside the open region of interest
/// {Se > se0, Sp > sp0}. Evaluated on the z-scale (min z > c) so that
/// rounding of the reported bounds can never flip a decision.
bool region_contained(const RegionSet& regions, std::size_t j);

/// Bounds-only check for externally reported regions.
bool region_contained(double lower_se, double lower_sp, const HypothesisSpec& hyp);

struct RegionPlotRow {
  std::string test;
  double se_hat, sp_hat, lower_se, lower_sp;
  bool reject;
};

struct RegionPlotData {
  HypothesisSpec hyp;
  std::string method;
  RegionKind kind = RegionKind::kComparison;
  std::vector<RegionPlotRow> rows;
};

RegionPlotData export_region_plot_data(const RegionSet& regions, const AccuracySummary& summary,
                                       const std::vector<std::string>& test_names,
                                       std::string_view method);

/// `# se0=..., sp0=..., alpha=..., method=..., kind=...` then
/// `test,se_hat,sp_hat,lower_se,lower_sp,reject` and one row per test.
void write_region_csv(std::ostream& out, const RegionPlotData& plot);

}  // namespace dxmcp
