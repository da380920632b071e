#include "dxmcp/regions.hpp"

#include <algorithm>
#include <iomanip>
#include <stdexcept>

namespace dxmcp {

std::string_view to_string(RegionKind kind) {
  return kind == RegionKind::kComparison ? "comparison" : "confidence";
}

RegionSet build_regions(const AccuracySummary& summary, const ProcedureResult& result,
                        const HypothesisSpec& hyp, RegionKind kind) {
  const std::size_t m = summary.m();
  if (result.reject.size() != m) throw std::invalid_argument("summary and result disagree on m");
  RegionSet r;
  r.kind = kind;
  r.hyp = hyp;
  r.critical_value = kind == RegionKind::kComparison ? result.c_comparison : result.c_confidence;
  r.lower_se.resize(m);
  r.lower_sp.resize(m);
  r.min_z.resize(m);
  r.reject.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    r.lower_se[j] = std::clamp(summary.se_hat[j] - r.critical_value * summary.se_se[j], 0.0, 1.0);
    r.lower_sp[j] = std::clamp(summary.sp_hat[j] - r.critical_value * summary.sp_se[j], 0.0, 1.0);
    r.min_z[j] = summary.min_z(j);
    r.reject[j] = kind == RegionKind::kComparison ? static_cast<bool>(result.reject[j])
                                                  : r.min_z[j] > r.critical_value;
  }
  return r;
}

bool region_contained(const RegionSet& regions, std::size_t j) {
  return regions.min_z.at(j) > regions.critical_value;
}

bool region_contained(double lower_se, double lower_sp, const HypothesisSpec& hyp) {
  return lower_se > hyp.se0 && lower_sp > hyp.sp0;
}

RegionPlotData export_region_plot_data(const RegionSet& regions, const AccuracySummary& summary,
                                       const std::vector<std::string>& test_names,
                                       std::string_view method) {
  RegionPlotData plot;
  plot.hyp = regions.hyp;
  plot.method = std::string(method);
  plot.kind = regions.kind;
  for (std::size_t j = 0; j < regions.m(); ++j) {
    plot.rows.push_back({j < test_names.size() ? test_names[j] : "test_" + std::to_string(j + 1),
                         summary.se_hat[j], summary.sp_hat[j], regions.lower_se[j],
                         regions.lower_sp[j], regions.reject[j]});
  }
  return plot;
}

void write_region_csv(std::ostream& out, const RegionPlotData& plot) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(10);
  out << "# se0=" << plot.hyp.se0 << ", sp0=" << plot.hyp.sp0 << ", alpha=" << plot.hyp.alpha
      << ", method=" << plot.method << ", kind=" << to_string(plot.kind) << '\n';
  out << "test,se_hat,sp_hat,lower_se,lower_sp,reject\n";
  for (const auto& row : plot.rows) {
    out << row.test << ',' << row.se_hat << ',' << row.sp_hat << ',' << row.lower_se << ','
        << row.lower_sp << ',' << (row.reject ? 1 : 0) << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace dxmcp
