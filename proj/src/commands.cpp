#include "dxmcp/commands.hpp"

#include <fstream>
#include <sstream>

#include "dxmcp/sim_config.hpp"
#include "dxmcp/simharness.hpp"
#include "dxmcp/study_csv.hpp"

namespace dxmcp {

using nlohmann::json;

namespace {

// Runs `body`, mapping exceptions onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: invalid configuration\n";
    for (const auto& p : e.problems()) err << "  " << p << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const numerics::SingularMatrixError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const numerics::DomainError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SimulationError& e) {
    err << "simulation failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  return out;
}

}  // namespace

// -- analyze ---------------------------------------------------------------

AnalysisResult analyze_study(const StudyData& data, const AnalysisConfig& config) {
  config.hyp.validate();
  config.method.validate();
  AnalysisResult r;
  r.summary = summarize(data, config.hyp, config.pseudo_count);
  r.procedure = decide(data, r.summary, config.hyp, config.method);
  for (RegionKind kind : config.regions)
    r.regions.push_back(build_regions(r.summary, r.procedure, config.hyp, kind));
  return r;
}

json analysis_json(const StudyData& data, const AnalysisConfig& config, const AnalysisResult& result) {
  const auto& s = result.summary;
  const auto& p = result.procedure;
  json tests = json::array();
  for (std::size_t j = 0; j < s.m(); ++j) {
    json t = {{"name", data.test_names[j]},
              {"se_hat", s.se_hat[j]},
              {"sp_hat", s.sp_hat[j]},
              {"se_se", s.se_se[j]},
              {"sp_se", s.sp_se[j]},
              {"z_se", s.z_se[j]},
              {"z_sp", s.z_sp[j]},
              {"p_adj", p.p_adj[j]},
              {"reject", static_cast<bool>(p.reject[j])}};
    for (const auto& region : result.regions) {
      t[std::string(to_string(region.kind))] = {{"lower_se", region.lower_se[j]},
                                                 {"lower_sp", region.lower_sp[j]},
                                                 {"contained", region_contained(region, j)}};
    }
    tests.push_back(std::move(t));
  }
  return {{"hypothesis", {{"se0", config.hyp.se0}, {"sp0", config.hyp.sp0}, {"alpha", config.hyp.alpha}}},
          {"method", to_json(p.method)},
          {"pseudo_count", config.pseudo_count},
          {"n1", data.n1()},
          {"n0", data.n0()},
          {"m", data.m()},
          {"c_comparison", p.c_comparison},
          {"c_confidence", p.c_confidence},
          {"rejections", p.rejections()},
          {"tests", tests}};
}

int cmd_analyze(const AnalysisConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto in = open_input(config.data_path);
    const auto table = read_labeled_csv(in);
    const auto study = validate_study(to_raw_study(table));
    const auto result = analyze_study(study.data, config);
    const json doc = analysis_json(study.data, config, result);

    if (config.output_json.empty()) {
      out << doc.dump(2) << '\n';
    } else {
      auto file = open_output(config.output_json);
      file << doc.dump(2) << '\n';
    }
    if (!config.plot_prefix.empty()) {
      for (const auto& region : result.regions) {
        auto file = open_output(config.plot_prefix + "_" + std::string(to_string(region.kind)) + ".csv");
        write_region_csv(file, export_region_plot_data(region, result.summary, study.data.test_names,
                                                       method_label(config.method)));
      }
    }
    err << "rejections: " << result.procedure.rejections() << " of " << study.data.m() << '\n';
    return kExitOk;
  });
}

// -- ingest ------------------------------------------------------------------

std::optional<wdbc::FeatureThresholds> parse_feature_selection(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) return std::nullopt;
  wdbc::FeatureThresholds sel;
  sel.feature = text.substr(0, eq);
  std::istringstream list(text.substr(eq + 1));
  std::string item;
  while (std::getline(list, item, ',')) {
    std::size_t used = 0;
    try {
      sel.thresholds.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (used != item.size()) return std::nullopt;
  }
  if (sel.thresholds.empty()) return std::nullopt;
  return sel;
}

int cmd_ingest_wdbc(const IngestConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto in = open_input(config.input_path);
    const auto records = wdbc::read_records(in);
    const auto table = wdbc::ingest(records, config.spec);
    if (config.output_path.empty()) {
      write_labeled_csv(out, table);
    } else {
      auto file = open_output(config.output_path);
      write_labeled_csv(file, table);
    }
    std::size_t cases = 0;
    for (int l : table.label) cases += l;
    err << "ingested " << table.label.size() << " rows (" << cases << " cases, "
        << table.label.size() - cases << " controls), " << table.test_names.size() << " tests\n";
    return kExitOk;
  });
}

// -- simulate ------------------------------------------------------------------

int cmd_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto in = open_input(config.config_path);
    const json doc = json::parse(in);
    const auto specs = parse_grid_config(doc, config.seed);

    const std::string effective = config.effective_config.empty() && !config.output_csv.empty()
                                      ? config.output_csv + ".config.json"
                                      : config.effective_config;
    if (effective.empty()) {
      err << effective_config(specs).dump(2) << '\n';
    } else {
      auto file = open_output(effective);
      file << effective_config(specs).dump(2) << '\n';
    }

    // Rows are appended as scenarios finish, so an interrupted grid keeps
    // everything completed so far.
    std::ofstream file;
    if (!config.output_csv.empty()) file = open_output(config.output_csv);
    std::ostream& csv = config.output_csv.empty() ? out : file;
    write_results_header(csv);
    csv.flush();

    bool failed = false;
    run_grid(specs, config.jobs, [&](std::size_t index, const GridOutcome& outcome) {
      if (outcome.summary) {
        write_results_rows(csv, *outcome.summary);
        csv.flush();
        if (config.progress) {
          err << "[" << index + 1 << "/" << specs.size() << "] " << outcome.label << ": "
              << outcome.summary->n_sim << " repetitions in " << outcome.summary->runtime_seconds
              << " s\n";
        }
      } else {
        failed = true;
        err << "[" << index + 1 << "/" << specs.size() << "] " << outcome.label
            << " failed: " << outcome.error << '\n';
      }
    });
    return failed ? kExitNumerical : kExitOk;
  });
}

}  // namespace dxmcp
