#include "dxmcp/sim_config.hpp"

#include <set>

namespace dxmcp {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

// Typed field access that records problems instead of throwing, so a single
// run reports every violation.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void fail(const std::string& path, const std::string& what) {
    problems_.push_back((path.empty() ? "/" : path) + ": " + what);
  }

  bool object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items())
      if (!allowed.contains(key)) fail(path + "/" + key, "unknown field");
    return true;
  }

  template <typename T>
  T number(const json& j, const std::string& key, const std::string& path, T fallback,
           bool required = false) {
    const std::string p = path + "/" + key;
    if (!j.contains(key)) {
      if (required) fail(p, "required field is missing");
      return fallback;
    }
    const json& v = j.at(key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
        fail(p, "expected a non-negative integer");
        return fallback;
      }
    } else {
      if (!v.is_number()) {
        fail(p, "expected a number");
        return fallback;
      }
    }
    return v.get<T>();
  }

  std::string string(const json& j, const std::string& key, const std::string& path,
                     bool required = false) {
    const std::string p = path + "/" + key;
    if (!j.contains(key)) {
      if (required) fail(p, "required field is missing");
      return {};
    }
    if (!j.at(key).is_string()) {
      fail(p, "expected a string");
      return {};
    }
    return j.at(key).get<std::string>();
  }

 private:
  std::vector<std::string>& problems_;
};

void check_probability(Reader& rd, double v, const std::string& path) {
  if (!(v > 0.0 && v < 1.0)) rd.fail(path, "must lie in (0, 1)");
}

MethodSpec parse_method(Reader& rd, const json& j, const std::string& path) {
  MethodSpec spec;
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (rd.object(j, path, {"kind", "b_boot", "mc_draws", "wild_weights", "calibration", "seed"})) {
    kind = rd.string(j, "kind", path, true);
    spec.b_boot = rd.number<std::size_t>(j, "b_boot", path, spec.b_boot);
    spec.mc_draws = rd.number<std::size_t>(j, "mc_draws", path, spec.mc_draws);
    spec.seed = rd.number<std::uint64_t>(j, "seed", path, spec.seed);
    if (j.contains("wild_weights")) {
      const auto w = parse_wild_weights(rd.string(j, "wild_weights", path));
      if (w) spec.wild_weights = *w;
      else rd.fail(path + "/wild_weights", "expected 'rademacher' or 'mammen'");
    }
    if (j.contains("calibration")) {
      const auto c = parse_calibration(rd.string(j, "calibration", path));
      if (c) spec.calibration = *c;
      else rd.fail(path + "/calibration", "expected 'lfc', 'max_min' or 'equicoordinate_2m'");
    }
  } else {
    return spec;
  }
  const std::string kind_path = j.is_string() ? path : path + "/kind";
  if (const auto k = parse_method_kind(kind)) {
    spec.kind = *k;
  } else if (!kind.empty() || j.is_string()) {
    rd.fail(kind_path, "unknown method '" + kind +
                           "' (expected none, bonferroni, maxt, pairs_boot, wild_boot)");
  }
  if (spec.b_boot < 100) rd.fail(path + "/b_boot", "must be at least 100");
  if (spec.mc_draws < 10000) rd.fail(path + "/mc_draws", "must be at least 10000");
  return spec;
}

GeneratorSpec parse_generator(Reader& rd, const json& j, const std::string& path) {
  if (!j.is_object()) {
    rd.fail(path, "expected an object");
    return LfcScenario{};
  }
  const std::string type = rd.string(j, "type", path, true);
  if (type == "lfc") {
    LfcScenario s;
    if (!rd.object(j, path, {"type", "m", "b", "se0", "sp0", "rho_se", "rho_sp", "n1", "n0"}))
      return s;
    s.m = rd.number<std::size_t>(j, "m", path, s.m);
    s.se0 = rd.number<double>(j, "se0", path, s.se0);
    s.sp0 = rd.number<double>(j, "sp0", path, s.sp0);
    s.rho_se = rd.number<double>(j, "rho_se", path, s.rho_se);
    s.rho_sp = rd.number<double>(j, "rho_sp", path, s.rho_sp);
    s.n1 = rd.number<std::size_t>(j, "n1", path, s.n1);
    s.n0 = rd.number<std::size_t>(j, "n0", path, s.n0);
    if (j.contains("b")) {
      const json& b = j.at("b");
      if (!b.is_array() || b.size() != s.m) {
        rd.fail(path + "/b", "expected an array of m entries");
      } else {
        for (std::size_t k = 0; k < b.size(); ++k) {
          if (!b[k].is_number_integer() || (b[k].get<int>() != 0 && b[k].get<int>() != 1))
            rd.fail(path + "/b/" + std::to_string(k), "expected 0 or 1");
          else
            s.b.push_back(b[k].get<int>());
        }
      }
    }
    if (s.m == 0) rd.fail(path + "/m", "must be positive");
    check_probability(rd, s.se0, path + "/se0");
    check_probability(rd, s.sp0, path + "/sp0");
    if (!(s.rho_se >= 0.0 && s.rho_se < 1.0)) rd.fail(path + "/rho_se", "must lie in [0, 1)");
    if (!(s.rho_sp >= 0.0 && s.rho_sp < 1.0)) rd.fail(path + "/rho_sp", "must lie in [0, 1)");
    if (s.n1 == 0) rd.fail(path + "/n1", "must be positive");
    if (s.n0 == 0) rd.fail(path + "/n0", "must be positive");
    return s;
  }
  if (type == "biomarker") {
    BiomarkerScenario s;
    if (!rd.object(j, path, {"type", "auc", "rho0", "rho1", "tests", "n1", "n0"})) return s;
    s.rho0 = rd.number<double>(j, "rho0", path, s.rho0);
    s.rho1 = rd.number<double>(j, "rho1", path, s.rho1);
    s.n1 = rd.number<std::size_t>(j, "n1", path, s.n1);
    s.n0 = rd.number<std::size_t>(j, "n0", path, s.n0);
    if (!j.contains("auc") || !j.at("auc").is_array() || j.at("auc").empty()) {
      rd.fail(path + "/auc", "expected a non-empty array of AUC values");
    } else {
      const json& auc = j.at("auc");
      for (std::size_t k = 0; k < auc.size(); ++k) {
        if (!auc[k].is_number()) {
          rd.fail(path + "/auc/" + std::to_string(k), "expected a number");
          continue;
        }
        s.auc.push_back(auc[k].get<double>());
        check_probability(rd, s.auc.back(), path + "/auc/" + std::to_string(k));
      }
    }
    if (!j.contains("tests") || !j.at("tests").is_array() || j.at("tests").empty()) {
      rd.fail(path + "/tests", "expected a non-empty array of {marker, cutpoint}");
    } else {
      const json& tests = j.at("tests");
      for (std::size_t k = 0; k < tests.size(); ++k) {
        const std::string tp = path + "/tests/" + std::to_string(k);
        if (!rd.object(tests[k], tp, {"marker", "cutpoint"})) continue;
        MarkerCut cut;
        cut.marker = rd.number<std::size_t>(tests[k], "marker", tp, 0, true);
        cut.cutpoint = rd.number<double>(tests[k], "cutpoint", tp, 0.0, true);
        if (!s.auc.empty() && cut.marker >= s.auc.size()) rd.fail(tp + "/marker", "unknown marker");
        s.tests.push_back(cut);
      }
    }
    if (!(s.rho0 > -1.0 && s.rho0 < 1.0)) rd.fail(path + "/rho0", "must lie in (-1, 1)");
    if (!(s.rho1 > -1.0 && s.rho1 < 1.0)) rd.fail(path + "/rho1", "must lie in (-1, 1)");
    if (s.n1 == 0) rd.fail(path + "/n1", "must be positive");
    if (s.n0 == 0) rd.fail(path + "/n0", "must be positive");
    return s;
  }
  if (!type.empty()) rd.fail(path + "/type", "expected 'lfc' or 'biomarker'");
  return LfcScenario{};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems)), problems_(std::move(problems)) {}

std::vector<ScenarioSpec> parse_grid_config(const json& config, std::uint64_t default_seed) {
  std::vector<std::string> problems;
  Reader rd(problems);
  std::vector<ScenarioSpec> specs;
  if (rd.object(config, "", {"scenarios"})) {
    if (!config.contains("scenarios") || !config.at("scenarios").is_array()) {
      rd.fail("/scenarios", "expected an array of scenarios");
    } else {
      std::set<std::string> labels;
      const json& list = config.at("scenarios");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "/scenarios/" + std::to_string(i);
        const json& s = list[i];
        if (!rd.object(s, path, {"label", "generator", "hypothesis", "methods", "n_sim",
                                 "base_seed", "pseudo_count"}))
          continue;
        ScenarioSpec spec;
        spec.label = rd.string(s, "label", path, true);
        if (!spec.label.empty() && !labels.insert(spec.label).second)
          rd.fail(path + "/label", "duplicate label '" + spec.label + "'");
        if (s.contains("generator"))
          spec.generator = parse_generator(rd, s.at("generator"), path + "/generator");
        else
          rd.fail(path + "/generator", "required field is missing");

        if (const auto* lfc = std::get_if<LfcScenario>(&spec.generator)) {
          spec.hyp.se0 = lfc->se0;
          spec.hyp.sp0 = lfc->sp0;
        }
        if (s.contains("hypothesis")) {
          const std::string hp = path + "/hypothesis";
          const json& h = s.at("hypothesis");
          if (rd.object(h, hp, {"se0", "sp0", "alpha"})) {
            spec.hyp.se0 = rd.number<double>(h, "se0", hp, spec.hyp.se0);
            spec.hyp.sp0 = rd.number<double>(h, "sp0", hp, spec.hyp.sp0);
            spec.hyp.alpha = rd.number<double>(h, "alpha", hp, spec.hyp.alpha);
            check_probability(rd, spec.hyp.se0, hp + "/se0");
            check_probability(rd, spec.hyp.sp0, hp + "/sp0");
            if (!(spec.hyp.alpha > 0.0 && spec.hyp.alpha < 0.5))
              rd.fail(hp + "/alpha", "must lie in (0, 0.5)");
          }
        } else if (std::holds_alternative<BiomarkerScenario>(spec.generator)) {
          rd.fail(path + "/hypothesis", "required for biomarker scenarios");
        }

        if (!s.contains("methods") || !s.at("methods").is_array() || s.at("methods").empty()) {
          rd.fail(path + "/methods", "expected a non-empty array of methods");
        } else {
          const json& methods = s.at("methods");
          for (std::size_t k = 0; k < methods.size(); ++k)
            spec.methods.push_back(parse_method(rd, methods[k], path + "/methods/" + std::to_string(k)));
        }
        spec.n_sim = rd.number<std::size_t>(s, "n_sim", path, spec.n_sim);
        if (spec.n_sim == 0) rd.fail(path + "/n_sim", "must be positive");
        spec.base_seed = rd.number<std::uint64_t>(s, "base_seed", path, default_seed);
        spec.pseudo_count = rd.number<double>(s, "pseudo_count", path, spec.pseudo_count);
        if (!(spec.pseudo_count >= 0.0)) rd.fail(path + "/pseudo_count", "must be non-negative");
        specs.push_back(std::move(spec));
      }
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return specs;
}

json to_json(const MethodSpec& method) {
  return {{"kind", to_string(method.kind)},
          {"b_boot", method.b_boot},
          {"mc_draws", method.mc_draws},
          {"wild_weights", to_string(method.wild_weights)},
          {"calibration", to_string(method.calibration)},
          {"seed", method.seed}};
}

json effective_config(const std::vector<ScenarioSpec>& specs) {
  json list = json::array();
  for (const auto& s : specs) {
    json gen;
    if (const auto* lfc = std::get_if<LfcScenario>(&s.generator)) {
      gen = {{"type", "lfc"},       {"m", lfc->m},           {"b", lfc->effective_b()},
             {"se0", lfc->se0},     {"sp0", lfc->sp0},       {"rho_se", lfc->rho_se},
             {"rho_sp", lfc->rho_sp}, {"n1", lfc->n1},       {"n0", lfc->n0}};
    } else {
      const auto& bio = std::get<BiomarkerScenario>(s.generator);
      json tests = json::array();
      for (const auto& t : bio.tests) tests.push_back({{"marker", t.marker}, {"cutpoint", t.cutpoint}});
      gen = {{"type", "biomarker"}, {"auc", bio.auc}, {"rho0", bio.rho0}, {"rho1", bio.rho1},
             {"tests", tests},      {"n1", bio.n1},   {"n0", bio.n0}};
    }
    json methods = json::array();
    for (const auto& m : s.methods) methods.push_back(to_json(m));
    list.push_back({{"label", s.label},
                    {"generator", gen},
                    {"hypothesis", {{"se0", s.hyp.se0}, {"sp0", s.hyp.sp0}, {"alpha", s.hyp.alpha}}},
                    {"methods", methods},
                    {"n_sim", s.n_sim},
                    {"base_seed", s.base_seed},
                    {"pseudo_count", s.pseudo_count}});
  }
  return {{"scenarios", list}};
}

}  // namespace dxmcp
