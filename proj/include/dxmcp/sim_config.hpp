#pragma once

// JSON grid configuration for simulation runs.
//
// {
//   "scenarios": [
//     {
//       "label": "lfc_n400",
//       "generator": {"type": "lfc", "m": 10, "se0": 0.8, "sp0": 0.8,
//                     "rho_se": 0.5, "rho_sp": 0.5, "n1": 100, "n0": 300},
//       "hypothesis": {"se0": 0.8, "sp0": 0.8, "alpha": 0.025},
//       "methods": ["none", {"kind": "pairs_boot", "b_boot": 2000}],
//       "n_sim": 1000,
//       "base_seed": 1
//     }
//   ]
// }
//
// Omitted lfc fields take the defaults m=10, se0=sp0=0.8, rho=0, n1=100, n0=300.
// Biomarker generators use {"type": "biomarker", "auc": [...], "rho0": ..,
// "rho1": .., "tests": [{"marker": 0, "cutpoint": 0.5}, ...], "n1": .., "n0": ..}.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dxmcp/simharness.hpp"

namespace dxmcp {

/// Schema violations; each problem starts with a JSON pointer.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// `default_seed` fills base_seed where a scenario omits it.
std::vector<ScenarioSpec> parse_grid_config(const nlohmann::json& config,
                                            std::uint64_t default_seed = kDefaultSeed);

/// The configuration with every default spelled out.
nlohmann::json effective_config(const std::vector<ScenarioSpec>& specs);

nlohmann::json to_json(const MethodSpec& method);

}  // namespace dxmcp
