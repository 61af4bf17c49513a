#pragma once

// Scenario files. A scenario is one JSON object:
//
//   {
//     "name": "bounce",
//     "data": {"preset": "constant", "displacement": 1, "velocity": -1},
//     "obstacle": "single",              // or "double"
//     "restitution": 1.0,
//     "domain": {"window": [-2, 2]},     // or {"period": 6.28..., "origin": 0}
//     "engine": "both",                  // "exact" | "lattice" | "both"
//     "dx": 1e-3, "T": 3.0, "N": 1024,
//     "snapshots": [1.0, 2.0],
//     "record_every": 1,
//     "output": "out/bounce", "format": "csv"
//   }
//
// "data" is a preset (constant, linear-ramp, hat, sine-velocity) or
// {"preset": "custom-pl", "u0": PL, "u1": PC} (the default preset), with an
// optional "expanded_from" label, and
//
//   PL: {"points": [[x, y], ...], "left_slope": 0, "right_slope": 0}
//       {"points": [...], "periodic": true}   (points span one period)
//       {"constant": c}
//   PC: {"breakpoints": [...], "values": [...], "left": 0, "right": 0}
//       {"breakpoints": [...], "values": [...], "periodic": true}
//       {"constant": c}

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/freewave.hpp"
#include "obstacle/lattice.hpp"

namespace obstacle {

enum class Engine { exact, lattice, both };
enum class OutputFormat { csv, json };

struct ScenarioConfig {
  std::string name = "scenario";
  InitialData data = presets::constant(1.0, 0.0);
  double restitution = 1.0;
  LatticeDomain domain = WindowDomain{};
  Engine engine = Engine::both;
  double dx = 1e-3;
  double T = 1.0;
  std::vector<double> snapshots;
  int N = 1024;  // exact-engine samples per snapshot, sine cells
  std::size_t record_every = 1;
  std::optional<double> cross_tolerance;  // default 5 dx
  std::string output_dir;
  OutputFormat format = OutputFormat::csv;
  nlohmann::json source;  // the parsed document, for hashing
};

/// Every violation found, one per line.
class ConfigError : public InputError {
 public:
  explicit ConfigError(const std::vector<std::string>& violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

ScenarioConfig parse_config(const nlohmann::json& doc);
/// Throws InputError when the file is missing or not JSON, ConfigError when
/// it does not describe a valid scenario.
ScenarioConfig load_config(const std::string& path);

nlohmann::json to_json(const PiecewiseLinear& f);
nlohmann::json to_json(const PiecewiseConstant& h);
/// Presets expanded to explicit PL/PC lists (custom-pl). parse_config of
/// to_json(cfg) reproduces cfg up to the output directory.
nlohmann::json to_json(const InitialData& data);
nlohmann::json to_json(const ScenarioConfig& cfg);

const char* to_string(Engine engine);

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

}  // namespace obstacle
