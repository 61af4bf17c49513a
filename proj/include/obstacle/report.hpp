#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace obstacle {

inline constexpr const char* kToolVersion = "obstacle1d 0.1.0";

enum class CheckStatus { pass, fail, skipped };

const char* to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double worst = 0.0;      // measured value of the checked quantity
  double tolerance = 0.0;  // bound it was compared against
  std::string detail;
  bool timing = false;  // worst is a wall time, left out of to_json(false)
};

/// pass when worst <= tolerance (NaN fails).
CheckResult at_most(std::string name, double worst, double tolerance, std::string detail = {});
/// pass when value >= bound.
CheckResult at_least(std::string name, double value, double bound, std::string detail = {});
/// pass when lo <= value <= hi; `tolerance` records hi.
CheckResult within(std::string name, double value, double lo, double hi, std::string detail = {});
CheckResult skipped(std::string name, std::string reason);
/// at_most on a wall time in seconds.
CheckResult runtime(std::string name, double seconds, double budget, std::string detail = {});

class RunReport {
 public:
  RunReport(std::string kind, std::string name);

  /// Throws std::logic_error when a check of the same name was already added.
  void add(CheckResult check);
  const std::vector<CheckResult>& checks() const { return checks_; }
  const CheckResult* find(const std::string& name) const;

  /// No failed check.
  bool passed() const;

  nlohmann::json& metrics() { return metrics_; }
  const nlohmann::json& metrics() const { return metrics_; }

  std::string kind;
  std::string name;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  double seconds = 0.0;  // wall time, excluded from to_json(false)

  nlohmann::json to_json(bool with_timing = true) const;

 private:
  std::vector<CheckResult> checks_;
  nlohmann::json metrics_ = nlohmann::json::object();
};

/// 0 when every check passed or was skipped, 1 otherwise.
int exit_code(const RunReport& report);

}  // namespace obstacle
