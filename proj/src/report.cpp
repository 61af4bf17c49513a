#include "obstacle/report.hpp"

#include <cmath>
#include <stdexcept>

namespace obstacle {
namespace {

using nlohmann::json;

// JSON has no NaN or infinity.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "?";
}

CheckResult at_most(std::string name, double worst, double tolerance, std::string detail) {
  return {std::move(name), worst <= tolerance ? CheckStatus::pass : CheckStatus::fail, worst,
          tolerance, std::move(detail)};
}

CheckResult at_least(std::string name, double value, double bound, std::string detail) {
  return {std::move(name), value >= bound ? CheckStatus::pass : CheckStatus::fail, value, bound,
          std::move(detail)};
}

CheckResult within(std::string name, double value, double lo, double hi, std::string detail) {
  return {std::move(name), value >= lo && value <= hi ? CheckStatus::pass : CheckStatus::fail, value,
          hi, std::move(detail)};
}

CheckResult skipped(std::string name, std::string reason) {
  return {std::move(name), CheckStatus::skipped, 0.0, 0.0, std::move(reason)};
}

CheckResult runtime(std::string name, double seconds, double budget, std::string detail) {
  CheckResult c = at_most(std::move(name), seconds, budget, std::move(detail));
  c.timing = true;
  return c;
}

RunReport::RunReport(std::string kind_, std::string name_)
    : kind(std::move(kind_)), name(std::move(name_)) {}

void RunReport::add(CheckResult check) {
  if (find(check.name)) throw std::logic_error("duplicate check " + check.name);
  checks_.push_back(std::move(check));
}

const CheckResult* RunReport::find(const std::string& check) const {
  for (const auto& c : checks_) {
    if (c.name == check) return &c;
  }
  return nullptr;
}

bool RunReport::passed() const {
  for (const auto& c : checks_) {
    if (c.status == CheckStatus::fail) return false;
  }
  return true;
}

json RunReport::to_json(bool with_timing) const {
  json checks = json::array();
  for (const auto& c : checks_) {
    json j = {{"name", c.name}, {"status", obstacle::to_string(c.status)}};
    if (c.status != CheckStatus::skipped) {
      if (with_timing || !c.timing) j["worst"] = num(c.worst);
      j["tolerance"] = num(c.tolerance);
    }
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(std::move(j));
  }
  json out = {{"kind", kind},
              {"name", name},
              {"passed", passed()},
              {"checks", checks},
              {"metrics", metrics_},
              {"provenance", {{"version", kToolVersion}}}};
  if (!config_hash.empty()) out["provenance"]["config_hash"] = config_hash;
  if (seed) out["provenance"]["seed"] = *seed;
  if (with_timing) out["seconds"] = seconds;
  return out;
}

int exit_code(const RunReport& report) { return report.passed() ? 0 : 1; }

}  // namespace obstacle
