#pragma once

// Property suites run as a batch. Every suite draws its random scenarios
// from one seed, so a (suite, seed) pair reproduces bit-identical checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obstacle/report.hpp"

namespace obstacle {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct VerifyOptions {
  std::string suite = "all";
  std::uint64_t seed = kDefaultSeed;
  /// Energy suite only: run the lattice with this h alone. Conservation is
  /// skipped for h < 1, monotonicity for h = 1.
  std::optional<double> restitution;
};

struct SuiteInfo {
  const char* name;
  const char* summary;
};

/// In execution order.
const std::vector<SuiteInfo>& verify_suites();

/// Checks are named "<suite>.<check>". "oracle" is an alias of convergence. Throws InputError for an unknown
/// suite or a restitution outside [0, 1].
RunReport verify(const VerifyOptions& options);

}  // namespace obstacle
