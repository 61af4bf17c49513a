#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "obstacle/config.hpp"
#include "obstacle/lattice.hpp"
#include "obstacle/report.hpp"
#include "obstacle/schatzman.hpp"

namespace obstacle {

/// Bound C on the relative lattice energy drift C dx for h = 1. Measured up
/// to 4.9 on random periodic data over dx from P/500 to P/4000.
inline constexpr double kLatticeEnergyDrift = 8.0;

/// Sup-node discrepancies below this are roundoff.
inline constexpr double kRoundoffDiscrepancy = 1e-9;

/// Runs the engines selected by cfg.engine. With both engines the report
/// carries the sup-node discrepancy at every lattice snapshot. Writes outputs
/// when cfg.output_dir is set. EngineError is rethrown with the scenario name.
RunReport run_scenario(const ScenarioConfig& cfg);

struct CounterexampleOptions {
  int periods = 10;
  double dx = 2.0 * std::numbers::pi / 8192.0;
  int N = 4096;  // cells of the sine velocity and x samples per period
  std::string output_dir;
};

/// Sine velocity scenario, u0 = 1/2, u1 = sin x, at t_k = 2k pi + 7pi/6.
RunReport run_counterexample(const CounterexampleOptions& options);

struct CompareOptions {
  std::vector<double> dx_list;
  int offsets = 1;  // grid offsets averaged per dx
  std::string output_dir;
};

/// Lattice against the exact engine at time cfg.T for every dx.
RunReport compare(const ScenarioConfig& cfg, const CompareOptions& options);

// Building blocks shared with the verification suites.

/// w_t by a central difference of half width `span`. For cell-averaged
/// velocity data with span equal to the cell width, the interpolation error
/// of the free wave cancels and the result is second order in the cell width.
double central_w_t(const RiemannPair& pair, double x, double t, double span);

/// max over x of u - w at time t, sampled at n points of [lo, hi).
double max_excess(const SolutionField& field, double t, double lo, double hi, int n);

/// max over x of u - w - 2 sup_{backward cone}(w)^-, sampled likewise.
double falsification_margin(const SolutionField& field, double t, double lo, double hi, int n);

/// Least-squares slope and intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Sup of |lattice - eval_u| over valid nodes with x in [lo, hi].
double lattice_discrepancy(const LatticeState& state, const SolutionField& field,
                           double lo = -1e300, double hi = 1e300);

}  // namespace obstacle
