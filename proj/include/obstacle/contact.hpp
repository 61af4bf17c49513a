#pragma once

// Contact curve t = tau(x): the lower boundary of the region I swept by the
// forward light cones of the negativity set E = closure{w < 0}.
//
// Internally the frontier is built in s1 = x + t, s2 = t - x, where
// w = f(s1) + g(-s2) is separable and affine on every cell of the knot grid.
// The characteristic coordinates are xi = s1/sqrt2, eta = s2/sqrt2.

#include <iosfwd>
#include <optional>
#include <vector>

#include "obstacle/freewave.hpp"
#include "obstacle/piecewise.hpp"

namespace obstacle {

/// Region x in [x_min, x_max], t in [0, t_max] on which an aperiodic curve is
/// exact. Aperiodic data can have an unbounded negativity set, so the exact
/// engine only resolves what can influence this box.
struct AnalysisWindow {
  double x_min = -1.0;
  double x_max = 1.0;
  double t_max = 1.0;
};

struct FrontierOptions {
  std::optional<AnalysisWindow> window;  // required for aperiodic data
  double negativity_tol = 1e-13;         // cells with min w >= -tol are grazing
  double tol_slope = 1e-9;               // activity threshold used by classify
};

struct FrontierVertex {
  double xi = 0.0;
  double eta = 0.0;
};

struct ContactSegment {
  double x0 = 0.0;
  double x1 = 0.0;
  double tau0 = 0.0;
  double tau1 = 0.0;
  double slope = 0.0;
  bool active = false;
};

class ContactCurve {
 public:
  /// No contact inside the window (tau = +inf).
  static ContactCurve empty(std::optional<AnalysisWindow> window = {},
                            std::optional<double> period = {});

  /// General admissible sigma: sigma >= 0, |sigma'| <= 1. Throws InputError.
  static ContactCurve from_tau(PiecewiseLinear tau,
                               std::optional<AnalysisWindow> window = {},
                               double tol_slope = 1e-9);

  bool is_empty() const { return empty_; }
  const PiecewiseLinear& tau() const;
  PiecewiseConstant tau_slope() const;
  std::optional<double> period() const { return period_; }
  const std::optional<AnalysisWindow>& window() const { return window_; }

  /// Segments over the knot range (one period for periodic curves).
  const std::vector<ContactSegment>& segments() const { return segments_; }

  /// Frontier polyline, non-increasing in eta (empty when built from tau).
  const std::vector<FrontierVertex>& frontier() const { return frontier_; }

  /// Throws InputError when (x, t) is outside the analysis window.
  void require_in_window(double x, double t) const;

  void set_frontier(std::vector<FrontierVertex> frontier) { frontier_ = std::move(frontier); }
  void set_activity(double tol_slope);

 private:
  ContactCurve() = default;
  bool empty_ = true;
  PiecewiseLinear tau_ = PiecewiseLinear::constant(0.0);
  std::optional<double> period_;
  std::optional<AnalysisWindow> window_;
  std::vector<ContactSegment> segments_;
  std::vector<FrontierVertex> frontier_;
};

/// Computes tau exactly on PL data. Periodic pairs give a periodic curve;
/// aperiodic pairs need options.window.
ContactCurve negativity_frontier(const RiemannPair& pair,
                                 const FrontierOptions& options = {});

/// Recomputes the active flags with `tol_slope` and checks, on each active
/// segment, tau' = -w_x / w_t, w_t <= tol and |w| <= tol along the curve.
/// Throws EngineError naming the first violating segment.
ContactCurve classify(ContactCurve curve, const RiemannPair& pair,
                      double tol_slope = 1e-9, double tol = 1e-9);

enum class Membership { inside, outside, boundary };

Membership influence_membership(const ContactCurve& curve, double x, double t,
                                double tol = 1e-9);

const char* to_string(Membership m);

/// CSV with columns x, tau, tau_slope, active (one row per knot).
void write_curve_csv(const ContactCurve& curve, std::ostream& out);

}  // namespace obstacle
