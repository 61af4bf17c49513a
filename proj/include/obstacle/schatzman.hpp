#pragma once

// Exact solution of the single-obstacle problem,
//
//   u(x, t) = w(x, t) + 1/2 mu({z : sigma(z) <= t - |x - z|}),
//
// with the reflection measure dmu = -2 (1 - sigma'^2) w_t(z, sigma(z)) dz
// supported on {sigma > 0}. Everything is closed form on PL data.

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "obstacle/contact.hpp"
#include "obstacle/freewave.hpp"
#include "obstacle/piecewise.hpp"

namespace obstacle {

class ReflectionMeasure {
 public:
  ReflectionMeasure(PiecewiseConstant density, double anchor);

  /// Weight density m(z); piecewise constant, periodic for periodic curves.
  const PiecewiseConstant& density() const { return density_; }
  /// M(z) = integral of m from the anchor to z.
  const PiecewiseLinear& mass() const { return mass_; }
  /// mu([a, b]).
  double mass_between(double a, double b) const { return mass_(b) - mass_(a); }
  std::optional<double> per_period_mass() const;
  /// Most negative density value (>= -tol when sigma = tau).
  double min_density() const;

 private:
  PiecewiseConstant density_;
  PiecewiseLinear mass_;
};

/// sigma must be admissible (sigma >= 0, |sigma'| <= 1) and periodic exactly
/// when the pair is.
ReflectionMeasure build_measure(const RiemannPair& pair, const ContactCurve& sigma);

class SolutionField {
 public:
  SolutionField(RiemannPair pair, ContactCurve curve);

  /// decompose + negativity_frontier + classify + build_measure.
  static SolutionField solve(const InitialData& data, const FrontierOptions& options = {});

  const RiemannPair& pair() const { return pair_; }
  const ContactCurve& curve() const { return curve_; }
  const ReflectionMeasure& measure() const { return measure_; }

  /// Window [zl, zr] of contact points in the backward cone of (x, t); empty
  /// (nullopt) when t < tau(x).
  std::optional<std::pair<double, double>> cone_window(double x, double t) const;

 private:
  RiemannPair pair_;
  ContactCurve curve_;
  ReflectionMeasure measure_;
  std::optional<PiecewiseLinear> tau_mirror_;
};

double eval_u(const SolutionField& field, double x, double t);

enum class Region { free, flipped_xi, flipped_eta, flipped_both };

const char* to_string(Region r);

struct Gradient {
  double u_xi = 0.0;
  double u_eta = 0.0;
  double u_x = 0.0;
  double u_t = 0.0;
};

/// Derivatives carried along characteristics, sign-flipped where the
/// characteristic has crossed an active contact. `left` / `right` are limits
/// along x; `one_sided` marks kinks of w and points on the contact curve.
struct Transported {
  Gradient left;
  Gradient right;
  bool one_sided = false;
  Region region = Region::free;
};

Transported transport_derivatives(const SolutionField& field, double x, double t);

struct LipschitzNorms {
  double minus = 0.0;  // ||u_x - u_t||_inf
  double plus = 0.0;   // ||u_x + u_t||_inf
  double grad = 0.0;   // ||(u_x, u_t)||_inf, Euclidean
};

/// Exact sups over [lo, hi] at time t. Without an interval: one period for
/// periodic fields, the analysis window otherwise.
LipschitzNorms lipschitz_norms(const SolutionField& field, double t,
                               std::optional<std::pair<double, double>> interval = {});

/// Integral of u_x^2 + u_t^2 over the interval (same defaults).
double energy(const SolutionField& field, double t,
              std::optional<std::pair<double, double>> interval = {});

/// Transported u_t at (x, tau(x) - dt) and (x, tau(x) + dt). Throws
/// InputError unless x lies on an active part of the curve.
std::pair<double, double> reflection_check(const SolutionField& field, double x, double dt);

/// CSV columns x, t, u, u_x, u_t, region on the tensor grid xs x ts.
void write_field_csv(const SolutionField& field, const std::vector<double>& xs,
                     const std::vector<double>& ts, std::ostream& out);

}  // namespace obstacle
