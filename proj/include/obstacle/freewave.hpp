#pragma once

// The unconstrained wave w with the same initial data, written as a pair of
// travelling profiles w(x, t) = f(x + t) + g(x - t).
//
// Characteristic coordinates follow xi = (x + t)/sqrt2, eta = (t - x)/sqrt2,
// so that w_xi = sqrt2 f'(x + t) and w_eta = -sqrt2 g'(x - t).

#include <string>

#include "obstacle/piecewise.hpp"

namespace obstacle {

enum class ObstacleMode { single, twin };

struct InitialData {
  PiecewiseLinear u0;    // displacement
  PiecewiseConstant u1;  // velocity
  ObstacleMode mode = ObstacleMode::single;
  std::string label;
};

/// Checks the admissibility hypotheses: 0 <= u0 (<= 1 for two obstacles),
/// u1 >= 0 a.e. on {u0 = 0} and u1 <= 0 a.e. on {u0 = 1}. Throws InputError
/// naming the first violating interval.
void validate(const InitialData& data);

struct RiemannPair {
  PiecewiseLinear f;
  PiecewiseLinear g;
};

/// f = u0/2 + U1/2, g = u0/2 - U1/2 with U1(s) = integral of u1 over [0, s].
RiemannPair decompose(const InitialData& data);

double eval_w(const RiemannPair& pair, double x, double t);

struct WaveDerivatives {
  double w_x = 0.0;
  double w_t = 0.0;
  double w_xi = 0.0;
  double w_eta = 0.0;
};

/// `left` / `right` are the limits as the evaluation point approaches along
/// x from below / above. They differ only when x + t or x - t is a kink of
/// the corresponding profile, in which case `one_sided` is set.
struct SidedDerivatives {
  WaveDerivatives left;
  WaveDerivatives right;
  bool one_sided = false;
};

SidedDerivatives eval_w_derivatives(const RiemannPair& pair, double x, double t);

enum class ConeDirection { dependence, influence };

/// Supremum of max(-w, 0) over the closed backward light cone of (x, t),
/// clipped at t = 0. Exact on PL profiles.
double cone_negative_sup(const RiemannPair& pair, double x, double t,
                         ConeDirection direction = ConeDirection::dependence);

namespace presets {

/// u0 = displacement, u1 = velocity, both constant on the whole line.
InitialData constant(double displacement, double velocity);

/// u0 = |x - center|, u1 = 0. The free wave never goes negative.
InitialData hat(double center = 0.0);

/// u0 ramps linearly from `low` at x0 to `high` at x1 and is constant
/// outside; u1 = velocity everywhere.
InitialData linear_ramp(double x0, double x1, double low, double high,
                        double velocity);

/// u0 = offset, u1 = amplitude * sin(x), 2pi-periodic. u1 is the exact
/// cell average of sin over `cells` uniform cells per period, so that its
/// antiderivative interpolates 1 - cos at the cell boundaries.
InitialData sine_velocity(double offset = 0.5, double amplitude = 1.0,
                          int cells = 4096);

}  // namespace presets

}  // namespace obstacle
