#pragma once

// Exact algebra of univariate piecewise-linear (PL) and piecewise-constant
// (PC) functions on the real line, with optional periodic extension.
//
// Abscissas are never re-derived by root finding when a closed form exists:
// knots of a result are knots of the inputs plus closed-form crossings of
// two affine pieces.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace obstacle {

class PiecewiseConstant;

/// Continuous piecewise-linear function.
///
/// Aperiodic functions are affine outside [xs.front(), xs.back()] with the
/// stored extension slopes. Periodic functions store one closed period
/// [x0, x0 + P]; the value at x0 + P may differ from the value at x0 by a
/// constant `drift`, in which case f(x + P) = f(x) + drift everywhere.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys,
                  double left_slope = 0.0, double right_slope = 0.0);

  /// One period given by knots spanning [xs.front(), xs.back()].
  static PiecewiseLinear periodic(std::vector<double> xs,
                                  std::vector<double> ys);
  static PiecewiseLinear constant(double value);
  /// x -> value + slope * x
  static PiecewiseLinear affine(double value, double slope);

  double operator()(double x) const;
  double slope_left(double x) const;
  double slope_right(double x) const;
  PiecewiseConstant derivative() const;

  bool is_periodic() const { return period_.has_value(); }
  std::optional<double> period() const { return period_; }
  /// Increment per period (0 for aperiodic functions and true periodics).
  double drift() const { return drift_; }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }
  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }

  /// Knots of the periodic extension are addressed by any integer index;
  /// aperiodic functions accept 0 .. xs().size() - 1.
  double knot_x(std::ptrdiff_t j) const;
  double knot_y(std::ptrdiff_t j) const;
  /// Knot abscissas inside the closed interval [lo, hi], increasing.
  std::vector<double> knots_in(double lo, double hi) const;

  /// Largest j with knot_x(j) <= x. Aperiodic: -1 when x precedes the first
  /// knot, xs().size() - 1 past the last.
  std::ptrdiff_t knot_index(double x) const;

  /// Aperiodic copy that agrees with *this on [lo, hi] (and on the affine
  /// continuation of the end pieces outside it).
  PiecewiseLinear restricted(double lo, double hi) const;
  /// x -> f(-x)
  PiecewiseLinear reflected() const;

 private:
  PiecewiseLinear() = default;
  void canonicalize();
  double interpolate(double x) const;  // x within [xs.front(), xs.back()]
  std::size_t segment_of(double x) const;
  double reduce(double x, double& periods) const;

  std::vector<double> xs_;
  std::vector<double> ys_;
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
  std::optional<double> period_;
  double drift_ = 0.0;
};

/// Right-continuous piecewise-constant function.
///
/// `values[i]` holds on [xs[i], xs[i+1]); outside the breakpoint range the
/// function equals `left` / `right`. Periodic functions store one period.
class PiecewiseConstant {
 public:
  PiecewiseConstant(std::vector<double> xs, std::vector<double> values,
                    double left, double right);
  static PiecewiseConstant periodic(std::vector<double> xs,
                                    std::vector<double> values);
  static PiecewiseConstant constant(double value);

  double operator()(double x) const;
  double left_limit(double x) const;

  bool is_periodic() const { return period_.has_value(); }
  std::optional<double> period() const { return period_; }
  double left_value() const { return left_; }
  double right_value() const { return right_; }
  std::span<const double> xs() const { return xs_; }
  std::span<const double> values() const { return values_; }

  std::vector<double> knots_in(double lo, double hi) const;
  /// Integral over one period (periodic functions only).
  double period_integral() const;

 private:
  PiecewiseConstant() = default;
  void canonicalize();
  double reduce(double x) const;

  std::vector<double> xs_;
  std::vector<double> values_;
  double left_ = 0.0;
  double right_ = 0.0;
  std::optional<double> period_;
};

/// a*f + b*g. Both aperiodic, or both periodic with the same period.
PiecewiseLinear combine(const PiecewiseLinear& f, const PiecewiseLinear& g,
                        double a, double b);

/// s -> integral of h from `base` to s. Periodic h with non-zero mean yields a
/// periodic function with drift equal to the period integral.
PiecewiseLinear antiderivative(const PiecewiseConstant& h, double base);

/// x -> min of f over [from, x] for x >= from; constant f(from) for x < from.
PiecewiseLinear running_min(const PiecewiseLinear& f, double from);

enum class Extremum { min, max };

struct ExtremumPoint {
  double x;
  double y;
};

/// Exact extremum over [lo, hi]; ties go to the smallest abscissa.
ExtremumPoint extremum_on_interval(const PiecewiseLinear& f, double lo,
                                   double hi, Extremum which);

/// Largest |h| over the open pieces meeting [lo, hi].
double sup_abs_on(const PiecewiseConstant& h, double lo, double hi);

}  // namespace obstacle
