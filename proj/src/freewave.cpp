#include "obstacle/freewave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "obstacle/errors.hpp"

namespace obstacle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLevelTol = 1e-14;

std::string interval_text(double a, double b) {
  std::ostringstream os;
  os << "[" << a << ", " << b << "]";
  return os.str();
}

// Calls fn(lo, hi, value) for every plateau of h meeting the open interval
// (a, b); a and b may be infinite for aperiodic h.
template <typename Fn>
void for_each_piece(const PiecewiseConstant& h, double a, double b, Fn fn) {
  std::vector<double> cuts{a};
  if (h.is_periodic()) {
    for (double x : h.knots_in(a, b)) cuts.push_back(x);
  } else {
    for (double x : h.xs()) {
      if (x > a && x < b) cuts.push_back(x);
    }
  }
  cuts.push_back(b);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    double probe = 0.0;
    if (std::isinf(lo) && std::isinf(hi)) {
      probe = 0.0;
    } else if (std::isinf(lo)) {
      probe = hi - 1.0;
    } else if (std::isinf(hi)) {
      probe = lo + 1.0;
    } else {
      probe = 0.5 * (lo + hi);
    }
    fn(lo, hi, h(probe));
  }
}

// Maximal intervals on which u0 equals `level` identically.
std::vector<std::pair<double, double>> level_set(const PiecewiseLinear& u0,
                                                 double level) {
  std::vector<std::pair<double, double>> out;
  auto at = [&](double y) { return std::abs(y - level) <= kLevelTol; };
  const auto xs = u0.xs();
  const auto ys = u0.ys();
  const std::size_t n = xs.size();
  if (!u0.is_periodic()) {
    if (n == 1) {
      if (at(ys[0]) && u0.left_slope() == 0.0 && u0.right_slope() == 0.0) {
        out.emplace_back(-kInf, kInf);
      } else {
        if (at(ys[0]) && u0.left_slope() == 0.0) out.emplace_back(-kInf, xs[0]);
        if (at(ys[0]) && u0.right_slope() == 0.0) out.emplace_back(xs[0], kInf);
      }
      return out;
    }
    if (at(ys[0]) && u0.left_slope() == 0.0) out.emplace_back(-kInf, xs[0]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (at(ys[i]) && at(ys[i + 1])) {
      if (!out.empty() && out.back().second == xs[i]) {
        out.back().second = xs[i + 1];
      } else {
        out.emplace_back(xs[i], xs[i + 1]);
      }
    }
  }
  if (!u0.is_periodic() && at(ys[n - 1]) && u0.right_slope() == 0.0) {
    if (!out.empty() && out.back().second == xs[n - 1]) {
      out.back().second = kInf;
    } else {
      out.emplace_back(xs[n - 1], kInf);
    }
  }
  return out;
}

void check_bound(const PiecewiseLinear& u0, double bound, bool lower) {
  const char* what = lower ? "u0 >= 0 required" : "u0 <= 1 required";
  auto violates = [&](double y) {
    return lower ? y < bound - kLevelTol : y > bound + kLevelTol;
  };
  if (u0.is_periodic()) {
    if (u0.drift() != 0.0) {
      throw InputError(std::string(what) + ": periodic u0 must not drift");
    }
  } else {
    const double ls = u0.left_slope();
    const double rs = u0.right_slope();
    if (lower ? ls > 0.0 : ls < 0.0) {
      throw InputError(std::string(what) + ": violated on (-inf, " +
                       std::to_string(u0.xs().front()) + "]");
    }
    if (lower ? rs < 0.0 : rs > 0.0) {
      throw InputError(std::string(what) + ": violated on [" +
                       std::to_string(u0.xs().back()) + ", inf)");
    }
  }
  for (std::size_t i = 0; i < u0.xs().size(); ++i) {
    if (violates(u0.ys()[i])) {
      throw InputError(std::string(what) + ": violated at x = " +
                       std::to_string(u0.xs()[i]));
    }
  }
}

void check_velocity_on(const InitialData& data, double level, bool lower) {
  for (auto [a, b] : level_set(data.u0, level)) {
    for_each_piece(data.u1, a, b, [&](double lo, double hi, double v) {
      const bool bad = lower ? v < 0.0 : v > 0.0;
      if (bad) {
        throw InputError(std::string(lower ? "u1 >= 0 required on {u0=0}"
                                           : "u1 <= 0 required on {u0=1}") +
                         ": violated on " + interval_text(lo, hi));
      }
    });
  }
}

PiecewiseLinear lift_constant(const PiecewiseLinear& c, double x0, double period) {
  return PiecewiseLinear::periodic({x0, x0 + period}, {c(x0), c(x0)});
}

bool is_constant(const PiecewiseLinear& f) {
  return !f.is_periodic() && f.xs().size() == 1 && f.left_slope() == 0.0 &&
         f.right_slope() == 0.0;
}

}  // namespace

void validate(const InitialData& data) {
  if (data.u0.is_periodic() && data.u1.is_periodic() &&
      std::abs(*data.u0.period() - *data.u1.period()) > 1e-12 * *data.u0.period()) {
    throw InputError("u0 and u1 have different periods");
  }
  check_bound(data.u0, 0.0, true);
  check_velocity_on(data, 0.0, true);
  if (data.mode == ObstacleMode::twin) {
    check_bound(data.u0, 1.0, false);
    check_velocity_on(data, 1.0, false);
  }
}

RiemannPair decompose(const InitialData& data) {
  validate(data);
  PiecewiseLinear u0 = data.u0;
  PiecewiseLinear u1_integral = antiderivative(data.u1, 0.0);
  if (u1_integral.is_periodic() && !u0.is_periodic()) {
    if (!is_constant(u0)) {
      throw InputError("periodic u1 requires periodic or constant u0");
    }
    u0 = lift_constant(u0, u1_integral.xs().front(), *u1_integral.period());
  } else if (u0.is_periodic() && !u1_integral.is_periodic()) {
    if (!is_constant(u1_integral)) {
      throw InputError("periodic u0 requires periodic or zero u1");
    }
    u1_integral = lift_constant(u1_integral, u0.xs().front(), *u0.period());
  }
  return {combine(u0, u1_integral, 0.5, 0.5), combine(u0, u1_integral, 0.5, -0.5)};
}

double eval_w(const RiemannPair& pair, double x, double t) {
  if (t < 0.0) throw InputError("eval_w: t must be non-negative");
  return pair.f(x + t) + pair.g(x - t);
}

SidedDerivatives eval_w_derivatives(const RiemannPair& pair, double x, double t) {
  const double fl = pair.f.slope_left(x + t);
  const double fr = pair.f.slope_right(x + t);
  const double gl = pair.g.slope_left(x - t);
  const double gr = pair.g.slope_right(x - t);
  auto make = [](double fp, double gp) {
    return WaveDerivatives{fp + gp, fp - gp, std::numbers::sqrt2 * fp,
                           -std::numbers::sqrt2 * gp};
  };
  return {make(fl, gl), make(fr, gr), fl != fr || gl != gr};
}

double cone_negative_sup(const RiemannPair& pair, double x, double t,
                         ConeDirection direction) {
  if (direction == ConeDirection::influence) {
    throw InputError("cone_negative_sup: the cone of influence is unbounded");
  }
  if (t < 0.0) throw InputError("cone_negative_sup: t must be non-negative");
  if (t == 0.0) return std::max(0.0, -eval_w(pair, x, 0.0));

  // With s1 = x' + t', s2 = x' - t' the closed cone clipped at t' = 0 is the
  // triangle lo <= s2 <= s1 <= hi, and w = f(s1) + g(s2). Minimize the
  // suffix minimum of f plus g over s2.
  const double lo = x - t;
  const double hi = x + t;
  // Once t covers a period the triangle holds every pair of phases. A
  // roundoff drift shifts the minimum by at most drift per period crossed.
  if (pair.f.is_periodic() && pair.g.is_periodic() &&
      t >= std::max(*pair.f.period(), *pair.g.period()) &&
      (std::abs(pair.f.drift()) + std::abs(pair.g.drift())) *
              (2.0 * t / std::min(*pair.f.period(), *pair.g.period()) + 2.0) <=
          1e-12) {
    const double fmin = *std::min_element(pair.f.ys().begin(), pair.f.ys().end());
    const double gmin = *std::min_element(pair.g.ys().begin(), pair.g.ys().end());
    return std::max(0.0, -(fmin + gmin));
  }
  const PiecewiseLinear f_mirror = pair.f.restricted(lo, hi).reflected();
  const PiecewiseLinear suffix = running_min(f_mirror, -hi);  // at -s2
  std::vector<double> candidates{lo, hi};
  for (double s : pair.g.knots_in(lo, hi)) candidates.push_back(s);
  for (double s : suffix.knots_in(-hi, -lo)) candidates.push_back(-s);
  double best = kInf;
  for (double s2 : candidates) {
    best = std::min(best, pair.g(s2) + suffix(-s2));
  }
  return std::max(0.0, -best);
}

namespace presets {

InitialData constant(double displacement, double velocity) {
  return {PiecewiseLinear::constant(displacement),
          PiecewiseConstant::constant(velocity), ObstacleMode::single,
          "constant"};
}

InitialData hat(double center) {
  return {PiecewiseLinear({center}, {0.0}, -1.0, 1.0),
          PiecewiseConstant::constant(0.0), ObstacleMode::single, "hat"};
}

InitialData linear_ramp(double x0, double x1, double low, double high,
                        double velocity) {
  return {PiecewiseLinear({x0, x1}, {low, high}, 0.0, 0.0),
          PiecewiseConstant::constant(velocity), ObstacleMode::single,
          "linear-ramp"};
}

InitialData sine_velocity(double offset, double amplitude, int cells) {
  if (cells < 4) throw InputError("sine_velocity: need at least 4 cells");
  const double period = 2.0 * std::numbers::pi;
  const double h = period / cells;
  std::vector<double> xs(static_cast<std::size_t>(cells) + 1);
  std::vector<double> vs(static_cast<std::size_t>(cells));
  for (int j = 0; j <= cells; ++j) xs[static_cast<std::size_t>(j)] = j * h;
  xs.back() = period;
  for (int j = 0; j < cells; ++j) {
    const auto i = static_cast<std::size_t>(j);
    vs[i] = amplitude * (std::cos(xs[i]) - std::cos(xs[i + 1])) / (xs[i + 1] - xs[i]);
  }
  return {PiecewiseLinear::periodic({0.0, period}, {offset, offset}),
          PiecewiseConstant::periodic(std::move(xs), std::move(vs)),
          ObstacleMode::single, "sine-velocity"};
}

}  // namespace presets

}  // namespace obstacle
