#include "obstacle/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "obstacle/errors.hpp"

namespace obstacle {
namespace {

constexpr double kCollinearTol = 1e-12;

bool nearly_equal_slopes(double a, double b) {
  return std::abs(a - b) <=
         kCollinearTol * std::max({1.0, std::abs(a), std::abs(b)});
}

void require_increasing(std::span<const double> xs, const char* what) {
  if (xs.empty()) {
    throw InputError(std::string(what) + ": at least one breakpoint required");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) {
      throw InputError(std::string(what) + ": non-finite breakpoint");
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw InputError(std::string(what) +
                       ": breakpoints must be strictly increasing (at " +
                       std::to_string(xs[i]) + ")");
    }
  }
}

std::ptrdiff_t floor_div(std::ptrdiff_t a, std::ptrdiff_t b) {
  std::ptrdiff_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Knots of a periodic grid (one period stored in xs, xs.back() = xs[0] + P)
// falling in [lo, hi].
std::vector<double> periodic_knots_in(std::span<const double> xs, double period,
                                      double lo, double hi) {
  std::vector<double> out;
  if (lo > hi) return out;
  const auto n = static_cast<std::ptrdiff_t>(xs.size()) - 1;
  const double x0 = xs.front();
  auto knot = [&](std::ptrdiff_t j) {
    const std::ptrdiff_t k = floor_div(j, n);
    return xs[static_cast<std::size_t>(j - k * n)] + static_cast<double>(k) * period;
  };
  std::ptrdiff_t j =
      static_cast<std::ptrdiff_t>(std::floor((lo - x0) / period)) * n - n;
  while (knot(j) < lo) ++j;
  for (double x = knot(j); x <= hi; x = knot(++j)) out.push_back(x);
  return out;
}

std::vector<double> aperiodic_knots_in(std::span<const double> xs, double lo,
                                       double hi) {
  std::vector<double> out;
  auto first = std::lower_bound(xs.begin(), xs.end(), lo);
  for (auto it = first; it != xs.end() && *it <= hi; ++it) out.push_back(*it);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseLinear

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys,
                                 double left_slope, double right_slope)
    : xs_(std::move(xs)),
      ys_(std::move(ys)),
      left_slope_(left_slope),
      right_slope_(right_slope) {
  canonicalize();
}

PiecewiseLinear PiecewiseLinear::periodic(std::vector<double> xs,
                                          std::vector<double> ys) {
  if (xs.size() < 2) {
    throw InputError("periodic PL function needs at least two knots");
  }
  PiecewiseLinear f;
  f.period_ = xs.back() - xs.front();
  f.drift_ = ys.back() - ys.front();
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  f.canonicalize();
  return f;
}

PiecewiseLinear PiecewiseLinear::constant(double value) {
  return PiecewiseLinear({0.0}, {value}, 0.0, 0.0);
}

PiecewiseLinear PiecewiseLinear::affine(double value, double slope) {
  return PiecewiseLinear({0.0}, {value}, slope, slope);
}

void PiecewiseLinear::canonicalize() {
  if (xs_.size() != ys_.size()) {
    throw InputError("PL function: abscissa/ordinate count mismatch");
  }
  require_increasing(xs_, "PL function");
  for (double y : ys_) {
    if (!std::isfinite(y)) throw InputError("PL function: non-finite ordinate");
  }
  if (period_ && !(*period_ > 0.0)) {
    throw InputError("PL function: period must be positive");
  }

  // Drop interior knots joining collinear pieces.
  std::vector<double> xs{xs_.front()};
  std::vector<double> ys{ys_.front()};
  for (std::size_t i = 1; i + 1 < xs_.size(); ++i) {
    const double s_in = (ys_[i] - ys.back()) / (xs_[i] - xs.back());
    const double s_out = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
    if (nearly_equal_slopes(s_in, s_out)) continue;
    xs.push_back(xs_[i]);
    ys.push_back(ys_[i]);
  }
  if (xs_.size() > 1) {
    xs.push_back(xs_.back());
    ys.push_back(ys_.back());
  }
  if (!period_) {
    // End knots collinear with the extensions are redundant too.
    while (xs.size() > 1 &&
           nearly_equal_slopes(left_slope_, (ys[1] - ys[0]) / (xs[1] - xs[0]))) {
      xs.erase(xs.begin());
      ys.erase(ys.begin());
    }
    while (xs.size() > 1) {
      const std::size_t n = xs.size();
      const double s = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
      if (!nearly_equal_slopes(s, right_slope_)) break;
      xs.pop_back();
      ys.pop_back();
    }
    if (xs.size() == 1 && nearly_equal_slopes(left_slope_, right_slope_)) {
      right_slope_ = left_slope_;
    }
  }
  xs_ = std::move(xs);
  ys_ = std::move(ys);
}

std::size_t PiecewiseLinear::segment_of(double x) const {
  // Segment s with xs[s] <= x < xs[s+1], clamped to valid segments.
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::ptrdiff_t s = (it - xs_.begin()) - 1;
  const auto last = static_cast<std::ptrdiff_t>(xs_.size()) - 2;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(s, 0, last));
}

double PiecewiseLinear::interpolate(double x) const {
  if (xs_.size() == 1 || x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const std::size_t s = segment_of(x);
  if (x == xs_[s]) return ys_[s];
  const double w = (x - xs_[s]) / (xs_[s + 1] - xs_[s]);
  return ys_[s] + (ys_[s + 1] - ys_[s]) * w;
}

double PiecewiseLinear::reduce(double x, double& periods) const {
  const double p = *period_;
  const double x0 = xs_.front();
  double k = std::floor((x - x0) / p);
  double r = x - k * p;
  if (r >= xs_.back()) {
    r -= p;
    k += 1.0;
  }
  if (r < x0) {
    r = x0;
  }
  periods = k;
  return r;
}

double PiecewiseLinear::operator()(double x) const {
  if (period_) {
    double k = 0.0;
    const double r = reduce(x, k);
    const double y = interpolate(r);
    return k == 0.0 ? y : y + k * drift_;
  }
  if (x < xs_.front()) return ys_.front() + left_slope_ * (x - xs_.front());
  if (x > xs_.back()) return ys_.back() + right_slope_ * (x - xs_.back());
  return interpolate(x);
}

double PiecewiseLinear::slope_right(double x) const {
  if (period_) {
    double k = 0.0;
    x = reduce(x, k);
  } else {
    if (x < xs_.front()) return left_slope_;
    if (x >= xs_.back()) return right_slope_;
  }
  const std::size_t s = segment_of(x);
  return (ys_[s + 1] - ys_[s]) / (xs_[s + 1] - xs_[s]);
}

double PiecewiseLinear::slope_left(double x) const {
  if (period_) {
    double k = 0.0;
    x = reduce(x, k);
    if (x == xs_.front()) x = xs_.back();
  } else {
    if (x <= xs_.front()) return left_slope_;
    if (x > xs_.back()) return right_slope_;
  }
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  const std::size_t s = static_cast<std::size_t>(it - xs_.begin()) - 1;
  return (ys_[s + 1] - ys_[s]) / (xs_[s + 1] - xs_[s]);
}

PiecewiseConstant PiecewiseLinear::derivative() const {
  std::vector<double> slopes;
  slopes.reserve(xs_.size());
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
    slopes.push_back((ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]));
  }
  if (period_) return PiecewiseConstant::periodic(xs_, std::move(slopes));
  return PiecewiseConstant(xs_, std::move(slopes), left_slope_, right_slope_);
}

double PiecewiseLinear::knot_x(std::ptrdiff_t j) const {
  if (!period_) return xs_.at(static_cast<std::size_t>(j));
  const auto n = static_cast<std::ptrdiff_t>(xs_.size()) - 1;
  const std::ptrdiff_t k = floor_div(j, n);
  return xs_[static_cast<std::size_t>(j - k * n)] + static_cast<double>(k) * *period_;
}

double PiecewiseLinear::knot_y(std::ptrdiff_t j) const {
  if (!period_) return ys_.at(static_cast<std::size_t>(j));
  const auto n = static_cast<std::ptrdiff_t>(xs_.size()) - 1;
  const std::ptrdiff_t k = floor_div(j, n);
  return ys_[static_cast<std::size_t>(j - k * n)] + static_cast<double>(k) * drift_;
}

std::ptrdiff_t PiecewiseLinear::knot_index(double x) const {
  if (!period_) {
    return (std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin()) - 1;
  }
  const auto n = static_cast<std::ptrdiff_t>(xs_.size()) - 1;
  const double x0 = xs_.front();
  const auto k = static_cast<std::ptrdiff_t>(std::floor((x - x0) / *period_));
  const double r = x - static_cast<double>(k) * *period_;
  std::ptrdiff_t i = (std::upper_bound(xs_.begin(), xs_.end() - 1, r) - xs_.begin()) - 1;
  std::ptrdiff_t j = k * n + std::clamp<std::ptrdiff_t>(i, 0, n - 1);
  while (knot_x(j + 1) <= x) ++j;
  while (knot_x(j) > x) --j;
  return j;
}

std::vector<double> PiecewiseLinear::knots_in(double lo, double hi) const {
  if (period_) return periodic_knots_in(xs_, *period_, lo, hi);
  return aperiodic_knots_in(xs_, lo, hi);
}

PiecewiseLinear PiecewiseLinear::restricted(double lo, double hi) const {
  if (lo > hi) throw InputError("restricted: lo > hi");
  std::vector<double> xs{lo};
  for (double x : knots_in(lo, hi)) {
    if (x > xs.back() && x < hi) xs.push_back(x);
  }
  if (hi > xs.back()) xs.push_back(hi);
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back((*this)(x));
  if (xs.size() == 1) {
    return PiecewiseLinear(std::move(xs), std::move(ys), slope_left(lo),
                           slope_right(lo));
  }
  return PiecewiseLinear(std::move(xs), std::move(ys), slope_right(lo),
                         slope_left(hi));
}

PiecewiseLinear PiecewiseLinear::reflected() const {
  std::vector<double> xs(xs_.rbegin(), xs_.rend());
  for (double& x : xs) x = -x;
  std::vector<double> ys(ys_.rbegin(), ys_.rend());
  if (period_) return periodic(std::move(xs), std::move(ys));
  return PiecewiseLinear(std::move(xs), std::move(ys), -right_slope_,
                         -left_slope_);
}

// ---------------------------------------------------------------------------
// PiecewiseConstant

PiecewiseConstant::PiecewiseConstant(std::vector<double> xs,
                                     std::vector<double> values, double left,
                                     double right)
    : xs_(std::move(xs)), values_(std::move(values)), left_(left), right_(right) {
  canonicalize();
}

PiecewiseConstant PiecewiseConstant::periodic(std::vector<double> xs,
                                              std::vector<double> values) {
  if (xs.size() < 2) {
    throw InputError("periodic PC function needs at least two breakpoints");
  }
  PiecewiseConstant h;
  h.period_ = xs.back() - xs.front();
  h.xs_ = std::move(xs);
  h.values_ = std::move(values);
  h.canonicalize();
  return h;
}

PiecewiseConstant PiecewiseConstant::constant(double value) {
  return PiecewiseConstant({0.0}, {}, value, value);
}

void PiecewiseConstant::canonicalize() {
  require_increasing(xs_, "PC function");
  if (values_.size() + 1 != xs_.size()) {
    throw InputError("PC function: need exactly one value per plateau");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("PC function: non-finite value");
  }
  if (!std::isfinite(left_) || !std::isfinite(right_)) {
    throw InputError("PC function: non-finite extension");
  }
  std::vector<double> xs{xs_.front()};
  std::vector<double> vs;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!vs.empty() && vs.back() == values_[i]) {
      xs.back() = xs_[i + 1];
    } else {
      vs.push_back(values_[i]);
      xs.push_back(xs_[i + 1]);
    }
  }
  if (!period_) {
    while (!vs.empty() && vs.front() == left_) {
      xs.erase(xs.begin());
      vs.erase(vs.begin());
    }
    while (!vs.empty() && vs.back() == right_) {
      xs.pop_back();
      vs.pop_back();
    }
  }
  xs_ = std::move(xs);
  values_ = std::move(vs);
}

double PiecewiseConstant::reduce(double x) const {
  const double p = *period_;
  const double x0 = xs_.front();
  double r = x - std::floor((x - x0) / p) * p;
  if (r >= xs_.back()) r -= p;
  if (r < x0) r = x0;
  return r;
}

double PiecewiseConstant::operator()(double x) const {
  if (period_) {
    x = reduce(x);
  } else {
    if (x < xs_.front()) return left_;
    if (x >= xs_.back()) return right_;
  }
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  return values_[static_cast<std::size_t>(it - xs_.begin()) - 1];
}

double PiecewiseConstant::left_limit(double x) const {
  if (period_) {
    x = reduce(x);
    if (x == xs_.front()) return values_.back();
  } else {
    if (x <= xs_.front()) return left_;
    if (x > xs_.back()) return right_;
  }
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  return values_[static_cast<std::size_t>(it - xs_.begin()) - 1];
}

std::vector<double> PiecewiseConstant::knots_in(double lo, double hi) const {
  if (period_) return periodic_knots_in(xs_, *period_, lo, hi);
  return aperiodic_knots_in(xs_, lo, hi);
}

double PiecewiseConstant::period_integral() const {
  if (!period_) throw InputError("period_integral: function is not periodic");
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    sum += values_[i] * (xs_[i + 1] - xs_[i]);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Free functions

PiecewiseLinear combine(const PiecewiseLinear& f, const PiecewiseLinear& g,
                        double a, double b) {
  auto value = [&](double x) {
    const double fa = a == 0.0 ? 0.0 : a * f(x);
    const double gb = b == 0.0 ? 0.0 : b * g(x);
    return fa + gb;
  };
  if (f.is_periodic() != g.is_periodic()) {
    throw InputError("combine: cannot mix periodic and aperiodic functions");
  }
  if (f.is_periodic()) {
    const double p = *f.period();
    if (std::abs(p - *g.period()) > 1e-12 * p) {
      throw InputError("combine: periods differ");
    }
    const double x0 = f.xs().front();
    const double x1 = f.xs().back();
    std::vector<double> xs(f.xs().begin(), f.xs().end());
    for (double x : g.knots_in(x0, x1)) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    while (xs.back() > x1) xs.pop_back();
    std::vector<double> ys;
    ys.reserve(xs.size());
    for (double x : xs) ys.push_back(value(x));
    ys.back() = ys.front() + a * f.drift() + b * g.drift();
    return PiecewiseLinear::periodic(std::move(xs), std::move(ys));
  }
  std::vector<double> xs(f.xs().begin(), f.xs().end());
  xs.insert(xs.end(), g.xs().begin(), g.xs().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back(value(x));
  return PiecewiseLinear(std::move(xs), std::move(ys),
                         a * f.left_slope() + b * g.left_slope(),
                         a * f.right_slope() + b * g.right_slope());
}

PiecewiseLinear antiderivative(const PiecewiseConstant& h, double base) {
  std::vector<double> xs(h.xs().begin(), h.xs().end());
  std::vector<double> ys(xs.size(), 0.0);
  for (std::size_t i = 0; i < h.values().size(); ++i) {
    ys[i + 1] = ys[i] + h.values()[i] * (xs[i + 1] - xs[i]);
  }
  if (h.is_periodic()) {
    PiecewiseLinear raw = PiecewiseLinear::periodic(xs, ys);
    const double offset = raw(base);
    for (double& y : ys) y -= offset;
    return PiecewiseLinear::periodic(std::move(xs), std::move(ys));
  }
  PiecewiseLinear raw(xs, ys, h.left_value(), h.right_value());
  const double offset = raw(base);
  for (double& y : ys) y -= offset;
  return PiecewiseLinear(std::move(xs), std::move(ys), h.left_value(),
                         h.right_value());
}

PiecewiseLinear running_min(const PiecewiseLinear& f, double from) {
  double end = 0.0;
  if (f.is_periodic()) {
    if (f.drift() < 0.0) {
      throw InputError("running_min: periodic function with negative drift "
                       "has no stabilizing minimum");
    }
    end = from + *f.period();
  } else {
    end = std::max(from, f.xs().back());
  }

  double m = f(from);
  std::vector<double> xs{from};
  std::vector<double> ys{m};
  double xa = from;
  double ya = m;
  std::vector<double> knots = f.knots_in(from, end);
  if (knots.empty() || knots.back() < end) knots.push_back(end);
  for (double xb : knots) {
    if (xb <= xa) continue;
    const double yb = f(xb);
    if (yb < m) {
      if (ya > m) {
        const double c = xa + (m - ya) * (xb - xa) / (yb - ya);
        if (c > xs.back() && c < xb) {
          xs.push_back(c);
          ys.push_back(m);
        }
      }
      xs.push_back(xb);
      ys.push_back(yb);
      m = yb;
    }
    xa = xb;
    ya = yb;
  }
  if (xs.back() < end) {
    xs.push_back(end);
    ys.push_back(m);
  }
  double right = 0.0;
  if (!f.is_periodic() && f.right_slope() < 0.0) {
    // The decreasing extension eventually undercuts the running minimum.
    const double y_end = f(end);
    if (y_end > m) {
      xs.push_back(end + (m - y_end) / f.right_slope());
      ys.push_back(m);
    }
    right = f.right_slope();
  }
  return PiecewiseLinear(std::move(xs), std::move(ys), 0.0, right);
}

ExtremumPoint extremum_on_interval(const PiecewiseLinear& f, double lo,
                                   double hi, Extremum which) {
  if (lo > hi) throw InputError("extremum_on_interval: lo > hi");
  ExtremumPoint best{lo, f(lo)};
  auto consider = [&](double x) {
    const double y = f(x);
    const bool better = which == Extremum::min ? y < best.y : y > best.y;
    if (better) best = {x, y};
  };
  for (double x : f.knots_in(lo, hi)) consider(x);
  consider(hi);
  return best;
}

double sup_abs_on(const PiecewiseConstant& h, double lo, double hi) {
  if (lo > hi) throw InputError("sup_abs_on: lo > hi");
  if (hi == lo) return std::abs(h(lo));
  // Sample piece midpoints: a shifted periodic knot may round to either side.
  std::vector<double> cuts{lo};
  for (double x : h.knots_in(lo, hi)) {
    if (x > cuts.back() && x < hi) cuts.push_back(x);
  }
  cuts.push_back(hi);
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    best = std::max(best, std::abs(h(0.5 * (cuts[i] + cuts[i + 1]))));
  }
  return best;
}

}  // namespace obstacle
