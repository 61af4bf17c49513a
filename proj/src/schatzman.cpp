#include "obstacle/schatzman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "obstacle/errors.hpp"

namespace obstacle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlopeTol = 1e-9;

// sup{z >= x : s(z) + z <= c}, given s(x) + x <= c and s 1-Lipschitz.
double sup_level(const PiecewiseLinear& s, double x, double c) {
  auto phi = [&](double z) { return s(z) + z; };
  auto knot_phi = [&](std::ptrdiff_t i) { return s.knot_y(i) + s.knot_x(i); };
  const bool periodic = s.is_periodic();
  const std::ptrdiff_t last =
      periodic ? std::numeric_limits<std::ptrdiff_t>::max() / 4
               : static_cast<std::ptrdiff_t>(s.xs().size()) - 1;
  const std::ptrdiff_t j = s.knot_index(x);

  std::ptrdiff_t lo = j;
  std::ptrdiff_t hi = j + 1;
  std::ptrdiff_t step = 1;
  while (hi <= last && knot_phi(hi) <= c) {
    lo = hi;
    if (hi == last) {
      hi = last + 1;
      break;
    }
    step *= 2;
    hi = std::min(j + step, last);
  }
  if (hi > last) {
    // Past the last knot of an aperiodic curve: the right ray.
    const double a = std::max(x, s.knot_x(last));
    const double slope = 1.0 + s.right_slope();
    if (slope <= 0.0) return kInf;
    return a + (c - phi(a)) / slope;
  }
  while (hi - lo > 1) {
    const std::ptrdiff_t mid = lo + (hi - lo) / 2;
    if (knot_phi(mid) <= c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double a = (lo >= 0 || periodic) ? std::max(x, s.knot_x(lo)) : x;
  const double b = s.knot_x(hi);
  const double pa = phi(a);
  const double pb = knot_phi(hi);
  if (!(pb > pa)) return a;
  return std::clamp(a + (c - pa) * (b - a) / (pb - pa), a, b);
}

struct Piece {
  double a;
  double b;
};

double integral_of_square(const PiecewiseConstant& h, double a, double b) {
  std::vector<double> cuts{a};
  for (double x : h.knots_in(a, b)) {
    if (x > cuts.back() && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double v = h(0.5 * (cuts[i] + cuts[i + 1]));
    sum += v * v * (cuts[i + 1] - cuts[i]);
  }
  return sum;
}

std::pair<double, double> default_interval(const SolutionField& field,
                                           std::optional<std::pair<double, double>> interval) {
  if (interval) {
    if (!(interval->second > interval->first)) throw InputError("interval must have lo < hi");
    return *interval;
  }
  if (field.pair().f.is_periodic()) {
    const double x0 = field.pair().f.xs().front();
    return {x0, x0 + *field.pair().f.period()};
  }
  if (const auto& w = field.curve().window()) return {w->x_min, w->x_max};
  throw InputError("aperiodic field: an x-interval is required");
}

Gradient make_gradient(double fp, double gp, double eps_xi, double eps_eta) {
  Gradient g;
  g.u_xi = eps_xi * std::numbers::sqrt2 * fp;
  g.u_eta = -eps_eta * std::numbers::sqrt2 * gp;
  g.u_x = eps_xi * fp + eps_eta * gp;
  g.u_t = eps_xi * fp - eps_eta * gp;
  return g;
}

}  // namespace

ReflectionMeasure::ReflectionMeasure(PiecewiseConstant density, double anchor)
    : density_(std::move(density)), mass_(antiderivative(density_, anchor)) {}

std::optional<double> ReflectionMeasure::per_period_mass() const {
  if (!density_.is_periodic()) return std::nullopt;
  return density_.period_integral();
}

double ReflectionMeasure::min_density() const {
  double m = kInf;
  for (double v : density_.values()) m = std::min(m, v);
  if (!density_.is_periodic()) m = std::min({m, density_.left_value(), density_.right_value()});
  return m;
}

ReflectionMeasure build_measure(const RiemannPair& pair, const ContactCurve& sigma) {
  if (sigma.is_empty()) return ReflectionMeasure(PiecewiseConstant::constant(0.0), 0.0);
  const PiecewiseLinear& s = sigma.tau();
  const bool periodic = s.is_periodic();
  if (periodic != pair.f.is_periodic()) {
    throw InputError("build_measure: sigma must be periodic exactly when the data is");
  }
  if (periodic && std::abs(*s.period() - *pair.f.period()) > 1e-12 * *s.period()) {
    throw InputError("build_measure: sigma and the data have different periods");
  }
  const PiecewiseConstant fp = pair.f.derivative();
  const PiecewiseConstant gp = pair.g.derivative();
  auto density_at = [&](double z, double k) {
    const double h = s(z);
    if (!(h > 0.0)) return 0.0;
    return -2.0 * (1.0 - k * k) * (fp(z + h) - gp(z - h));
  };

  std::vector<Piece> pieces;
  std::vector<double> knots;
  double x0 = 0.0;
  if (periodic) {
    x0 = s.xs().front();
    knots = s.knots_in(x0, x0 + *s.period());
    if (knots.back() < x0 + *s.period()) knots.push_back(x0 + *s.period());
  } else {
    knots.assign(s.xs().begin(), s.xs().end());
    pieces.push_back({-kInf, knots.front()});
    pieces.push_back({knots.back(), kInf});
  }
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) pieces.push_back({knots[i], knots[i + 1]});

  std::vector<double> cuts = knots;
  constexpr double kFar = 1e300;
  for (const Piece& p : pieces) {
    const double anchor = std::isfinite(p.a) ? p.a : p.b;
    double k = 0.0;
    if (std::isinf(p.a)) {
      k = s.left_slope();
    } else if (std::isinf(p.b)) {
      k = s.right_slope();
    } else {
      k = (s(p.b) - s(p.a)) / (p.b - p.a);
    }
    const double h0 = s(anchor);
    const double lo = std::isfinite(p.a) ? p.a : -kFar;
    const double hi = std::isfinite(p.b) ? p.b : kFar;
    // Preimages of the kinks of f(z + sigma) and g(z - sigma).
    if (1.0 + k > 1e-12) {
      const double from = std::isfinite(p.a) ? p.a + s(p.a) : -kFar;
      const double to = std::isfinite(p.b) ? p.b + s(p.b) : kFar;
      for (double v : pair.f.knots_in(from, to)) {
        const double z = anchor + (v - (anchor + h0)) / (1.0 + k);
        if (z > lo && z < hi) cuts.push_back(z);
      }
    }
    if (1.0 - k > 1e-12) {
      const double from = std::isfinite(p.a) ? p.a - s(p.a) : -kFar;
      const double to = std::isfinite(p.b) ? p.b - s(p.b) : kFar;
      for (double v : pair.g.knots_in(from, to)) {
        const double z = anchor + (v - (anchor - h0)) / (1.0 - k);
        if (z > lo && z < hi) cuts.push_back(z);
      }
    }
  }
  // Merge slivers: a midpoint a few ulps from a kink may sample the wrong side.
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> merged{cuts.front()};
  for (double c : cuts) {
    if (c - merged.back() > 1e-12 * (1.0 + std::abs(c))) merged.push_back(c);
  }
  if (periodic) merged.back() = cuts.back();
  cuts = std::move(merged);
  if (cuts.size() < 2) cuts.push_back(cuts.back() + 1.0);

  std::vector<double> values;
  values.reserve(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    values.push_back(density_at(mid, s.slope_right(mid)));
  }
  if (periodic) {
    return ReflectionMeasure(PiecewiseConstant::periodic(std::move(cuts), std::move(values)), x0);
  }
  const double left = density_at(cuts.front() - 1.0, s.left_slope());
  const double right = density_at(cuts.back() + 1.0, s.right_slope());
  return ReflectionMeasure(PiecewiseConstant(std::move(cuts), std::move(values), left, right), 0.0);
}

SolutionField::SolutionField(RiemannPair pair, ContactCurve curve)
    : pair_(std::move(pair)), curve_(std::move(curve)), measure_(build_measure(pair_, curve_)) {
  if (!curve_.is_empty()) tau_mirror_ = curve_.tau().reflected();
}

SolutionField SolutionField::solve(const InitialData& data, const FrontierOptions& options) {
  RiemannPair pair = decompose(data);
  ContactCurve curve = negativity_frontier(pair, options);
  if (!curve.is_empty()) curve = classify(std::move(curve), pair, options.tol_slope);
  return SolutionField(std::move(pair), std::move(curve));
}

std::optional<std::pair<double, double>> SolutionField::cone_window(double x, double t) const {
  if (curve_.is_empty()) return std::nullopt;
  const PiecewiseLinear& tau = curve_.tau();
  if (t < tau(x)) return std::nullopt;
  const double zr = sup_level(tau, x, t + x);
  const double zl = -sup_level(*tau_mirror_, -x, t - x);
  return std::make_pair(zl, zr);
}

double eval_u(const SolutionField& field, double x, double t) {
  if (t < 0.0) throw InputError("eval_u: t must be non-negative");
  field.curve().require_in_window(x, t);
  const double w = eval_w(field.pair(), x, t);
  const auto window = field.cone_window(x, t);
  if (!window) return w;
  return w + 0.5 * field.measure().mass_between(window->first, window->second);
}

const char* to_string(Region r) {
  switch (r) {
    case Region::free:
      return "free";
    case Region::flipped_xi:
      return "flipped-xi";
    case Region::flipped_eta:
      return "flipped-eta";
    case Region::flipped_both:
      return "flipped-both";
  }
  return "?";
}

Transported transport_derivatives(const SolutionField& field, double x, double t) {
  if (t < 0.0) throw InputError("transport_derivatives: t must be non-negative");
  field.curve().require_in_window(x, t);
  const SidedDerivatives w = eval_w_derivatives(field.pair(), x, t);
  double eps_xi = 1.0;
  double eps_eta = 1.0;
  bool on_curve = false;
  if (const auto window = field.cone_window(x, t)) {
    const PiecewiseLinear& tau = field.curve().tau();
    const auto [zl, zr] = *window;
    if (tau(zr) > 0.0 && tau.slope_right(zr) < 1.0 - kSlopeTol) eps_xi = -1.0;
    if (tau(zl) > 0.0 && tau.slope_left(zl) > -1.0 + kSlopeTol) eps_eta = -1.0;
    on_curve = t - tau(x) <= 1e-12 * (1.0 + std::abs(t));
  }
  const double fl = w.left.w_xi / std::numbers::sqrt2;
  const double fr = w.right.w_xi / std::numbers::sqrt2;
  const double gl = -w.left.w_eta / std::numbers::sqrt2;
  const double gr = -w.right.w_eta / std::numbers::sqrt2;
  Transported out;
  out.left = make_gradient(fl, gl, eps_xi, eps_eta);
  out.right = make_gradient(fr, gr, eps_xi, eps_eta);
  out.one_sided = w.one_sided || on_curve;
  if (eps_xi < 0.0 && eps_eta < 0.0) {
    out.region = Region::flipped_both;
  } else if (eps_xi < 0.0) {
    out.region = Region::flipped_xi;
  } else if (eps_eta < 0.0) {
    out.region = Region::flipped_eta;
  }
  return out;
}

LipschitzNorms lipschitz_norms(const SolutionField& field, double t,
                               std::optional<std::pair<double, double>> interval) {
  if (t < 0.0) throw InputError("lipschitz_norms: t must be non-negative");
  const auto [lo, hi] = default_interval(field, interval);
  const PiecewiseConstant fp = field.pair().f.derivative();
  const PiecewiseConstant gp = field.pair().g.derivative();
  LipschitzNorms n;
  n.plus = 2.0 * sup_abs_on(fp, lo + t, hi + t);
  n.minus = 2.0 * sup_abs_on(gp, lo - t, hi - t);
  std::vector<double> cuts{lo, hi};
  for (double s : fp.knots_in(lo + t, hi + t)) cuts.push_back(s - t);
  for (double s : gp.knots_in(lo - t, hi - t)) cuts.push_back(s + t);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] - cuts[i] > 1e-12 * (1.0 + std::abs(cuts[i])))) continue;
    const double x = 0.5 * (cuts[i] + cuts[i + 1]);
    const double a = fp(x + t);
    const double b = gp(x - t);
    n.grad = std::max(n.grad, std::sqrt(2.0 * (a * a + b * b)));
  }
  return n;
}

double energy(const SolutionField& field, double t,
              std::optional<std::pair<double, double>> interval) {
  if (t < 0.0) throw InputError("energy: t must be non-negative");
  const auto [lo, hi] = default_interval(field, interval);
  // u_x^2 + u_t^2 = 2 f'(x + t)^2 + 2 g'(x - t)^2 whatever the signs.
  return 2.0 * integral_of_square(field.pair().f.derivative(), lo + t, hi + t) +
         2.0 * integral_of_square(field.pair().g.derivative(), lo - t, hi - t);
}

std::pair<double, double> reflection_check(const SolutionField& field, double x, double dt) {
  if (!(dt > 0.0)) throw InputError("reflection_check: dt must be positive");
  if (field.curve().is_empty()) throw InputError("reflection_check: no contact");
  const PiecewiseLinear& tau = field.curve().tau();
  const double t0 = tau(x);
  const double kl = tau.slope_left(x);
  const double kr = tau.slope_right(x);
  if (!(t0 > 0.0) || std::abs(kl) >= 1.0 - kSlopeTol || std::abs(kr) >= 1.0 - kSlopeTol) {
    throw InputError("reflection_check: x is not an active contact point (grazing along a "
                     "characteristic or at t = 0); the velocity does not flip there");
  }
  if (t0 - dt < 0.0) throw InputError("reflection_check: dt exceeds the contact time");
  const double before = transport_derivatives(field, x, t0 - dt).right.u_t;
  const double after = transport_derivatives(field, x, t0 + dt).right.u_t;
  return {before, after};
}

void write_field_csv(const SolutionField& field, const std::vector<double>& xs,
                     const std::vector<double>& ts, std::ostream& out) {
  out << "x,t,u,u_x,u_t,region\n";
  out.precision(17);
  for (double t : ts) {
    for (double x : xs) {
      const Transported d = transport_derivatives(field, x, t);
      out << x << ',' << t << ',' << eval_u(field, x, t) << ',' << d.right.u_x << ','
          << d.right.u_t << ',' << to_string(d.region) << '\n';
    }
  }
}

}  // namespace obstacle
