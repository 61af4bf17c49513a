#include "obstacle/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "obstacle/errors.hpp"

namespace obstacle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kBlock = 64;

struct Pt {
  double s1;
  double s2;
};
using Poly = std::vector<Pt>;

// Sutherland-Hodgman against the half plane value(p) <= 0.
template <typename V>
Poly clip(const Poly& in, V value) {
  Poly out;
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& a = in[i];
    const Pt& b = in[(i + 1) % n];
    const double va = value(a);
    const double vb = value(b);
    if (va <= 0.0) out.push_back(a);
    if ((va < 0.0 && vb > 0.0) || (va > 0.0 && vb < 0.0)) {
      const double r = va / (va - vb);
      out.push_back({a.s1 + r * (b.s1 - a.s1), a.s2 + r * (b.s2 - a.s2)});
    }
  }
  return out;
}

// Running minimum of the lower boundary of a convex polygon, held flat up
// to s1 = q. Points have increasing s1 and non-increasing s2.
Poly lower_piece(Poly poly, double q) {
  std::sort(poly.begin(), poly.end(), [](const Pt& a, const Pt& b) {
    return a.s1 < b.s1 || (a.s1 == b.s1 && a.s2 < b.s2);
  });
  Poly hull;
  for (const Pt& p : poly) {
    while (hull.size() >= 2) {
      const Pt& o = hull[hull.size() - 2];
      const Pt& a = hull.back();
      const double cross = (a.s1 - o.s1) * (p.s2 - o.s2) - (a.s2 - o.s2) * (p.s1 - o.s1);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  std::size_t lowest = 0;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    if (hull[i].s2 < hull[lowest].s2) lowest = i;
  }
  hull.resize(lowest + 1);
  if (hull.back().s1 < q) hull.push_back({q, hull.back().s2});
  return hull;
}

double piece_at(const Poly& piece, double s) {
  if (s < piece.front().s1) return kInf;
  if (s >= piece.back().s1) return piece.back().s2;
  auto it = std::upper_bound(piece.begin(), piece.end(), s,
                             [](double v, const Pt& p) { return v < p.s1; });
  const Pt& b = *it;
  const Pt& a = *(it - 1);
  const double w = b.s1 - a.s1;
  if (w <= 0.0) return std::min(a.s2, b.s2);
  return a.s2 + (b.s2 - a.s2) * (s - a.s1) / w;
}

// Left limit at s: only pieces that started strictly before s count.
double piece_left(const Poly& piece, double s) {
  if (!(s > piece.front().s1)) return kInf;
  return piece_at(piece, s);
}

// Lower envelope of non-increasing pieces over [p, q], together with the
// level y0 carried in from the left. Appends its vertices to `out`.
void emit_envelope(double p, double q, double y0, std::vector<Poly>& pieces,
                   Poly& out) {
  for (Poly& piece : pieces) {
    for (Pt& pt : piece) pt.s1 = std::clamp(pt.s1, p, q);
  }
  pieces.push_back({{p, y0}, {q, y0}});

  std::vector<double> cuts{p, q};
  struct Seg {
    Pt a;
    Pt b;
    std::size_t owner;
  };
  std::vector<Seg> segs;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (const Pt& pt : pieces[i]) cuts.push_back(pt.s1);
    for (std::size_t j = 0; j + 1 < pieces[i].size(); ++j) {
      if (pieces[i][j + 1].s1 > pieces[i][j].s1) {
        segs.push_back({pieces[i][j], pieces[i][j + 1], i});
      }
    }
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      if (segs[i].owner == segs[j].owner) continue;
      const double lo = std::max(segs[i].a.s1, segs[j].a.s1);
      const double hi = std::min(segs[i].b.s1, segs[j].b.s1);
      if (!(hi > lo)) continue;
      auto val = [](const Seg& s, double x) {
        return s.a.s2 + (s.b.s2 - s.a.s2) * (x - s.a.s1) / (s.b.s1 - s.a.s1);
      };
      const double dlo = val(segs[i], lo) - val(segs[j], lo);
      const double dhi = val(segs[i], hi) - val(segs[j], hi);
      if ((dlo < 0.0 && dhi > 0.0) || (dlo > 0.0 && dhi < 0.0)) {
        cuts.push_back(lo + (hi - lo) * dlo / (dlo - dhi));
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (double s : cuts) {
    double left = (s == p) ? y0 : kInf;
    double value = kInf;
    for (const Poly& piece : pieces) {
      left = std::min(left, piece_left(piece, s));
      value = std::min(value, piece_at(piece, s));
    }
    if (left > value && std::isfinite(left)) out.push_back({s, left});
    out.push_back({s, value});
  }
}

struct BoxResult {
  bool found = false;
  Poly frontier;
};

// Frontier of the forward cones of E restricted to the box of influence of
// x in [xa, xb], t in [0, T].
BoxResult box_frontier(const RiemannPair& pair, double xa, double xb, double T,
                       double negtol) {
  const double L1 = xa - T;
  const double H1 = xb + T;
  const double L2 = -(xb + T);
  const double H2 = T - xa;

  std::vector<double> cols{L1, H1};
  for (double s : pair.f.knots_in(L1, H1)) cols.push_back(s);
  std::vector<double> rows{L2, H2};
  for (double s : pair.g.knots_in(-H2, -L2)) rows.push_back(-s);
  const double scale = std::max({1.0, std::abs(L1), std::abs(H1), std::abs(L2), std::abs(H2)});
  const double gap = 1e-13 * scale;
  auto tidy = [gap](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out{v.front()};
    for (double x : v) {
      if (x - out.back() > gap) out.push_back(x);
    }
    out.back() = v.back();
    v = std::move(out);
  };
  tidy(cols);
  tidy(rows);
  if (cols.size() < 2 || rows.size() < 2) return {};

  std::vector<double> av(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) av[j] = pair.f(cols[j]);
  std::vector<double> bv(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) bv[k] = pair.g(-rows[k]);
  const std::size_t nrows = rows.size() - 1;
  std::vector<double> block_min((nrows + kBlock - 1) / kBlock, kInf);
  for (std::size_t k = 0; k < nrows; ++k) {
    double& m = block_min[k / kBlock];
    m = std::min({m, bv[k], bv[k + 1]});
  }

  BoxResult result;
  Poly& fr = result.frontier;
  fr.push_back({L1, H2});
  std::vector<Poly> pieces;

  for (std::size_t j = 0; j + 1 < cols.size(); ++j) {
    const double p = cols[j];
    const double q = cols[j + 1];
    const double ap = av[j];
    const double aq = av[j + 1];
    const double amin = std::min(ap, aq);
    const double da = (aq - ap) / (q - p);
    const double y0 = fr.back().s2;
    double limit = y0;
    pieces.clear();

    auto first = std::upper_bound(rows.begin(), rows.end(), -q);
    std::size_t k = first == rows.begin() ? 0 : static_cast<std::size_t>(first - rows.begin()) - 1;
    while (k < nrows && rows[k] < limit) {
      if (k % kBlock == 0 && block_min[k / kBlock] + amin >= -negtol) {
        k += kBlock;
        continue;
      }
      if (std::min(bv[k], bv[k + 1]) + amin >= -negtol) {
        ++k;
        continue;
      }
      const double r0 = rows[k];
      const double r1 = rows[k + 1];
      const double b0 = bv[k];
      const double db = (bv[k + 1] - b0) / (r1 - r0);
      auto A = [=](const Pt& x) { return ap + da * (x.s1 - p) + b0 + db * (x.s2 - r0); };
      Poly cell = clip(Poly{{p, r0}, {q, r0}, {q, r1}, {p, r1}},
                       [](const Pt& x) { return -(x.s1 + x.s2); });
      double lowest = kInf;
      for (const Pt& v : cell) lowest = std::min(lowest, A(v));
      ++k;
      if (!(lowest < -negtol)) continue;
      Poly neg = clip(cell, A);
      if (neg.empty()) continue;
      pieces.push_back(lower_piece(std::move(neg), q));
      result.found = true;
      if (pieces.back().front().s1 <= p + gap) limit = std::min(limit, pieces.back().front().s2);
    }
    if (!pieces.empty()) emit_envelope(p, q, y0, pieces, fr);
  }
  if (fr.back().s1 < H1) fr.push_back({H1, fr.back().s2});
  fr.push_back({H1, -H1});

  // Monotone clean-up of rounding noise.
  Poly clean{fr.front()};
  for (std::size_t i = 1; i < fr.size(); ++i) {
    Pt pt{std::max(fr[i].s1, clean.back().s1), std::min(fr[i].s2, clean.back().s2)};
    if (pt.s1 - clean.back().s1 <= gap && clean.back().s2 - pt.s2 <= gap) {
      if (i + 1 == fr.size()) clean.back() = pt;
      continue;
    }
    clean.push_back(pt);
  }
  result.frontier = std::move(clean);
  return result;
}

PiecewiseLinear tau_from_frontier(const Poly& fr, double gap) {
  std::vector<double> xs;
  std::vector<double> ts;
  for (const Pt& v : fr) {
    const double x = 0.5 * (v.s1 - v.s2);
    double t = std::max(0.0, 0.5 * (v.s1 + v.s2));
    if (!xs.empty()) {
      if (x - xs.back() <= gap) continue;
      const double dx = x - xs.back();
      t = std::clamp(t, ts.back() - dx, ts.back() + dx);
    }
    xs.push_back(x);
    ts.push_back(t);
  }
  if (xs.size() < 2) throw EngineError("negativity_frontier: degenerate frontier");
  return PiecewiseLinear(std::move(xs), std::move(ts), 0.0, 0.0);
}

std::vector<FrontierVertex> to_characteristic(const Poly& fr) {
  std::vector<FrontierVertex> out;
  out.reserve(fr.size());
  for (const Pt& v : fr) {
    out.push_back({v.s1 / std::numbers::sqrt2, v.s2 / std::numbers::sqrt2});
  }
  return out;
}

std::string segment_text(const ContactSegment& s) {
  std::ostringstream os;
  os << "[" << s.x0 << ", " << s.x1 << "] (slope " << s.slope << ")";
  return os.str();
}

}  // namespace

ContactCurve ContactCurve::empty(std::optional<AnalysisWindow> window,
                                 std::optional<double> period) {
  ContactCurve c;
  c.window_ = window;
  c.period_ = period;
  return c;
}

ContactCurve ContactCurve::from_tau(PiecewiseLinear tau,
                                    std::optional<AnalysisWindow> window,
                                    double tol_slope) {
  constexpr double kTol = 1e-12;
  if (tau.is_periodic()) {
    if (std::abs(tau.drift()) > kTol) throw InputError("sigma must not drift");
  } else {
    if (tau.left_slope() > kTol || tau.left_slope() < -1.0 - kTol ||
        tau.right_slope() < -kTol || tau.right_slope() > 1.0 + kTol) {
      throw InputError("sigma: extension slopes must keep sigma >= 0 and |sigma'| <= 1");
    }
  }
  const auto xs = tau.xs();
  const auto ys = tau.ys();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] < -kTol) throw InputError("sigma must be non-negative");
    if (i + 1 < xs.size()) {
      const double k = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
      if (std::abs(k) > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "sigma: |slope| > 1 on [" << xs[i] << ", " << xs[i + 1] << "]";
        throw InputError(os.str());
      }
    }
  }
  ContactCurve c;
  c.empty_ = false;
  c.period_ = tau.period();
  c.window_ = window;
  c.tau_ = std::move(tau);
  c.set_activity(tol_slope);
  return c;
}

const PiecewiseLinear& ContactCurve::tau() const {
  if (empty_) throw InputError("contact curve is empty");
  return tau_;
}

PiecewiseConstant ContactCurve::tau_slope() const { return tau().derivative(); }

void ContactCurve::require_in_window(double x, double t) const {
  if (!window_) return;
  const double slack = 1e-12 * (1.0 + std::abs(window_->x_min) + std::abs(window_->x_max));
  if (x < window_->x_min - slack || x > window_->x_max + slack ||
      t > window_->t_max + slack) {
    std::ostringstream os;
    os << "(" << x << ", " << t << ") lies outside the analysis window x in ["
       << window_->x_min << ", " << window_->x_max << "], t <= " << window_->t_max;
    throw InputError(os.str());
  }
}

void ContactCurve::set_activity(double tol_slope) {
  segments_.clear();
  if (empty_) return;
  std::vector<double> xs;
  if (period_) {
    const double x0 = tau_.xs().front();
    xs = tau_.knots_in(x0, x0 + *period_);
    if (xs.empty() || xs.back() < x0 + *period_) xs.push_back(x0 + *period_);
  } else {
    xs.assign(tau_.xs().begin(), tau_.xs().end());
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    ContactSegment s;
    s.x0 = xs[i];
    s.x1 = xs[i + 1];
    s.tau0 = tau_(s.x0);
    s.tau1 = tau_(s.x1);
    s.slope = (s.tau1 - s.tau0) / (s.x1 - s.x0);
    s.active = std::abs(s.slope) < 1.0 - tol_slope && s.tau0 + s.tau1 > 0.0;
    segments_.push_back(s);
  }
}

ContactCurve negativity_frontier(const RiemannPair& pair, const FrontierOptions& options) {
  const double negtol = options.negativity_tol;
  if (pair.f.is_periodic() && pair.g.is_periodic()) {
    const double P = *pair.f.period();
    const double x0 = pair.f.xs().front();
    const double xb = x0 + P;
    const double gap = 1e-13 * std::max(1.0, std::abs(x0) + P);
    double T = P;
    for (int attempt = 0; attempt < 40; ++attempt, T *= 2.0) {
      BoxResult box = box_frontier(pair, x0, xb, T, negtol);
      if (!box.found) {
        // Non-negative drift makes w(x, t + P) >= w(x, t): nothing ever goes
        // negative once a full period of t has been scanned.
        if (pair.f.drift() >= 0.0 && T >= P) return ContactCurve::empty({}, P);
        continue;
      }
      const PiecewiseLinear tb = tau_from_frontier(box.frontier, gap);
      if (extremum_on_interval(tb, x0, xb, Extremum::max).y >= T * (1.0 - 1e-9)) continue;
      std::vector<double> xs{x0};
      for (double x : tb.knots_in(x0, xb)) {
        if (x - xs.back() > gap && xb - x > gap) xs.push_back(x);
      }
      xs.push_back(xb);
      std::vector<double> ys;
      for (double x : xs) ys.push_back(tb(x));
      if (std::abs(ys.back() - ys.front()) > 1e-9 * (1.0 + std::abs(ys.front()))) {
        throw EngineError("negativity_frontier: contact curve failed to close over one period");
      }
      ys.back() = ys.front();
      ContactCurve curve = ContactCurve::from_tau(PiecewiseLinear::periodic(xs, ys));
      curve.set_frontier(to_characteristic(box.frontier));
      return curve;
    }
    throw EngineError("negativity_frontier: contact time did not stabilize");
  }
  if (!options.window) {
    throw InputError("negativity_frontier: aperiodic data needs an analysis window");
  }
  const AnalysisWindow& win = *options.window;
  if (!(win.x_max > win.x_min) || !(win.t_max > 0.0)) {
    throw InputError("negativity_frontier: analysis window must have x_min < x_max, t_max > 0");
  }
  BoxResult box = box_frontier(pair, win.x_min, win.x_max, win.t_max, negtol);
  if (!box.found) return ContactCurve::empty(win);
  const double gap = 1e-13 * std::max({1.0, std::abs(win.x_min), std::abs(win.x_max), win.t_max});
  ContactCurve curve = ContactCurve::from_tau(tau_from_frontier(box.frontier, gap), win);
  curve.set_frontier(to_characteristic(box.frontier));
  return curve;
}

ContactCurve classify(ContactCurve curve, const RiemannPair& pair, double tol_slope,
                      double tol) {
  if (curve.is_empty()) throw InputError("classify: contact curve is empty");
  curve.set_activity(tol_slope);
  const PiecewiseLinear& tau = curve.tau();
  for (const ContactSegment& s : curve.segments()) {
    if (!s.active) continue;
    const double k = s.slope;
    std::vector<double> cuts{s.x0, s.x1};
    for (double v : pair.f.knots_in(s.x0 + s.tau0, s.x1 + s.tau1)) {
      cuts.push_back(s.x0 + (v - (s.x0 + s.tau0)) / (1.0 + k));
    }
    for (double v : pair.g.knots_in(s.x0 - s.tau0, s.x1 - s.tau1)) {
      cuts.push_back(s.x0 + (v - (s.x0 - s.tau0)) / (1.0 - k));
    }
    std::sort(cuts.begin(), cuts.end());
    const double len = s.x1 - s.x0;
    const double slack = tol_slope + 1e-13 * (1.0 + std::abs(s.x0) + std::abs(s.x1)) / len;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      // Slivers next to a knot would sample the neighbouring cell.
      if (!(cuts[i + 1] - cuts[i] > 1e-9 * (1.0 + std::abs(cuts[i])))) continue;
      const double xm = 0.5 * (cuts[i] + cuts[i + 1]);
      const double tm = tau(xm);
      const WaveDerivatives d = eval_w_derivatives(pair, xm, tm).right;
      const double w = eval_w(pair, xm, tm);
      std::string why;
      if (std::abs(w) > tol) {
        why = "w = " + std::to_string(w) + " on the curve";
      } else if (d.w_t > tol) {
        why = "w_t = " + std::to_string(d.w_t) + " > 0 at contact";
      } else if (std::abs(d.w_t) > tol && std::abs(k + d.w_x / d.w_t) > slack) {
        why = "tau' = " + std::to_string(k) + " but -w_x/w_t = " +
              std::to_string(-d.w_x / d.w_t);
      }
      if (!why.empty()) {
        throw EngineError("classify: active segment " + segment_text(s) + ": " + why);
      }
    }
  }
  return curve;
}

Membership influence_membership(const ContactCurve& curve, double x, double t, double tol) {
  curve.require_in_window(x, t);
  if (curve.is_empty()) return Membership::outside;
  const double d = t - curve.tau()(x);
  if (std::abs(d) <= tol) return Membership::boundary;
  return d > 0.0 ? Membership::inside : Membership::outside;
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::inside:
      return "inside";
    case Membership::outside:
      return "outside";
    case Membership::boundary:
      return "boundary";
  }
  return "?";
}

void write_curve_csv(const ContactCurve& curve, std::ostream& out) {
  out << "x,tau,tau_slope,active\n";
  if (curve.is_empty()) return;
  const auto& segs = curve.segments();
  out.precision(17);
  for (const ContactSegment& s : segs) {
    out << s.x0 << ',' << s.tau0 << ',' << s.slope << ',' << (s.active ? 1 : 0) << '\n';
  }
  if (!segs.empty()) {
    const ContactSegment& last = segs.back();
    out << last.x1 << ',' << last.tau1 << ','
        << (curve.period() ? segs.front().slope : curve.tau().right_slope()) << ','
        << (curve.period() && segs.front().active ? 1 : 0) << '\n';
  }
}

}  // namespace obstacle
