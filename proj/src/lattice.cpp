#include "obstacle/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "obstacle/errors.hpp"

namespace obstacle {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint8_t kFree = 0;
constexpr std::uint8_t kLower = 1;
constexpr std::uint8_t kUpper = 2;

std::size_t grid_steps(double T, double dx) {
  return static_cast<std::size_t>(std::llround(T / dx));
}

bool commensurate(double P, double period) {
  const double r = P / period;
  return std::abs(r - std::round(r)) <= 1e-9 * r;
}

bool periodic_with(const PiecewiseLinear& f, double P) {
  if (f.is_periodic()) return f.drift() == 0.0 && commensurate(P, *f.period());
  const auto ys = f.ys();
  return f.left_slope() == 0.0 && f.right_slope() == 0.0 &&
         std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); });
}

bool periodic_with(const PiecewiseConstant& h, double P) {
  if (h.is_periodic()) return commensurate(P, *h.period());
  const auto vs = h.values();
  return h.left_value() == h.right_value() &&
         std::all_of(vs.begin(), vs.end(), [&](double v) { return v == h.left_value(); });
}

}  // namespace

const char* to_string(ContactKind kind) {
  return kind == ContactKind::lower ? "lower" : "upper";
}

LatticeState init(const InitialData& data, double dx, const LatticeDomain& domain,
                  const LatticeOptions& options) {
  const double restitution = options.restitution;
  if (!(dx > 0.0) || !std::isfinite(dx)) throw InputError("lattice: dx must be positive");
  if (!(restitution >= 0.0 && restitution <= 1.0)) {
    throw InputError("lattice: restitution must lie in [0, 1]");
  }
  LatticeState s;
  s.dx_ = dx;
  s.restitution_ = restitution;
  s.rule_ = options.rule;
  if (data.mode == ObstacleMode::twin) s.upper_ = 1.0;

  std::size_t n = 0;
  if (const auto* p = std::get_if<PeriodicDomain>(&domain)) {
    if (!(p->period > 0.0)) throw InputError("lattice: period must be positive");
    const double cells = p->period / dx;
    n = static_cast<std::size_t>(std::llround(cells));
    if (n < 3 || std::abs(cells - static_cast<double>(n)) > 1e-9 * cells) {
      std::ostringstream os;
      os << "lattice: period " << p->period << " is not a multiple of dx = " << dx;
      throw InputError(os.str());
    }
    s.periodic_ = true;
    s.origin_ = p->origin;
  } else {
    const auto& w = std::get<WindowDomain>(domain);
    if (!(w.b > w.a)) throw InputError("lattice: window needs a < b");
    n = static_cast<std::size_t>(std::floor((w.b - w.a) / dx + 1e-9)) + 1;
    if (n < 3) throw InputError("lattice: window holds fewer than 3 nodes");
    s.periodic_ = false;
    s.origin_ = w.a;
  }

  if (s.periodic_) {
    const double P = std::get<PeriodicDomain>(domain).period;
    if (!periodic_with(data.u0, P) || !periodic_with(data.u1, P)) {
      std::ostringstream os;
      os << "lattice: data is not " << P << "-periodic";
      throw InputError(os.str());
    }
  }

  // u1 only enters through its integral, so nodes sitting on a breakpoint do
  // not pick a side.
  const PiecewiseLinear U1 = antiderivative(data.u1, s.origin_);
  const bool exact = options.ghost == GhostLevel::dalembert;
  s.current_.resize(n);
  s.previous_.resize(n);
  s.scratch_.assign(n, 0.0);
  s.side_.assign(n, kFree);
  s.side_prev_.assign(n, kFree);
  s.side_scratch_.assign(n, kFree);
  s.first_contact_.assign(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s.x_at(i);
    s.current_[i] = data.u0(x);
    s.previous_[i] = exact ? 0.5 * (data.u0(x - dx) + data.u0(x + dx)) -
                                 0.5 * (U1(x + dx) - U1(x - dx))
                           : data.u0(x) - (U1(x + 0.5 * dx) - U1(x - 0.5 * dx));
  }
  s.lo_ = 0;
  s.hi_ = n - 1;
  return s;
}

void step(LatticeState& s) {
  const std::size_t n = s.current_.size();
  std::size_t lo = 0;
  std::size_t hi = n - 1;
  if (!s.periodic_) {
    if (s.lo_ + 2 > s.hi_) {
      throw InputError("lattice: step past the exactness horizon of the window");
    }
    lo = s.lo_ + 1;
    hi = s.hi_ - 1;
  }
  const double h = s.restitution_;
  const bool mirror = s.rule_ == ReflectionRule::mirror && h > 0.0;
  const double t_new = static_cast<double>(s.steps_ + 1) * s.dx_;
  const std::vector<double>& u = s.current_;
  const std::vector<double>& up = s.previous_;
  const std::vector<std::uint8_t>& side = s.side_;
  const std::vector<std::uint8_t>& side_prev = s.side_prev_;
  std::vector<double>& next = s.scratch_;
  std::vector<std::uint8_t>& side_next = s.side_scratch_;

  auto level = [&](std::uint8_t k) { return k == kLower ? 0.0 : *s.upper_; };
  // Free continuation of a node just reflected off obstacle k.
  auto unfold = [&](double v, std::uint8_t k) { return level(k) - (v - level(k)) / h; };
  auto coarse = [&](std::size_t i) {
    std::ostringstream os;
    os << "dx too coarse for data: node " << i << " at t = " << t_new
       << " crosses both obstacles in one step";
    throw EngineError(os.str());
  };

  for (std::size_t i = lo; i <= hi; ++i) {
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    const std::size_t r = i + 1 == n ? 0 : i + 1;
    side_next[i] = kFree;

    // A diamond whose bottom is on the approach side and whose sides have
    // just reflected straddles the contact: unfold the sides first.
    if (mirror && side_prev[i] == kFree && (side[l] != kFree || side[r] != kFree) &&
        (side[l] == kFree || side[r] == kFree || side[l] == side[r])) {
      const std::uint8_t k = side[l] != kFree ? side[l] : side[r];
      const double vl = side[l] == k ? unfold(u[l], k) : u[l];
      const double vr = side[r] == k ? unfold(u[r], k) : u[r];
      const double cs = vl + vr - up[i];
      const bool beyond = k == kLower ? cs < 0.0 : cs > level(k);
      if (beyond) {
        const double v = level(k) - h * (cs - level(k));
        if (v < 0.0 || (s.upper_ && v > *s.upper_)) coarse(i);
        next[i] = v;
        side_next[i] = k;
        if (std::isnan(s.first_contact_[i])) s.first_contact_[i] = t_new;
        continue;
      }
    }

    const double c = u[l] + u[r] - up[i];
    if (c < 0.0) {
      const double v = -h * c;
      if (s.upper_ && v > *s.upper_) coarse(i);
      next[i] = v;
      side_next[i] = kLower;
      s.events_.push_back({i, s.x_at(i), t_new, ContactKind::lower, (c - u[i]) / s.dx_});
    } else if (s.upper_ && c > *s.upper_) {
      const double v = *s.upper_ + h * (*s.upper_ - c);
      if (v < 0.0) coarse(i);
      next[i] = v;
      side_next[i] = kUpper;
      s.events_.push_back({i, s.x_at(i), t_new, ContactKind::upper, (c - u[i]) / s.dx_});
    } else {
      next[i] = c;
      continue;
    }
    if (std::isnan(s.first_contact_[i])) s.first_contact_[i] = t_new;
  }
  if (!s.periodic_) {
    for (std::size_t i = 0; i < lo; ++i) next[i] = kNaN;
    for (std::size_t i = hi + 1; i < n; ++i) next[i] = kNaN;
  }
  s.previous_.swap(s.current_);
  s.current_.swap(s.scratch_);
  s.side_prev_.swap(s.side_);
  s.side_.swap(s.side_scratch_);
  s.lo_ = lo;
  s.hi_ = hi;
  ++s.steps_;
}

ObservableRecord observe(const LatticeState& s) {
  ObservableRecord r;
  r.t = s.time();
  r.contacts = s.events().size();
  const auto& u = s.current();
  const auto& up = s.previous();
  const std::size_t n = u.size();
  const double dx = s.dx();
  r.umax = -std::numeric_limits<double>::infinity();
  r.umin = std::numeric_limits<double>::infinity();
  for (std::size_t i = s.first_valid(); i <= s.last_valid(); ++i) {
    r.umax = std::max(r.umax, u[i]);
    r.umin = std::min(r.umin, u[i]);
  }
  // Diagonal pairs (i, i + 1) inside the valid range, wrapping when periodic.
  const std::size_t pairs = s.periodic() ? n : s.last_valid() - s.first_valid();
  // A diagonal whose newer end was just folded while its older end was free
  // crosses the contact; it is read on the approach side.
  const double h = s.restitution_;
  auto newer = [&](std::size_t k, std::size_t older) {
    const std::uint8_t side = s.side_[k];
    if (side == kFree || s.side_prev_[older] != kFree || h == 0.0) return u[k];
    const double level = side == kLower ? 0.0 : *s.upper_;
    return level - (u[k] - level) / h;
  };
  for (std::size_t i = s.first_valid(); i < s.first_valid() + pairs; ++i) {
    const std::size_t j = i + 1 == n ? 0 : i + 1;
    const double a = (newer(j, i) - up[i]) / dx;
    const double b = (newer(i, j) - up[j]) / dx;
    r.energy += 0.5 * (a * a + b * b) * dx;
    r.lip_plus = std::max(r.lip_plus, std::abs(a));
    r.lip_minus = std::max(r.lip_minus, std::abs(b));
  }
  return r;
}

Snapshot snapshot(const LatticeState& s) {
  Snapshot snap;
  snap.t = s.time();
  for (std::size_t i = s.first_valid(); i <= s.last_valid(); ++i) {
    snap.x.push_back(s.x_at(i));
    snap.u.push_back(s.current()[i]);
  }
  return snap;
}

RunResult run(LatticeState& state, double T, std::size_t record_every,
              const std::vector<double>& snapshot_times) {
  if (!(T >= 0.0)) throw InputError("lattice: final time must be >= 0");
  if (record_every == 0) record_every = 1;
  const std::size_t target = grid_steps(T, state.dx());
  std::vector<std::size_t> snaps;
  for (double ts : snapshot_times) {
    if (ts < state.time() || ts > T) throw InputError("lattice: snapshot time outside [now, T]");
    snaps.push_back(grid_steps(ts, state.dx()));
  }
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

  RunResult out;
  auto next_snap = snaps.begin();
  auto take = [&](std::size_t k) {
    while (next_snap != snaps.end() && *next_snap == k) {
      out.snapshots.push_back(snapshot(state));
      ++next_snap;
    }
  };
  out.observables.push_back(observe(state));
  take(state.steps());
  while (state.steps() < target) {
    step(state);
    const std::size_t k = state.steps();
    if (k % record_every == 0 || k == target) out.observables.push_back(observe(state));
    take(k);
  }
  return out;
}

void write_snapshot_csv(const Snapshot& snap, std::ostream& out) {
  out << "x,u\n" << std::setprecision(17);
  for (std::size_t i = 0; i < snap.x.size(); ++i) out << snap.x[i] << ',' << snap.u[i] << '\n';
}

void write_observables_csv(const std::vector<ObservableRecord>& records, std::ostream& out) {
  out << "t,energy,lip_minus,lip_plus,umax,umin,contacts\n" << std::setprecision(17);
  for (const auto& r : records) {
    out << r.t << ',' << r.energy << ',' << r.lip_minus << ',' << r.lip_plus << ','
        << r.umax << ',' << r.umin << ',' << r.contacts << '\n';
  }
}

void write_events_csv(const std::vector<ContactEvent>& events, std::ostream& out) {
  out << "t,x,kind,velocity_before\n" << std::setprecision(17);
  for (const auto& e : events) {
    out << e.t << ',' << e.x << ',' << to_string(e.kind) << ',' << e.velocity_before << '\n';
  }
}

}  // namespace obstacle
