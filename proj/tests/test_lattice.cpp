#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/lattice.hpp"
#include "obstacle/schatzman.hpp"

using namespace obstacle;

namespace {

constexpr double kPi = std::numbers::pi;

double triangle(double t) { return std::abs(t - 2.0 * std::round(t / 2.0)); }

double sup_error(const LatticeState& s, const SolutionField& field, double xlo, double xhi) {
  double err = 0.0;
  for (std::size_t i = s.first_valid(); i <= s.last_valid(); ++i) {
    const double x = s.x_at(i);
    if (x < xlo || x > xhi) continue;
    err = std::max(err, std::abs(s.current()[i] - eval_u(field, x, s.time())));
  }
  return err;
}

// Total length of active contact inside [-2, 2]; contacts much shorter than
// dx are invisible to the lattice.
double active_length(const SolutionField& field) {
  if (field.curve().is_empty()) return 0.0;
  double len = 0.0;
  for (const auto& sg : field.curve().segments()) {
    if (sg.active) len += std::max(0.0, std::min(sg.x1, 2.0) - std::max(sg.x0, -2.0));
  }
  return len;
}

}  // namespace

TEST_CASE("init samples data and builds the ghost level") {
  const auto bounce = init(presets::constant(1.0, -1.0), 1e-3, PeriodicDomain{1.0});
  CHECK(bounce.size() == 1000);
  CHECK(bounce.time() == 0.0);
  for (std::size_t i = 0; i < bounce.size(); ++i) {
    CHECK(bounce.current()[i] == 1.0);
    CHECK(bounce.previous()[i] == doctest::Approx(1.001).epsilon(1e-14));
  }

  const LatticeOptions literal{1.0, ReflectionRule::mirror, GhostLevel::first_order};
  const auto hat = init(presets::hat(), 0.01, WindowDomain{-1.0, 1.0}, literal);
  CHECK(hat.size() == 201);
  for (std::size_t i = 0; i < hat.size(); ++i) CHECK(hat.previous()[i] == hat.current()[i]);
  CHECK(hat.x_at(100) == doctest::Approx(0.0).scale(1.0));
  // The d'Alembert ghost differs only at the kink, where it averages.
  const auto hat2 = init(presets::hat(), 0.01, WindowDomain{-1.0, 1.0});
  for (std::size_t i = 0; i < hat2.size(); ++i) {
    CHECK(hat2.previous()[i] == doctest::Approx(i == 100 ? 0.01 : hat2.current()[i]).scale(1.0));
  }

  const auto sine = init(presets::sine_velocity(), 2 * kPi / 8192, PeriodicDomain{2 * kPi});
  CHECK(sine.size() == 8192);

  // Ghost level uses the cell average of u1 around each node.
  const InitialData step_velocity{PiecewiseLinear::constant(1.0),
                                  PiecewiseConstant({0.0}, {}, -1.0, 1.0)};
  const auto s = init(step_velocity, 0.5, WindowDomain{-1.0, 1.0}, literal);
  CHECK(s.previous()[2] == doctest::Approx(1.0));
  CHECK(s.previous()[1] == doctest::Approx(1.5));
  const auto e = init(step_velocity, 0.5, WindowDomain{-1.0, 1.0});
  CHECK(e.previous()[2] == doctest::Approx(1.0));
  CHECK(e.previous()[1] == doctest::Approx(1.5));
  CHECK(e.previous()[3] == doctest::Approx(0.5));
}

TEST_CASE("init rejects bad parameters") {
  const auto d = presets::constant(1.0, 0.0);
  CHECK_THROWS_AS(init(d, 0.0, PeriodicDomain{1.0}), InputError);
  CHECK_THROWS_AS(init(d, -1e-3, PeriodicDomain{1.0}), InputError);
  CHECK_THROWS_AS(init(d, 0.3, PeriodicDomain{1.0}), InputError);
  CHECK_THROWS_AS(init(d, 0.1, PeriodicDomain{1.0}, {1.5}), InputError);
  CHECK_THROWS_AS(init(d, 0.1, WindowDomain{1.0, 1.0}), InputError);
  CHECK_THROWS_AS(init(presets::hat(), 0.1, PeriodicDomain{1.0}), InputError);
  CHECK_THROWS_AS(init(presets::sine_velocity(), 2 * kPi / 100, PeriodicDomain{kPi}), InputError);
  CHECK_NOTHROW(init(presets::sine_velocity(), 2 * kPi / 100, PeriodicDomain{4 * kPi}));
}

TEST_CASE("uniform fall bounces to |1 - t|") {
  auto s = init(presets::constant(1.0, -1.0), 1e-3, PeriodicDomain{1.0});
  const RunResult r = run(s, 3.0, 500, {0.5, 1.5});
  CHECK(s.steps() == 3000);
  CHECK(s.time() == doctest::Approx(3.0));
  for (double v : s.current()) CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.observables.back().umax == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.events().size() == s.size());
  for (const auto& e : s.events()) {
    CHECK(e.kind == ContactKind::lower);
    CHECK(e.velocity_before == doctest::Approx(-1.0).epsilon(1e-6));
  }
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].u[7] == doctest::Approx(0.5));
  CHECK(r.snapshots[1].u[7] == doctest::Approx(0.5));
  CHECK(r.snapshots[1].t == doctest::Approx(1.5));
  // 3000 steps recorded every 500 plus the initial record.
  CHECK(r.observables.size() == 7);
  for (const auto& o : r.observables) CHECK(o.energy == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("contact between grid times keeps the full impulse") {
  // Contact at t = 0.7 / 0.9, off the grid.
  for (auto [rule, tol] : {std::pair{ReflectionRule::mirror, 1e-9},
                           std::pair{ReflectionRule::instantaneous, -1.0}}) {
    auto s = init(presets::constant(0.7, -0.9), 0.02, PeriodicDomain{1.0}, {1.0, rule});
    run(s, 3.0);
    const double exact = std::abs(0.7 - 0.9 * s.time());
    const double err = std::abs(s.current()[0] - exact);
    if (tol > 0) {
      CHECK(err <= tol);
    } else {
      CHECK(err > 1e-3);
    }
  }
}

TEST_CASE("double obstacle gives the period 2 triangle wave") {
  auto d = presets::constant(0.0, 1.0);
  d.mode = ObstacleMode::twin;
  auto s = init(d, 1e-3, PeriodicDomain{1.0});
  double err = 0.0;
  while (s.time() < 9.0) {
    step(s);
    for (double v : s.current()) err = std::max(err, std::abs(v - triangle(s.time())));
  }
  CHECK(err <= 5e-3);
  CHECK(err <= 1e-9);
  bool upper = false;
  for (const auto& e : s.events()) upper = upper || e.kind == ContactKind::upper;
  CHECK(upper);

  // Off-grid turning times.
  auto d2 = presets::constant(0.3, 0.85);
  d2.mode = ObstacleMode::twin;
  auto s2 = init(d2, 0.01, PeriodicDomain{1.0});
  run(s2, 7.0);
  CHECK(std::abs(s2.current()[3] - triangle(0.3 + 0.85 * s2.time())) <= 1e-9);
}

TEST_CASE("coarse lattice aborts on a double reflection") {
  auto d = presets::constant(0.5, -2.0);
  d.mode = ObstacleMode::twin;
  auto s = init(d, 1.0, PeriodicDomain{3.0});
  try {
    step(s);
    FAIL("expected EngineError");
  } catch (const EngineError& e) {
    CHECK(std::string(e.what()).find("dx too coarse for data") != std::string::npos);
  }
}

TEST_CASE("free waves propagate exactly") {
  // Grid-aligned PL displacement, zero velocity, no contact.
  const InitialData d{PiecewiseLinear({-0.5, -0.1, 0.2, 0.6}, {0.3, 0.9, 0.4, 0.3}, 0.0, 0.0),
                      PiecewiseConstant::constant(0.0)};
  {
    // Off-grid breakpoints and a velocity: still exact with the d'Alembert ghost.
    std::mt19937_64 rng(3);
    const InitialData q = testgen::aperiodic(rng, 0.6);
    const RiemannPair qp = decompose(q);
    auto s = init(q, 0.0123, WindowDomain{-3.0, 3.0});
    run(s, 0.4);
    REQUIRE(s.events().empty());
    for (std::size_t i = s.first_valid(); i <= s.last_valid(); ++i) {
      CHECK(s.current()[i] == doctest::Approx(eval_w(qp, s.x_at(i), s.time())).epsilon(1e-12).scale(1.0));
    }
  }
  const RiemannPair pair = decompose(d);
  auto s = init(d, 0.01, WindowDomain{-2.0, 2.0});
  const RunResult r = run(s, 1.5, 10);
  CHECK(s.events().empty());
  for (std::size_t i = s.first_valid(); i <= s.last_valid(); ++i) {
    CHECK(s.current()[i] == doctest::Approx(eval_w(pair, s.x_at(i), s.time())).epsilon(1e-12).scale(1.0));
  }
  // Half-width of the valid range shrinks by one node per step.
  CHECK(s.first_valid() == 150);
  CHECK(s.last_valid() == 250);
  CHECK(std::isnan(s.current()[0]));
  CHECK_THROWS_AS(run(s, 5.0), InputError);
  CHECK(r.observables.size() == 16);

  // The hat never touches: no events, exact free wave.
  auto hat = init(presets::hat(), 0.01, WindowDomain{-3.0, 3.0});
  run(hat, 2.0);
  CHECK(hat.events().empty());
  const RiemannPair hp = decompose(presets::hat());
  for (std::size_t i = hat.first_valid(); i <= hat.last_valid(); ++i) {
    CHECK(hat.current()[i] == doctest::Approx(eval_w(hp, hat.x_at(i), hat.time())).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("run at T = 0 records the initial state only") {
  auto s = init(presets::constant(1.0, -1.0), 0.1, PeriodicDomain{1.0});
  const RunResult r = run(s, 0.0, 1, {0.0});
  CHECK(r.observables.size() == 1);
  CHECK(r.snapshots.size() == 1);
  CHECK(s.steps() == 0);
  CHECK(r.observables[0].lip_plus == doctest::Approx(1.0));
  CHECK(r.observables[0].lip_minus == doctest::Approx(1.0));
  CHECK_THROWS_AS(run(s, -1.0), InputError);
  CHECK_THROWS_AS(run(s, 1.0, 1, {2.0}), InputError);
}

TEST_CASE("discrete invariants without contact") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    // Heights in [0.6, 1] with |u1| <= 0.2 times a short time never reach 0.
    InitialData d = testgen::periodic(rng, 0.6);
    std::vector<double> vs(d.u1.values().begin(), d.u1.values().end());
    for (double& v : vs) v *= 0.1;
    d.u1 = PiecewiseConstant::periodic(std::vector<double>(d.u1.xs().begin(), d.u1.xs().end()), vs);
    auto s = init(d, 2.0 / 1000, PeriodicDomain{2.0});
    const RunResult r = run(s, 1.0, 50);
    REQUIRE(s.events().empty());
    for (const auto& o : r.observables) {
      CHECK(o.energy == doctest::Approx(r.observables[0].energy).epsilon(1e-12));
      CHECK(o.lip_plus == doctest::Approx(r.observables[0].lip_plus).epsilon(1e-12));
      CHECK(o.lip_minus == doctest::Approx(r.observables[0].lip_minus).epsilon(1e-12));
    }
  }
}

TEST_CASE("lattice converges to the exact solution") {
  std::mt19937_64 rng(5);
  int used = 0;
  for (int trial = 0; trial < 60 && used < 6; ++trial) {
    const InitialData d = testgen::aperiodic(rng);
    FrontierOptions fo;
    fo.window = AnalysisWindow{-2.0, 2.0, 2.0};
    const SolutionField field = SolutionField::solve(d, fo);
    if (active_length(field) < 0.1) continue;
    ++used;
    double coarse = 0.0;
    double fine = 0.0;
    for (double dx : {4e-3, 5e-4}) {
      auto s = init(d, dx, WindowDomain{-4.0, 4.0});
      run(s, 2.0, 1000);
      (dx > 1e-3 ? coarse : fine) = sup_error(s, field, -1.5, 1.5);
      // Bounds and first contact against tau.
      for (std::size_t i = s.first_valid(); i <= s.last_valid(); ++i) {
        CHECK(s.current()[i] >= -1e-12);
        const double fc = s.first_contact()[i];
        const double x = s.x_at(i);
        if (!std::isnan(fc) && std::abs(x) < 1.5) CHECK(fc >= field.curve().tau()(x) - 2 * dx - 1e-12);
      }
    }
    INFO("trial ", trial, " coarse ", coarse, " fine ", fine);
    CHECK(fine <= 1e-2);
    // Three halvings. The constant of the first-order error moves with the
    // sub-cell position of the contact ends, so only the overall rate is pinned.
    CHECK(coarse / fine >= 2.7);
  }
  CHECK(used == 6);
}

TEST_CASE("first contact per column matches tau") {
  const SolutionField& field = [] () -> const SolutionField& {
    static const SolutionField f = SolutionField::solve(presets::sine_velocity());
    return f;
  }();
  const double dx = 2 * kPi / 8192;
  auto s = init(presets::sine_velocity(), dx, PeriodicDomain{2 * kPi});
  run(s, 2 * kPi, 100000);
  int checked = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s.x_at(i);
    const double fc = s.first_contact()[i];
    const double tau = field.curve().tau()(x);
    if (std::isnan(fc)) {
      // Columns never reached only where tau is on a characteristic.
      continue;
    }
    ++checked;
    CHECK(std::abs(fc - tau) <= 2 * dx + 1e-12);
  }
  CHECK(checked > 1000);
  CHECK(sup_error(s, field, -10.0, 10.0) <= 2e-2);
}

TEST_CASE("periodic conservation with and without loss") {
  const double dx = 2 * kPi / 4096;
  auto s = init(presets::sine_velocity(), dx, PeriodicDomain{2 * kPi});
  const RunResult r = run(s, 30.0, 200);
  const double e0 = r.observables.front().energy;
  for (const auto& o : r.observables) {
    CHECK(std::abs(o.energy - e0) <= 10 * dx * e0);
    CHECK(std::abs(o.lip_plus - r.observables.front().lip_plus) <= 2 * dx);
    CHECK(std::abs(o.lip_minus - r.observables.front().lip_minus) <= 2 * dx);
    CHECK(o.umin >= -1e-12);
  }

  auto lossy = init(presets::sine_velocity(), dx, PeriodicDomain{2 * kPi}, {0.5});
  const RunResult q = run(lossy, 30.0, 1);
  int drops = 0;
  for (std::size_t k = 1; k < q.observables.size(); ++k) {
    CHECK(q.observables[k].energy <= q.observables[k - 1].energy * (1 + 1e-10));
    if (q.observables[k].contacts > q.observables[k - 1].contacts &&
        q.observables[k].energy < q.observables[k - 1].energy * (1 - 1e-9)) {
      ++drops;
    }
  }
  CHECK(drops >= 1);
  CHECK(q.observables.back().energy < 0.9 * q.observables.front().energy);
}

TEST_CASE("random double-obstacle data stays between the obstacles") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const InitialData d = testgen::twin(rng);
    auto s = init(d, 2.0 / 2000, PeriodicDomain{2.0});
    const RunResult r = run(s, 6.0, 20);
    for (const auto& o : r.observables) {
      CHECK(o.umin >= -1e-12);
      CHECK(o.umax <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("CSV writers") {
  auto s = init(presets::constant(1.0, -1.0), 0.25, PeriodicDomain{1.0});
  const RunResult r = run(s, 1.25, 5, {0.25});
  std::ostringstream snap;
  write_snapshot_csv(r.snapshots.at(0), snap);
  CHECK(snap.str() == "x,u\n0,0.75\n0.25,0.75\n0.5,0.75\n0.75,0.75\n");
  std::ostringstream obs;
  write_observables_csv(r.observables, obs);
  CHECK(obs.str().rfind("t,energy,lip_minus,lip_plus,umax,umin,contacts\n0,1,1,1,1,1,0\n", 0) == 0);
  std::ostringstream ev;
  write_events_csv(s.events(), ev);
  CHECK(ev.str().rfind("t,x,kind,velocity_before\n", 0) == 0);
  CHECK(ev.str().find(",lower,") != std::string::npos);
}
