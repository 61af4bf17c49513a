#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/schatzman.hpp"

using namespace obstacle;

namespace {

constexpr double kPi = std::numbers::pi;
const AnalysisWindow kWin{-2.0, 2.0, 3.0};

const SolutionField& sine_field() {
  static const SolutionField field = SolutionField::solve(presets::sine_velocity());
  return field;
}

// u = w - integral over {t - tau(z) >= |x - z|} of (1 - tau'^2) w_t(z, tau(z)),
// by brute-force midpoint quadrature on a uniform z grid.
double quadrature_u(const SolutionField& field, double x, double t, int n) {
  const PiecewiseLinear& tau = field.curve().tau();
  double sum = 0.0;
  const double h = 2.0 * t / n;
  for (int i = 0; i < n; ++i) {
    const double z = x - t + (i + 0.5) * h;
    const double tz = tau(z);
    if (t - tz < std::abs(x - z) || !(tz > 0.0)) continue;
    const double k = tau.slope_right(z);
    sum += (1.0 - k * k) * eval_w_derivatives(field.pair(), z, tz).right.w_t * h;
  }
  return eval_w(field.pair(), x, t) - sum;
}

// Central differences of eval_u against the transported gradient.
int check_fd(const SolutionField& field, std::mt19937_64& rng, double xlo, double xhi,
             double tlo, double thi, int samples) {
  std::uniform_real_distribution<double> xd(xlo, xhi);
  std::uniform_real_distribution<double> td(tlo, thi);
  const double h = 1e-6;
  int used = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = xd(rng);
    const double t = td(rng);
    const Transported d = transport_derivatives(field, x, t);
    // Skip points within h of a kink: the four neighbours must agree.
    bool smooth = !d.one_sided;
    for (auto [dx, dt] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
      const Transported e = transport_derivatives(field, x + dx, t + dt);
      smooth = smooth && !e.one_sided && e.region == d.region &&
               e.right.u_x == d.right.u_x && e.right.u_t == d.right.u_t;
    }
    if (!smooth) continue;
    const double ux = (eval_u(field, x + h, t) - eval_u(field, x - h, t)) / (2 * h);
    const double ut = (eval_u(field, x, t + h) - eval_u(field, x, t - h)) / (2 * h);
    CHECK(ux == doctest::Approx(d.right.u_x).epsilon(1e-6).scale(1.0));
    CHECK(ut == doctest::Approx(d.right.u_t).epsilon(1e-6).scale(1.0));
    ++used;
  }
  return used;
}

}  // namespace

TEST_CASE("uniform fall bounces off the obstacle") {
  const SolutionField field = SolutionField::solve(presets::constant(1.0, -1.0), {kWin});
  const auto& m = field.measure();
  CHECK(m.density()(0.0) == doctest::Approx(2.0));
  CHECK(m.min_density() >= 0.0);
  for (double x : {-1.5, 0.0, 0.4, 2.0}) {
    for (double t : {0.0, 0.3, 1.0, 1.7, 3.0}) {
      CHECK(eval_u(field, x, t) == doctest::Approx(std::abs(1.0 - t)).scale(1.0));
    }
  }
  const Transported before = transport_derivatives(field, 0.0, 0.5);
  CHECK(before.region == Region::free);
  CHECK(before.right.u_t == doctest::Approx(-1.0));
  CHECK(before.right.u_x == doctest::Approx(0.0).scale(1.0));
  const Transported after = transport_derivatives(field, 0.0, 2.0);
  CHECK(after.region == Region::flipped_both);
  CHECK(after.right.u_t == doctest::Approx(1.0));
  CHECK(after.right.u_x == doctest::Approx(0.0).scale(1.0));
  const auto [b, a] = reflection_check(field, 0.0, 1e-3);
  CHECK(b == doctest::Approx(-1.0));
  CHECK(a == doctest::Approx(1.0));
  for (double t : {0.0, 0.5, 2.0}) {
    const LipschitzNorms n = lipschitz_norms(field, t);
    CHECK(n.minus == doctest::Approx(1.0));
    CHECK(n.plus == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(eval_u(field, 0.0, -1.0), InputError);
  CHECK_THROWS_AS(eval_u(field, 0.0, 10.0), InputError);
}

TEST_CASE("characteristic sigma carries no weight") {
  const RiemannPair pair = decompose(presets::constant(1.0, -1.0));
  const auto sigma = ContactCurve::from_tau(PiecewiseLinear({0.0, 1.0}, {1.0, 2.0}, 0.0, 1.0));
  const ReflectionMeasure m = build_measure(pair, sigma);
  for (double z : {0.2, 0.7, 5.0}) CHECK(m.density()(z) == 0.0);
  CHECK(m.density()(-3.0) == doctest::Approx(2.0));  // flat sigma = 1 to the left
  const auto periodic_sigma = ContactCurve::from_tau(PiecewiseLinear::periodic({0.0, 1.0}, {1.0, 1.0}));
  CHECK_THROWS_AS(build_measure(pair, periodic_sigma), InputError);
}

TEST_CASE("grazing data leaves u = w and refuses a reflection check") {
  const SolutionField field = SolutionField::solve(presets::hat(), {kWin});
  CHECK(field.curve().is_empty());
  CHECK(eval_u(field, 0.3, 2.0) == eval_w(field.pair(), 0.3, 2.0));
  CHECK_THROWS_AS(reflection_check(field, 0.0, 1e-3), InputError);
  const auto sigma = ContactCurve::from_tau(PiecewiseLinear({0.0, 1.0}, {1.0, 2.0}, 0.0, 1.0));
  const SolutionField slanted(decompose(presets::constant(1.0, -1.0)), sigma);
  CHECK_THROWS_WITH_AS(reflection_check(slanted, 0.5, 1e-3),
                       doctest::Contains("not an active contact"), InputError);
}

TEST_CASE("exact solution on random data") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> xd(kWin.x_min, kWin.x_max);
  std::uniform_real_distribution<double> td(0.0, kWin.t_max);
  int fd_points = 0;
  int contacts = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const InitialData data = testgen::aperiodic(rng);
    const SolutionField field = SolutionField::solve(data, {kWin});
    if (field.curve().is_empty()) continue;
    ++contacts;
    CHECK(field.measure().min_density() >= -1e-12);
    for (int i = 0; i < 400; ++i) {
      const double x = xd(rng);
      const double t = td(rng);
      const double u = eval_u(field, x, t);
      CHECK(u >= -1e-9);
      if (t < field.curve().tau()(x)) CHECK(u == eval_w(field.pair(), x, t));
      // Characteristic magnitudes are transported unchanged.
      const Transported d = transport_derivatives(field, x, t);
      if (!d.one_sided) {
        const auto d0p = eval_w_derivatives(field.pair(), x + t, 0.0).right;
        const auto d0m = eval_w_derivatives(field.pair(), x - t, 0.0).right;
        CHECK(std::abs(d.right.u_xi) == doctest::Approx(std::abs(d0p.w_xi)));
        CHECK(std::abs(d.right.u_eta) == doctest::Approx(std::abs(d0m.w_eta)));
      }
    }
    for (double x : {-1.7, -0.6, 0.1, 0.9, 1.8}) {
      CHECK(eval_u(field, x, 0.0) == doctest::Approx(data.u0(x)));
      for (double t : {0.8, 1.9, 2.9}) {
        CHECK(std::abs(eval_u(field, x, t) - quadrature_u(field, x, t, 200000)) <= 5e-4);
      }
    }
    fd_points += check_fd(field, rng, kWin.x_min + 0.01, kWin.x_max - 0.01, 0.01, kWin.t_max - 0.01, 200);
  }
  CHECK(contacts >= 5);
  CHECK(fd_points >= 1000);
}

TEST_CASE("exact solution on random periodic data") {
  std::mt19937_64 rng(8);
  int contacts = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const SolutionField field = SolutionField::solve(testgen::periodic(rng));
    if (field.curve().is_empty()) continue;
    ++contacts;
    CHECK(field.measure().min_density() >= -1e-12);
    CHECK(*field.measure().per_period_mass() >= 0.0);
    check_fd(field, rng, -3.0, 3.0, 0.01, 12.0, 300);
    const double e0 = energy(field, 0.0);
    const LipschitzNorms n0 = lipschitz_norms(field, 0.0);
    for (double t : {0.7, 3.3, 11.0}) {
      CHECK(energy(field, t) == doctest::Approx(e0).epsilon(1e-12));
      const LipschitzNorms n = lipschitz_norms(field, t);
      CHECK(n.minus == doctest::Approx(n0.minus));
      CHECK(n.plus == doctest::Approx(n0.plus));
      CHECK(n.grad >= n0.grad / std::numbers::sqrt2 - 1e-12);
      CHECK(n.grad <= n0.grad * std::numbers::sqrt2 + 1e-12);
      for (double x : {-0.9, 0.2, 1.4}) {
        CHECK(eval_u(field, x, t) >= -1e-9);
        CHECK(std::abs(eval_u(field, x, t) - quadrature_u(field, x, t, 400000)) <= 1e-3);
      }
    }
  }
  CHECK(contacts >= 3);
}

TEST_CASE("energy of eval_u by finite differences") {
  std::mt19937_64 rng(12);
  const SolutionField field = SolutionField::solve(testgen::periodic(rng, 0.05, 4, 3));
  REQUIRE_FALSE(field.curve().is_empty());
  const double t = 2.4;
  const int n = 20000;
  const double h = 1e-7;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * (i + 0.5) / n;
    const double ux = (eval_u(field, x + h, t) - eval_u(field, x - h, t)) / (2 * h);
    const double ut = (eval_u(field, x, t + h) - eval_u(field, x, t - h)) / (2 * h);
    sum += (ux * ux + ut * ut) * 2.0 / n;
  }
  CHECK(sum == doctest::Approx(energy(field, t)).epsilon(2e-3));
}

TEST_CASE("sine velocity: reflection measure and growth") {
  const SolutionField& field = sine_field();
  const auto& m = field.measure();
  CHECK(m.min_density() >= -1e-12);
  REQUIRE(m.per_period_mass());
  // c = -integral over one period of (1 - tau'^2) w_t(z, tau(z)), sampled.
  const PiecewiseLinear& tau = field.curve().tau();
  const int n = 400000;
  double c = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = -kPi + 2 * kPi * (i + 0.5) / n;
    const double k = tau.slope_right(z);
    c -= (1 - k * k) * eval_w_derivatives(field.pair(), z, tau(z)).right.w_t * 2 * kPi / n;
  }
  CHECK(c > 0.1);
  CHECK(*m.per_period_mass() == doctest::Approx(2 * c).epsilon(1e-4));
  for (int k = 1; k <= 4; ++k) {
    const double t = 2 * k * kPi + 7 * kPi / 6;
    for (double x : {-kPi / 2, 0.0, 1.0, kPi / 2}) {
      CHECK(eval_u(field, x, t) >= eval_w(field.pair(), x, t) + k * c - 1e-9);
    }
  }
  const auto [before, after] = reflection_check(field, -kPi / 2, 1e-6);
  CHECK(before == doctest::Approx(-std::sqrt(3.0) / 2).epsilon(1e-3));
  CHECK(after == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-3));
  const LipschitzNorms n0 = lipschitz_norms(field, 0.0);
  for (double t : {1.0, 5.5, 20.0}) {
    const LipschitzNorms n1 = lipschitz_norms(field, t);
    CHECK(std::abs(n1.minus - n0.minus) <= 1e-6);
    CHECK(std::abs(n1.plus - n0.plus) <= 1e-6);
    CHECK(std::abs(energy(field, t) - energy(field, 0.0)) <= 1e-6 * energy(field, 0.0));
  }
}

TEST_CASE("field csv") {
  const SolutionField field = SolutionField::solve(presets::constant(1.0, -1.0), {kWin});
  std::ostringstream os;
  write_field_csv(field, {0.0}, {0.5, 2.0}, os);
  CHECK(os.str() == "x,t,u,u_x,u_t,region\n0,0.5,0.5,0,-1,free\n0,2,1,0,1,flipped-both\n");
}
