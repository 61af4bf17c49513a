#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "obstacle/errors.hpp"
#include "obstacle/freewave.hpp"
#include "generators.hpp"

using namespace obstacle;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("decompose constant data") {
  auto pair = decompose(presets::constant(1.0, -1.0));
  for (double s : {-3.0, 0.0, 0.5, 4.0}) {
    CHECK(pair.f(s) == doctest::Approx(0.5 - s / 2));
    CHECK(pair.g(s) == doctest::Approx(0.5 + s / 2));
  }
}

TEST_CASE("decompose hat data") {
  auto pair = decompose(presets::hat());
  for (double s : {-3.0, -0.2, 0.0, 0.5, 4.0}) {
    CHECK(pair.f(s) == doctest::Approx(std::abs(s) / 2));
    CHECK(pair.g(s) == doctest::Approx(std::abs(s) / 2));
  }
}

TEST_CASE("decompose sine data against analytic integration") {
  const int cells = 4096;
  const double h = 2 * kPi / cells;
  auto pair = decompose(presets::sine_velocity(0.5, 1.0, cells));
  // integral_0^s sin = 1 - cos s; the interpolant is exact at cell
  // boundaries and within h^2/8 between them.
  double worst = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const double s = -10.0 + 20.0 * i / 5000.0;
    worst = std::max(worst, std::abs(pair.f(s) - (0.25 + 0.5 * (1 - std::cos(s)))));
    worst = std::max(worst, std::abs(pair.g(s) - (0.25 - 0.5 * (1 - std::cos(s)))));
  }
  CHECK(worst <= 0.5 * h * h / 8 + 1e-14);
  CHECK(std::abs(pair.f(h * 100) - (0.25 + 0.5 * (1 - std::cos(h * 100)))) < 1e-14);
}

TEST_CASE("eval_w") {
  auto bounce = decompose(presets::constant(1.0, -1.0));
  for (double t : {0.0, 0.5, 1.0, 3.0}) CHECK(eval_w(bounce, 0.3, t) == doctest::Approx(1 - t));
  CHECK_THROWS_AS(eval_w(bounce, 0.0, -0.1), InputError);

  const double h = 2 * kPi / 4096;
  auto sine = decompose(presets::sine_velocity());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> xd(-10, 10);
  std::uniform_real_distribution<double> td(0, 30);
  for (int i = 0; i < 2000; ++i) {
    const double x = xd(rng);
    const double t = td(rng);
    CHECK(std::abs(eval_w(sine, x, t) - (0.5 + std::sin(x) * std::sin(t))) <=
          h * h / 8 + 1e-13);
  }
}

TEST_CASE("free wave invariants on random data") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> xd(-3, 3);
  std::uniform_real_distribution<double> td(0.5, 3);
  std::uniform_real_distribution<double> kd(0.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const InitialData data = testgen::aperiodic(rng);
    const RiemannPair pair = decompose(data);
    for (int i = 0; i < 200; ++i) {
      const double x = xd(rng);
      // t = 0 reproduces u0.
      CHECK(eval_w(pair, x, 0.0) == doctest::Approx(data.u0(x)).epsilon(1e-13));
      // Parallelogram identity.
      const double t = td(rng);
      const double k = kd(rng);
      const double lhs = eval_w(pair, x, t + k) + eval_w(pair, x, t - k);
      const double rhs = eval_w(pair, x - k, t) + eval_w(pair, x + k, t);
      CHECK(std::abs(lhs - rhs) <= 1e-12);
      // Separability: w_xi depends on xi only, w_eta on eta only.
      const double d = kd(rng);
      const auto a = eval_w_derivatives(pair, x, t).right;
      const auto b = eval_w_derivatives(pair, x + d, t + d).right;  // same x - t
      const auto c = eval_w_derivatives(pair, x + d, t - d).right;  // same x + t
      CHECK(a.w_eta == b.w_eta);
      CHECK(a.w_xi == c.w_xi);
    }
    // Forward differences in t converge to u1 at first order.
    for (double x : {-0.71, -0.13, 0.42, 0.77, 1.6}) {
      const double dt = 1e-6;
      const double fd = (eval_w(pair, x, dt) - eval_w(pair, x, 0.0)) / dt;
      CHECK(fd == doctest::Approx(data.u1(x)).epsilon(1e-5));
    }
  }
}

TEST_CASE("eval_w_derivatives") {
  auto bounce = decompose(presets::constant(1.0, -1.0));
  auto d = eval_w_derivatives(bounce, 0.2, 0.7);
  CHECK_FALSE(d.one_sided);
  CHECK(d.right.w_t == doctest::Approx(-1.0));
  CHECK(d.right.w_x == doctest::Approx(0.0));
  // Characteristic and Cartesian views agree.
  CHECK(d.right.w_x == doctest::Approx((d.right.w_xi - d.right.w_eta) / std::numbers::sqrt2));
  CHECK(d.right.w_t == doctest::Approx((d.right.w_xi + d.right.w_eta) / std::numbers::sqrt2));

  auto hat = decompose(presets::hat());
  // w = max(|x|, t): smooth at (0, 0.5), kinked along x = t.
  auto smooth = eval_w_derivatives(hat, 0.0, 0.5);
  CHECK_FALSE(smooth.one_sided);
  CHECK(smooth.right.w_x == doctest::Approx(0.0));
  CHECK(smooth.right.w_t == doctest::Approx(1.0));
  auto kink = eval_w_derivatives(hat, 0.5, 0.5);
  CHECK(kink.one_sided);
  CHECK(kink.left.w_x == doctest::Approx(0.0));
  CHECK(kink.right.w_x == doctest::Approx(1.0));
  CHECK(kink.left.w_t == doctest::Approx(1.0));
  CHECK(kink.right.w_t == doctest::Approx(0.0));

  // Sine scenario at the first contact: d/dt (1/2 + sin x sin t) = sin x cos t.
  auto sine = decompose(presets::sine_velocity());
  auto c = eval_w_derivatives(sine, -kPi / 2, kPi / 6).right;
  const double h = 2 * kPi / 4096;
  CHECK(std::abs(c.w_t + std::sqrt(3.0) / 2) <= h);
  CHECK(std::abs(c.w_x) <= h);
}

TEST_CASE("cone_negative_sup") {
  auto hat = decompose(presets::hat());
  for (double x : {-1.0, 0.0, 2.0}) CHECK(cone_negative_sup(hat, x, 3.0) == 0.0);

  auto bounce = decompose(presets::constant(1.0, -1.0));
  CHECK(cone_negative_sup(bounce, 0.0, 2.0) == doctest::Approx(1.0));
  CHECK(cone_negative_sup(bounce, 0.0, 0.5) == 0.0);
  CHECK_THROWS_AS(cone_negative_sup(bounce, 0.0, 1.0, ConeDirection::influence),
                  InputError);

  auto sine = decompose(presets::sine_velocity());
  for (double x : {-2.0, -kPi / 2, 0.3}) {
    const double s = cone_negative_sup(sine, x, 9.0);
    CHECK(s <= 0.5 + 1e-6);
    CHECK(s >= 0.5 - 1e-3);  // the cone contains a full period of sin x sin t
  }
}

// Periodic data without drift of the profiles.
InitialData zero_mean(InitialData d) {
  const double mean = d.u1.period_integral() / *d.u1.period();
  std::vector<double> vs(d.u1.values().begin(), d.u1.values().end());
  for (double& v : vs) v -= mean;
  d.u1 = PiecewiseConstant::periodic(std::vector<double>(d.u1.xs().begin(), d.u1.xs().end()), vs);
  return d;
}

TEST_CASE("cone_negative_sup matches brute-force sampling of the cone") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> xd(-2, 2);
  std::uniform_real_distribution<double> td(0.1, 3.5);
  for (int trial = 0; trial < 30; ++trial) {
    // Odd trials are period-2 data, some with t past a full period.
    const RiemannPair pair = decompose(trial % 2 ? zero_mean(testgen::periodic(rng)) : testgen::aperiodic(rng));
    const double x = xd(rng);
    const double t = td(rng);
    double worst = 0.0;
    const int n = 300;
    for (int i = 0; i <= n; ++i) {
      const double tp = t * i / n;
      const double half = t - tp;
      for (int j = 0; j <= n; ++j) {
        const double xp = x - half + 2 * half * j / n;
        worst = std::max(worst, -eval_w(pair, xp, tp));
      }
    }
    const double exact = cone_negative_sup(pair, x, t);
    // The sampled value can only under-estimate, by at most Lip * spacing.
    CHECK(exact >= worst - 1e-12);
    CHECK(exact <= worst + 4.0 * 2 * t / n);
  }
}

TEST_CASE("validate rejects inadmissible data") {
  CHECK_THROWS_WITH_AS(validate(presets::constant(0.0, -1.0)),
                       doctest::Contains("u1 >= 0 required on {u0=0}"), InputError);
  CHECK_NOTHROW(validate(presets::constant(0.0, 1.0)));
  CHECK_THROWS_AS(validate(presets::constant(-0.1, 0.0)), InputError);
  InitialData ramp{PiecewiseLinear({0.0, 1.0}, {0.0, 1.0}, 1.0, 0.0),
                   PiecewiseConstant::constant(0.0), ObstacleMode::single, ""};
  CHECK_THROWS_AS(validate(ramp), InputError);

  InitialData resting{PiecewiseLinear({0.0, 1.0, 2.0, 3.0}, {1.0, 0.0, 0.0, 1.0}),
                      PiecewiseConstant({0.0, 1.5, 1.75}, {0.0, -1.0}, 0.0, 0.0),
                      ObstacleMode::single, ""};
  CHECK_THROWS_WITH_AS(validate(resting), doctest::Contains("[1.5, 1.75]"), InputError);

  auto twin = presets::constant(1.0, 1.0);
  twin.mode = ObstacleMode::twin;
  CHECK_THROWS_WITH_AS(validate(twin), doctest::Contains("u1 <= 0 required on {u0=1}"),
                       InputError);
  twin.u1 = PiecewiseConstant::constant(-1.0);
  CHECK_NOTHROW(validate(twin));
}
