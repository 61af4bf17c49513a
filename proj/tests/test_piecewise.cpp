#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "obstacle/errors.hpp"
#include "obstacle/piecewise.hpp"

using namespace obstacle;

namespace {

PiecewiseLinear random_pl(std::mt19937_64& rng, int knots) {
  std::uniform_real_distribution<double> gap(0.05, 1.0);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::vector<double> xs{val(rng)};
  std::vector<double> ys{val(rng)};
  for (int i = 1; i < knots; ++i) {
    xs.push_back(xs.back() + gap(rng));
    ys.push_back(val(rng));
  }
  return PiecewiseLinear(xs, ys, val(rng), val(rng));
}

}  // namespace

TEST_CASE("eval interpolates and wraps") {
  PiecewiseLinear ramp({0.0, 1.0}, {0.0, 1.0});
  CHECK(ramp(0.5) == 0.5);

  auto saw = PiecewiseLinear::periodic({0.0, 1.0}, {0.0, 1.0});
  // One period of a unit-drift ramp is the identity.
  CHECK(saw(2.5) == doctest::Approx(2.5));

  auto tooth = PiecewiseLinear::periodic({0.0, 0.5, 1.0}, {0.0, 0.5, 0.0});
  CHECK(tooth(2.25) == doctest::Approx(0.25));

  PiecewiseLinear hat({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}, -1.0, 1.0);
  CHECK(hat(-0.25) == 0.25);
  CHECK(hat(-3.0) == 3.0);
}

TEST_CASE("constructor rejects degenerate segments and merges collinear knots") {
  CHECK_THROWS_AS(PiecewiseLinear({0.0, 0.0}, {1.0, 2.0}), InputError);
  CHECK_THROWS_AS(PiecewiseLinear({1.0, 0.0}, {1.0, 2.0}), InputError);
  PiecewiseLinear line({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, 1.0, 1.0);
  CHECK(line.xs().size() == 1);
  CHECK(line(7.0) == 7.0);
  PiecewiseConstant pc({0.0, 1.0, 2.0}, {3.0, 3.0}, 0.0, 0.0);
  CHECK(pc.xs().size() == 2);
}

TEST_CASE("combine") {
  PiecewiseLinear up({0.0, 1.0}, {0.0, 1.0});
  PiecewiseLinear down({0.0, 1.0}, {1.0, 0.0});
  auto one = combine(up, down, 1.0, 1.0);
  for (double x : {0.0, 0.3, 1.0}) CHECK(one(x) == doctest::Approx(1.0));

  std::mt19937_64 rng(7);
  auto f = random_pl(rng, 6);
  auto g = random_pl(rng, 4);
  auto same = combine(f, g, 1.0, 0.0);
  for (double x : {-5.0, 0.0, 0.7, 3.3, 9.0}) CHECK(same(x) == f(x));

  PiecewiseLinear a({0.0, 2.0}, {0.0, 2.0});
  PiecewiseLinear b({0.0, 1.0, 2.0}, {0.0, 0.0, 2.0});
  auto d = combine(a, b, 1.0, -1.0);
  REQUIRE(d.xs().size() == 3);
  CHECK(d.xs()[1] == 1.0);
  CHECK(d.ys()[0] == 0.0);
  CHECK(d.ys()[1] == 1.0);
  CHECK(d.ys()[2] == 0.0);

  auto p1 = PiecewiseLinear::periodic({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  auto p2 = PiecewiseLinear::periodic({0.0, 3.0}, {0.0, 0.0});
  CHECK_THROWS_AS(combine(p1, p2, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(combine(p1, a, 1.0, 1.0), InputError);
}

TEST_CASE("combine is exact pointwise on random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> where(-6.0, 12.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_pl(rng, 8);
    auto g = random_pl(rng, 5);
    const double a = coef(rng);
    const double b = coef(rng);
    auto h = combine(f, g, a, b);
    for (int i = 0; i < 1000; ++i) {
      const double x = where(rng);
      const double expect = a * f(x) + b * g(x);
      CHECK(std::abs(h(x) - expect) <= 1e-12 * (1.0 + std::abs(expect)));
    }
  }
}

TEST_CASE("antiderivative") {
  auto id = antiderivative(PiecewiseConstant::constant(1.0), 0.0);
  CHECK(id(3.5) == 3.5);
  CHECK(id(-2.0) == -2.0);

  PiecewiseConstant sign({-1.0, 0.0, 1.0}, {-1.0, 1.0}, -1.0, 1.0);
  auto abs = antiderivative(sign, 0.0);
  for (double x : {-3.0, -0.5, 0.0, 0.25, 2.0}) CHECK(abs(x) == std::abs(x));

  auto square = PiecewiseConstant::periodic({0.0, 1.0, 2.0}, {1.0, -1.0});
  auto tri = antiderivative(square, 0.0);
  CHECK(tri.is_periodic());
  CHECK(tri.drift() == 0.0);
  // Hand integration: rises to 1 at s=1, back to 0 at s=2, repeats.
  CHECK(tri(0.5) == doctest::Approx(0.5));
  CHECK(tri(1.0) == doctest::Approx(1.0));
  CHECK(tri(1.75) == doctest::Approx(0.25));
  CHECK(tri(7.5) == doctest::Approx(0.5));
  CHECK(tri(-0.5) == doctest::Approx(0.5));

  auto biased = PiecewiseConstant::periodic({0.0, 1.0, 2.0}, {2.0, 0.0});
  auto ramp = antiderivative(biased, 0.0);
  CHECK(ramp.drift() == doctest::Approx(2.0));
  CHECK(ramp(5.0) == doctest::Approx(6.0));
}

TEST_CASE("derivative inverts antiderivative off breakpoints") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_real_distribution<double> gap(0.1, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> xs{0.0};
    std::vector<double> vs;
    for (int i = 0; i < 7; ++i) {
      xs.push_back(xs.back() + gap(rng));
      vs.push_back(val(rng));
    }
    PiecewiseConstant h(xs, vs, val(rng), val(rng));
    auto d = antiderivative(h, 0.4).derivative();
    std::uniform_real_distribution<double> where(-2.0, xs.back() + 2.0);
    for (int i = 0; i < 200; ++i) {
      const double x = where(rng);
      CHECK(d(x) == doctest::Approx(h(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("running_min") {
  PiecewiseLinear f({0.0, 1.0, 2.0}, {1.0, 0.0, 2.0});
  auto m = running_min(f, 0.0);
  CHECK(m(0.5) == 0.5);
  CHECK(m(1.0) == 0.0);
  CHECK(m(2.0) == 0.0);
  CHECK(m(5.0) == 0.0);

  PiecewiseLinear dec({0.0, 1.0, 3.0}, {2.0, 1.0, -1.0}, 0.0, -0.5);
  auto same = running_min(dec, 0.0);
  for (double x : {0.0, 0.5, 2.0, 3.0, 4.0}) CHECK(same(x) == dec(x));
}

TEST_CASE("running_min of a periodic interpolant matches dense sampling") {
  const int n = 64;
  const double p = 2.0 * std::numbers::pi;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i <= n; ++i) {
    xs.push_back(p * i / n);
    ys.push_back(2.0 + std::sin(p * i / n));
  }
  ys.back() = ys.front();
  auto f = PiecewiseLinear::periodic(xs, ys);
  const double from = 0.3;
  auto m = running_min(f, from);

  // Oracle: dense sampled running minimum.
  double oracle = f(from);
  const int samples = 200000;
  const double span = 2.5 * p;
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = from + span * i / samples;
    oracle = std::min(oracle, f(x));
    worst = std::max(worst, std::abs(m(x) - oracle));
    CHECK(m(x) <= f(x) + 1e-15);
  }
  // Sampling resolution times the Lipschitz bound (|sin'| <= 1).
  CHECK(worst <= span / samples);
  // Stabilizes at the global minimum of the interpolant.
  double global = *std::min_element(ys.begin(), ys.end());
  CHECK(m(from + 2.0 * p) == doctest::Approx(global));
}

TEST_CASE("running_min is non-increasing and below f") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto f = random_pl(rng, 10);
    const double from = f.xs().front() - 0.5;
    auto m = running_min(f, from);
    double prev = m(from);
    for (int i = 1; i <= 2000; ++i) {
      const double x = from + 12.0 * i / 2000.0;
      const double v = m(x);
      CHECK(v <= prev);
      CHECK(v <= f(x) + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("extremum_on_interval") {
  PiecewiseLinear hat({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}, -1.0, 1.0);
  auto lo = extremum_on_interval(hat, -1.0, 1.0, Extremum::min);
  CHECK(lo.x == 0.0);
  CHECK(lo.y == 0.0);
  auto hi = extremum_on_interval(hat, -1.0, 1.0, Extremum::max);
  CHECK(hi.x == -1.0);
  CHECK(hi.y == 1.0);

  PiecewiseLinear peak({0.0, 1.0, 2.0}, {0.0, 3.0, 1.0});
  auto top = extremum_on_interval(peak, 0.5, 2.0, Extremum::max);
  CHECK(top.x == 1.0);
  CHECK(top.y == 3.0);
  CHECK_THROWS_AS(extremum_on_interval(peak, 2.0, 1.0, Extremum::max),
                  InputError);
}

TEST_CASE("reflected and restricted") {
  PiecewiseLinear f({0.0, 1.0, 2.0}, {0.0, 3.0, 1.0}, 2.0, -1.0);
  auto r = f.reflected();
  for (double x : {-4.0, -1.5, -0.2, 0.0, 3.0}) CHECK(r(x) == doctest::Approx(f(-x)));
  auto w = f.restricted(0.5, 1.5);
  for (double x : {0.5, 1.0, 1.2, 1.5}) CHECK(w(x) == doctest::Approx(f(x)));

  auto p = PiecewiseLinear::periodic({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0});
  auto pr = p.reflected();
  for (double x : {-4.0, -1.5, -0.2, 0.0, 3.7}) CHECK(pr(x) == doctest::Approx(p(-x)));
}

TEST_CASE("piecewise constant evaluation and sup") {
  PiecewiseConstant h({0.0, 1.0, 2.0}, {1.0, -3.0}, 0.5, 0.0);
  CHECK(h(-1.0) == 0.5);
  CHECK(h(0.0) == 1.0);
  CHECK(h(1.0) == -3.0);
  CHECK(h.left_limit(1.0) == 1.0);
  CHECK(h(2.0) == 0.0);
  CHECK(sup_abs_on(h, -1.0, 0.5) == 1.0);
  CHECK(sup_abs_on(h, -1.0, 1.0) == 1.0);
  CHECK(sup_abs_on(h, -1.0, 1.5) == 3.0);

  auto p = PiecewiseConstant::periodic({0.0, 1.0, 2.0}, {1.0, -1.0});
  CHECK(p(2.5) == 1.0);
  CHECK(p.left_limit(2.0) == -1.0);
  CHECK(p.period_integral() == 0.0);
}
