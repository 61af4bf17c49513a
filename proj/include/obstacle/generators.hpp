#pragma once

// Seeded generators of admissible random initial data.

#include <random>
#include <vector>

#include "obstacle/freewave.hpp"

namespace obstacle::gen {

// u0 in [lo, 1] on [-1, 1], constant outside; u1 in [-2, 2] near [-0.9, 0.95],
// zero outside.
inline InitialData aperiodic(std::mt19937_64& rng, double lo = 0.05, int knots = 7) {
  std::uniform_real_distribution<double> height(lo, 1.0);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < knots; ++i) {
    xs.push_back(-1.0 + 2.0 * i / (knots - 1) + (i > 0 && i + 1 < knots ? jitter(rng) : 0.0));
    ys.push_back(height(rng));
  }
  ys.back() = ys.front();
  std::vector<double> bx{-0.9};
  std::vector<double> bv;
  for (int i = 1; i <= 5; ++i) {
    bx.push_back(-0.9 + 0.37 * i + jitter(rng) * 0.3);
    bv.push_back(vel(rng));
  }
  return {PiecewiseLinear(xs, ys, 0.0, 0.0), PiecewiseConstant(bx, bv, 0.0, 0.0),
          ObstacleMode::single, "random"};
}

// Period-2 data: u0 in [lo, 1], u1 with random cell values.
inline InitialData periodic(std::mt19937_64& rng, double lo = 0.05, int knots = 6,
                            int cells = 5) {
  std::uniform_real_distribution<double> height(lo, 1.0);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i <= knots; ++i) {
    xs.push_back(2.0 * i / knots);
    ys.push_back(height(rng));
  }
  ys.back() = ys.front();
  std::vector<double> bx;
  std::vector<double> bv;
  for (int i = 0; i <= cells; ++i) bx.push_back(2.0 * i / cells + (i == 0 || i == cells ? 0.0 : 0.05));
  for (int i = 0; i < cells; ++i) bv.push_back(vel(rng));
  return {PiecewiseLinear::periodic(xs, ys), PiecewiseConstant::periodic(bx, bv),
          ObstacleMode::single, "random-periodic"};
}

// Period-2 data between both obstacles: u0 in [0.1, 0.9], |u1| <= 2.
inline InitialData twin(std::mt19937_64& rng) {
  InitialData d = periodic(rng, 0.1);
  std::vector<double> ys(d.u0.ys().begin(), d.u0.ys().end());
  for (double& y : ys) y = 0.1 + 0.8 * (y - 0.1) / 0.9;
  d.u0 = PiecewiseLinear::periodic(std::vector<double>(d.u0.xs().begin(), d.u0.xs().end()), ys);
  d.mode = ObstacleMode::twin;
  d.label = "random-twin";
  return d;
}

}  // namespace obstacle::gen
