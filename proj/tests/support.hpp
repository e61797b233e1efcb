#pragma once

// Random generators shared by the unit and acceptance suites.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "obbreg/types.hpp"

namespace obbreg::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  RBox5 rbox(double max_center = 100.0, double min_side = 2.0, double max_side = 80.0) {
    return {uniform(-max_center, max_center), uniform(-max_center, max_center), uniform(min_side, max_side),
            uniform(min_side, max_side), uniform(-kHalfPi, 0.0)};
  }

  AnchorBox anchor(double max_center = 100.0) {
    return {uniform(-max_center, max_center), uniform(-max_center, max_center), uniform(4.0, 80.0),
            uniform(4.0, 80.0)};
  }

  // Strictly convex quad: four well-separated points on a circle pushed
  // through a random non-degenerate affine map, then shuffled.
  std::array<Point2, 4> convex_points() {
    std::array<double, 4> ang{};
    for (;;) {
      for (auto& a : ang) a = uniform(0.0, 2.0 * kPi);
      std::sort(ang.begin(), ang.end());
      bool ok = ang[0] + 2.0 * kPi - ang[3] > 0.3;
      for (int i = 0; i < 3; ++i) ok = ok && ang[i + 1] - ang[i] > 0.3;
      if (ok) break;
    }
    double m00, m01, m10, m11;
    do {
      m00 = uniform(-3.0, 3.0);
      m01 = uniform(-3.0, 3.0);
      m10 = uniform(-3.0, 3.0);
      m11 = uniform(-3.0, 3.0);
    } while (std::abs(m00 * m11 - m01 * m10) < 0.5);
    const double s = uniform(1.0, 50.0);
    const Point2 t{uniform(-100.0, 100.0), uniform(-100.0, 100.0)};
    std::array<Point2, 4> pts{};
    for (int i = 0; i < 4; ++i) {
      const double x = std::cos(ang[i]);
      const double y = std::sin(ang[i]);
      pts[i] = t + Point2{m00 * x + m01 * y, m10 * x + m11 * y} * s;
    }
    std::shuffle(pts.begin(), pts.end(), rng_);
    return pts;
  }

 private:
  std::mt19937_64 rng_;
};

inline double rbox_corner_set_distance(const Quad& a, const Quad& b) {
  // Max over corners of a of the distance to the nearest corner of b.
  double worst = 0.0;
  for (const auto& p : a.corners) {
    double best = 1e300;
    for (const auto& q : b.corners) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace obbreg::testing
