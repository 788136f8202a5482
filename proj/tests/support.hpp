#pragma once

// Shared test utilities: quadrature oracles, random rotations and points.
// These stay independent of the library's evaluation path wherever they act
// as oracles (the Gauss-Legendre rule here is local to the tests).

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "ewjn/geometry.hpp"

namespace testsupport {

// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration).
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

inline ewjn::Mat3 random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// Uniformly random direction scaled to |x| in [rmin, rmax].
inline ewjn::Vec3 random_exterior(std::mt19937& rng, double rmin, double rmax) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> r(rmin, rmax);
  ewjn::Vec3 v(g(rng), g(rng), g(rng));
  while (v.norm() < 1e-6) v = ewjn::Vec3(g(rng), g(rng), g(rng));
  return v * (r(rng) / v.norm());
}

}  // namespace testsupport
