#pragma once

// Seeded generators of random loops, hoops, rigid motions and test fields,
// shared by the property tests, the acceptance suite and the CLI.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "rfock/covariance.hpp"
#include "rfock/geometry.hpp"
#include "rfock/rng.hpp"

namespace rfock {

/// Point uniform in [-1, 1]^3, coordinates drawn in x, y, z order.
inline Vec3 uniform_box(CounterRng& rng) {
  Vec3 p;
  for (int i = 0; i < 3; ++i) p[i] = 2.0 * rng.uniform() - 1.0;
  return p;
}

/// Random closed polyline: `vertices` points scattered around a circle of
/// radius `radius` about `center`, with radial and vertical jitter so the loop
/// is non-planar.
inline Loop random_loop(CounterRng& rng, int vertices, double radius = 0.8,
                        const Vec3& center = Vec3::Zero()) {
  std::vector<Vec3> pts;
  for (int i = 0; i < vertices; ++i) {
    const double phi = 2.0 * std::numbers::pi * (i + 0.3 * rng.uniform()) / vertices;
    const double rho = radius * (0.6 + 0.4 * rng.uniform());
    const double z = radius * (rng.uniform() - 0.5);
    pts.push_back(center + Vec3(rho * std::cos(phi), rho * std::sin(phi), z));
  }
  return make_loop(pts);
}

/// Hoop with one or two loops and at most `max_segments` segments in total.
inline Hoop random_hoop(CounterRng& rng, int max_segments = 12, double radius = 0.8) {
  Hoop h;
  const bool two = max_segments >= 6 && rng.uniform() < 0.5;
  if (two) {
    const int first = 3 + static_cast<int>(rng.uniform() * (max_segments / 2 - 2));
    const int second = 3 + static_cast<int>(rng.uniform() * (max_segments - first - 2));
    Vec3 offset = 0.25 * uniform_box(rng);
    offset.z() = 0.0;
    h.add(random_loop(rng, first, radius, offset), 1);
    const Loop inner = random_loop(rng, second, 0.7 * radius, -offset);
    h.add(inner, rng.uniform() < 0.5 ? 1 : -1);
  } else {
    const int n = 3 + static_cast<int>(rng.uniform() * (max_segments - 2));
    h.add(random_loop(rng, std::min(n, max_segments), radius), 1);
  }
  return h;
}

/// Uniform random rotation (unit quaternion) and a translation with
/// components in [-scale, scale].
inline EuclideanTransform random_transform(CounterRng& rng, double scale = 2.0) {
  Eigen::Vector4d coeffs;
  for (int i = 0; i < 4; ++i) coeffs[i] = rng.normal();
  Eigen::Quaterniond q(coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
  q.normalize();
  const Vec3 t = scale * uniform_box(rng);
  return {q.toRotationMatrix(), t};
}

/// Test field with `terms` smeared random loops placed near the origin.
inline TestField random_test_field(CounterRng& rng, int terms = 2, double max_weight = 0.5,
                                   double min_scale = 0.3, double max_scale = 0.7) {
  TestField f;
  for (int j = 0; j < terms; ++j) {
    const Vec3 c = 0.5 * uniform_box(rng);
    const double w = max_weight * (2.0 * rng.uniform() - 1.0);
    const double s = min_scale + (max_scale - min_scale) * rng.uniform();
    f.add(w, Hoop(random_loop(rng, 4, 0.6, c)), SmearingScale(s));
  }
  return f;
}

}  // namespace rfock
