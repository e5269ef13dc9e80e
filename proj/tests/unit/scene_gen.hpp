#pragma once

// Random valid scenes for property tests.

#include <vector>

#include "rng.hpp"
#include "schottky.hpp"

namespace testgen {

using namespace sforge;

inline RelativeSchottkySet random_scene(Rng& rng, int max_discs, double min_gap = 0.02) {
  RelativeSchottkySet s;
  const int kind = rng.index(3);
  if (kind == 0) {
    s.outer = JordanBoundary(Disc(0.0, 1.0));
  } else if (kind == 1) {
    s.outer = JordanBoundary(Polyline({Complex(-1, -1), Complex(1, -1), Complex(1, 1), Complex(-1, 1)}, true));
  } else {
    std::vector<Complex> v;
    const int n = 5 + rng.index(4);
    for (int k = 0; k < n; ++k) v.push_back(std::polar(1.0 + 0.2 * rng.uniform(), 2 * kPi * k / n));
    s.outer = JordanBoundary(Polyline(v, true));
  }
  const int target = 1 + rng.index(max_discs);
  const Box b = s.outer.bbox();
  for (int attempt = 0; attempt < 400 && static_cast<int>(s.discs.size()) < target; ++attempt) {
    const Complex c(rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax));
    if (!s.outer.contains(c)) continue;
    const double r = rng.uniform(0.03, 0.35);
    if (s.outer.distance(c) - r < min_gap) continue;
    bool ok = true;
    for (const Disc& d : s.discs)
      if (std::abs(d.center - c) - d.radius - r < min_gap) ok = false;
    if (ok) s.discs.push_back(Disc(c, r));
  }
  return s;
}

inline Complex random_point_in_set(Rng& rng, const RelativeSchottkySet& s) {
  const Box b = s.outer.bbox();
  while (true) {
    const Complex z(rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax));
    if (s.outer.contains(z) && s.contains(z)) return z;
  }
}

inline Complex random_point_in_omega(Rng& rng, const RelativeSchottkySet& s) {
  const Box b = s.outer.bbox();
  while (true) {
    const Complex z(rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax));
    if (s.outer.contains(z)) return z;
  }
}

}  // namespace testgen
