#include "curves.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace sforge {

namespace {

double segment_length_sum(const std::vector<Complex>& v, size_t from, size_t to) {
  double s = 0.0;
  for (size_t i = from; i < to; ++i) s += std::abs(v[i + 1] - v[i]);
  return s;
}

bool meets_open_disc(const std::vector<Complex>& v, const Disc& d, double tol) {
  if (v.size() == 1) return std::abs(v[0] - d.center) < d.radius - tol;
  for (size_t i = 0; i + 1 < v.size(); ++i)
    if (point_segment_distance(d.center, v[i], v[i + 1]) < d.radius - tol) return true;
  return false;
}

struct Hit {
  size_t seg;  // segment index
  double t;    // parameter on that segment
  Complex point;
};

// First and last points of the open polyline on the circle.
bool first_last_hits(const std::vector<Complex>& v, const Disc& d, double tol, Hit* first, Hit* last) {
  const size_t nseg = v.size() - 1;
  bool found = false;
  if (std::abs(std::abs(v.front() - d.center) - d.radius) <= tol) {
    *first = {0, 0.0, v.front()};
    found = true;
  } else {
    for (size_t i = 0; i < nseg && !found; ++i) {
      const auto ts = segment_circle_intersections(v[i], v[i + 1], d);
      if (!ts.empty()) {
        const double t = ts.front();
        *first = {i, t, t == 1.0 ? v[i + 1] : v[i] + t * (v[i + 1] - v[i])};
        found = true;
      }
    }
  }
  if (!found) return false;
  if (std::abs(std::abs(v.back() - d.center) - d.radius) <= tol) {
    *last = {nseg - 1, 1.0, v.back()};
    return true;
  }
  for (size_t i = nseg; i-- > 0;) {
    const auto ts = segment_circle_intersections(v[i], v[i + 1], d);
    if (!ts.empty()) {
      const double t = ts.back();
      *last = {i, t, t == 0.0 ? v[i] : (t == 1.0 ? v[i + 1] : v[i] + t * (v[i + 1] - v[i]))};
      return true;
    }
  }
  return false;
}

double wrap_positive(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a;
}

// Clearance of disc i to its neighbours and to the outer boundary.
double disc_clearance(const RelativeSchottkySet& s, size_t i) {
  const Disc& d = s.discs[i];
  double g = s.outer.distance(d.center) - d.radius;
  for (size_t j = 0; j < s.discs.size(); ++j)
    if (j != i) g = std::min(g, std::abs(d.center - s.discs[j].center) - d.radius - s.discs[j].radius);
  return std::max(g, 0.0);
}

std::vector<Complex> dedupe(const std::vector<Complex>& v, double eps) {
  std::vector<Complex> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!out.empty() && std::abs(v[i] - out.back()) <= eps) {
      // Keep the exact final endpoint.
      if (i + 1 == v.size()) out.back() = v[i];
      continue;
    }
    out.push_back(v[i]);
  }
  return out;
}

}  // namespace

double reroute_tolerance(const RelativeSchottkySet& s) { return 1e-9 * std::max(1.0, s.scale()); }

double max_penetration(const RelativeSchottkySet& s, const Polyline& l) {
  double worst = 0.0;
  const auto& v = l.vertices();
  for (const Disc& d : s.discs) {
    double m = v.size() == 1 ? std::abs(v[0] - d.center) : 1e300;
    for (size_t i = 0; i < l.segment_count(); ++i)
      m = std::min(m, point_segment_distance(d.center, l.segment_start(i), l.segment_end(i)));
    worst = std::max(worst, d.radius - m);
  }
  return worst;
}

RerouteResult reroute(const RelativeSchottkySet& s, const Polyline& l) {
  if (l.closed()) throw precondition_error("reroute expects an open curve");
  const double tol = reroute_tolerance(s);
  for (const Disc& d : s.discs) {
    if (std::abs(l.front() - d.center) < d.radius - tol || std::abs(l.back() - d.center) < d.radius - tol)
      throw precondition_error("curve endpoint lies strictly inside a disc");
  }
  for (Complex z : l.vertices())
    if (!s.outer.contains(z) && s.outer.distance(z) > tol) throw precondition_error("curve leaves Ω");

  RerouteResult res;
  res.original_length = l.length();
  std::vector<Complex> v = l.vertices();

  std::vector<size_t> order(s.discs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return s.discs[a].radius > s.discs[b].radius; });
  const double omega_diam = s.outer.diameter();
  const int guard = 10 * static_cast<int>(std::max<size_t>(1, s.discs.size()));
  int iterations = 0;

  while (true) {
    bool changed = false;
    ++res.passes;
    for (size_t i : order) {
      const Disc& d = s.discs[i];
      if (v.size() < 2 || !meets_open_disc(v, d, tol)) continue;
      if (++iterations > guard) throw internal_error("reroute exceeded its iteration guard");
      Hit a, b;
      if (!first_last_hits(v, d, tol, &a, &b)) throw internal_error("curve enters a disc without crossing its circle");
      const double alpha = std::arg(a.point - d.center);
      const double beta = std::arg(b.point - d.center);
      const double ccw = wrap_positive(beta - alpha);
      const double cw = ccw - 2.0 * kPi;
      double sweep;
      if (std::abs(ccw - std::abs(cw)) <= 1e-12) {
        const Complex mid = d.center + std::polar(d.radius, alpha + ccw / 2.0);
        sweep = cross(b.point - a.point, mid - a.point) > 0 ? ccw : cw;
      } else {
        sweep = ccw < -cw ? ccw : cw;
      }
      if (std::abs(a.point - b.point) <= tol) sweep = 0.0;

      const double arc_len = d.radius * std::abs(sweep);
      double step = std::max(2.0 * kPi / 256.0, arc_len / omega_diam * 2.0 * kPi / 64.0);
      const double g = disc_clearance(s, i);
      // Corners of the tangent path must stay clear of neighbouring discs.
      step = std::min(step, std::max(1e-5, 2.0 * std::acos(d.radius / (d.radius + 0.5 * g))));

      std::vector<Complex> nv(v.begin(), v.begin() + a.seg + 1);
      nv.push_back(a.point);
      if (sweep != 0.0) {
        auto arc = circumscribed_arc(d, alpha, sweep, step);
        arc.back() = b.point;
        nv.insert(nv.end(), arc.begin(), arc.end());
      } else {
        nv.push_back(b.point);
      }
      nv.insert(nv.end(), v.begin() + b.seg + 1, v.end());

      RerouteStep st;
      st.disc = static_cast<int>(i);
      st.chord = std::abs(b.point - a.point);
      if (a.seg == b.seg) {
        st.subcurve_length = std::abs(b.point - a.point);
      } else {
        st.subcurve_length = std::abs(v[a.seg + 1] - a.point) + segment_length_sum(v, a.seg + 1, b.seg) +
                             std::abs(b.point - v[b.seg]);
      }
      const Polyline arc_poly([&] {
        std::vector<Complex> seg{a.point};
        if (sweep != 0.0) {
          auto arc = circumscribed_arc(d, alpha, sweep, step);
          arc.back() = b.point;
          seg.insert(seg.end(), arc.begin(), arc.end());
        } else {
          seg.push_back(b.point);
        }
        return dedupe(seg, 0.0);
      }());
      st.arc_length = arc_poly.length();
      res.steps.push_back(st);

      v = dedupe(nv, 1e-15 * std::max(1.0, omega_diam));
      changed = true;
    }
    if (!changed) break;
    bool clean = true;
    for (const Disc& d : s.discs)
      if (v.size() >= 2 && meets_open_disc(v, d, tol)) clean = false;
    if (clean) break;
  }
  res.curve = Polyline(v, false);
  res.ratio = res.original_length > 0 ? res.curve.length() / res.original_length : 1.0;
  return res;
}

RerouteResult reroute_in_ball(const RelativeSchottkySet& s, Complex p, Complex q, double r) {
  const double tol = reroute_tolerance(s);
  if (!(r > 0.0)) throw precondition_error("ball radius must be positive");
  if (!s.outer.contains(p) || s.outer.distance(p) < 2.0 * r - tol) throw precondition_error("B(p, 2r) escapes Ω");
  if (std::abs(q - p) > r + tol) throw precondition_error("q lies outside B(p, r)");
  if (!s.contains(p, tol) || !s.contains(q, tol)) throw precondition_error("endpoints must lie in the closure of S");
  if (p == q) {
    RerouteResult res;
    res.curve = Polyline({p});
    return res;
  }
  RerouteResult res = reroute(s, Polyline({p, q}));
  const double slack = 1e-6 * std::max(r, tol);
  for (Complex z : res.curve.vertices())
    if (std::abs(z - p) > 2.0 * r + slack) throw internal_error("rerouted curve left B(p, 2r)");
  return res;
}

bool shorter_arc_side_check(const Disc& outer, const Disc& inner) {
  const double d = std::abs(inner.center - outer.center);
  const double eps = 1e-12 * std::max(outer.radius, inner.radius);
  if (d <= eps && std::abs(outer.radius - inner.radius) <= eps) throw precondition_error("circles are identical");
  if (!(d < outer.radius + inner.radius - eps) || !(d > std::abs(outer.radius - inner.radius) + eps))
    throw precondition_error("circles do not cross in two points");
  const Complex u = (inner.center - outer.center) / d;
  const double a = (d * d + outer.radius * outer.radius - inner.radius * inner.radius) / (2.0 * d);
  const double side = d - a;  // signed offset of inner's centre past the common chord
  const Complex mid = side > eps ? inner.center - inner.radius * u : inner.center + inner.radius * u;
  const bool outside = std::abs(mid - outer.center) > outer.radius;
  if (outside && !(d < outer.radius + eps && inner.radius <= outer.radius + eps))
    throw internal_error("shorter arc outside but centre/radius relation fails");
  return outside;
}

double hausdorff_to_circle(const Polyline& c, const Disc& d, int circle_samples) {
  double h = 0.0;
  for (size_t i = 0; i < c.segment_count(); ++i) {
    const Complex a = c.segment_start(i), b = c.segment_end(i);
    const double t = project_on_segment(d.center, a, b);
    for (Complex z : {a, b, a + t * (b - a)}) h = std::max(h, std::abs(std::abs(z - d.center) - d.radius));
  }
  for (int k = 0; k < circle_samples; ++k)
    h = std::max(h, distance_to_polyline(d.point_at(2.0 * kPi * k / circle_samples), c));
  return h;
}

bool is_peripheral(const RelativeSchottkySet& s, const Polyline& c, double tol) {
  if (!c.closed()) throw precondition_error("is_peripheral expects a closed curve");
  for (Complex z : c.vertices())
    if (!s.contains(z, tol)) throw precondition_error("curve does not lie in S");
  for (const Disc& d : s.discs)
    for (size_t i = 0; i < c.segment_count(); ++i)
      if (point_segment_distance(d.center, c.segment_start(i), c.segment_end(i)) < d.radius - tol)
        throw precondition_error("curve enters a disc");
  for (const Disc& d : s.discs)
    if (hausdorff_to_circle(c, d) < tol) return true;
  return false;
}

}  // namespace sforge
