#include "schottky.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace sforge {

JordanBoundary::JordanBoundary(const Disc& circle) : kind_(Kind::Circle), circle_(circle) {
  perimeter_ = 2.0 * kPi * circle.radius;
  diam_ = 2.0 * circle.radius;
}

JordanBoundary::JordanBoundary(const Polyline& closed_polyline) : kind_(Kind::Polyline) {
  if (!closed_polyline.closed()) throw domain_error("outer polyline must be closed");
  if (!is_simple(closed_polyline)) throw domain_error("outer polyline is not simple");
  if (closed_polyline.signed_area() < 0) {
    auto v = closed_polyline.vertices();
    std::reverse(v.begin(), v.end());
    poly_ = Polyline(v, true);
  } else {
    poly_ = closed_polyline;
  }
  if (poly_.signed_area() == 0.0) throw domain_error("outer polyline encloses no area");
  const auto& v = poly_.vertices();
  cum_.assign(v.size() + 1, 0.0);
  for (size_t i = 0; i < v.size(); ++i) cum_[i + 1] = cum_[i] + std::abs(v[(i + 1) % v.size()] - v[i]);
  perimeter_ = cum_.back();
  diam_ = poly_.diameter();
  circle_ = Disc(0.0, 1.0);
}

bool JordanBoundary::contains(Complex z) const {
  if (is_circle()) return std::abs(z - circle_.center) < circle_.radius;
  return winding_number(poly_, z) != 0 && distance(z) > 0.0;
}

double JordanBoundary::distance(Complex z) const {
  if (is_circle()) return std::abs(std::abs(z - circle_.center) - circle_.radius);
  return distance_to_polyline(z, poly_);
}

Box JordanBoundary::bbox() const {
  if (is_circle())
    return {circle_.center.real() - circle_.radius, circle_.center.imag() - circle_.radius,
            circle_.center.real() + circle_.radius, circle_.center.imag() + circle_.radius};
  Box b{1e300, 1e300, -1e300, -1e300};
  for (Complex z : poly_.vertices()) {
    b.xmin = std::min(b.xmin, z.real());
    b.ymin = std::min(b.ymin, z.imag());
    b.xmax = std::max(b.xmax, z.real());
    b.ymax = std::max(b.ymax, z.imag());
  }
  return b;
}

double JordanBoundary::param(Complex z) const {
  if (is_circle()) {
    double t = std::arg(z - circle_.center) / (2.0 * kPi);
    if (t < 0) t += 1.0;
    return t >= 1.0 ? 0.0 : t;
  }
  double best = 1e300, bt = 0.0;
  const auto& v = poly_.vertices();
  for (size_t i = 0; i < v.size(); ++i) {
    const Complex a = v[i], b = v[(i + 1) % v.size()];
    const double s = project_on_segment(z, a, b);
    const double d = std::abs(z - (a + s * (b - a)));
    if (d < best) {
      best = d;
      bt = (cum_[i] + s * (cum_[i + 1] - cum_[i])) / perimeter_;
    }
  }
  return bt >= 1.0 ? bt - 1.0 : bt;
}

Complex JordanBoundary::point(double t) const {
  t -= std::floor(t);
  if (is_circle()) return circle_.point_at(2.0 * kPi * t);
  return poly_.point_at_length(t * perimeter_);
}

Complex JordanBoundary::normal(double t) const {
  t -= std::floor(t);
  if (is_circle()) return std::polar(1.0, 2.0 * kPi * t);
  const double s = t * perimeter_;
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  size_t i = static_cast<size_t>(std::max<std::ptrdiff_t>(0, (it - cum_.begin()) - 1));
  i = std::min(i, poly_.size() - 1);
  const Complex d = poly_.segment_end(i) - poly_.segment_start(i);
  return Complex(d.imag(), -d.real()) / std::abs(d);
}

std::vector<Complex> JordanBoundary::samples(int n) const {
  std::vector<Complex> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) out.push_back(point(static_cast<double>(k) / n));
  return out;
}

std::vector<std::pair<double, double>> JordanBoundary::crossings(Complex a, Complex b) const {
  std::vector<std::pair<double, double>> out;
  if (is_circle()) {
    for (double t : segment_circle_intersections(a, b, circle_)) out.emplace_back(t, param(a + t * (b - a)));
    return out;
  }
  const auto& v = poly_.vertices();
  for (size_t i = 0; i < v.size(); ++i) {
    double s, t;
    if (segment_intersection(a, b, v[i], v[(i + 1) % v.size()], &s, &t)) {
      double p = (cum_[i] + t * (cum_[i + 1] - cum_[i])) / perimeter_;
      if (p >= 1.0) p -= 1.0;
      out.emplace_back(s, p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Polyline JordanBoundary::as_polyline(int n) const {
  if (is_circle()) return Polyline(samples(n), true);
  return poly_;
}

bool RelativeSchottkySet::contains(Complex z, double tol) const {
  if (!outer.contains(z) && outer.distance(z) > tol) return false;
  for (const Disc& d : discs)
    if (std::abs(z - d.center) < d.radius - tol) return false;
  return true;
}

double RelativeSchottkySet::distance_to_set(Complex z) const {
  for (const Disc& d : discs) {
    const double r = std::abs(z - d.center);
    if (r < d.radius) return d.radius - r;
  }
  if (outer.contains(z)) return 0.0;
  return outer.distance(z);
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

ValidationReport validate(const RelativeSchottkySet& s) {
  ValidationReport rep;
  const double thr = kGapThreshold * std::max(1.0, s.scale());
  const int n = static_cast<int>(s.discs.size());
  for (int i = 0; i < n; ++i) {
    const Disc& d = s.discs[i];
    const double clearance = s.outer.contains(d.center) ? s.outer.distance(d.center) - d.radius
                                                        : -s.outer.distance(d.center) - d.radius;
    if (clearance <= thr)
      rep.violations.push_back({"closure not inside Ω", {i}, clearance,
                                "disc " + std::to_string(i) + " clearance " + fmt(clearance)});
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double gap = std::abs(s.discs[i].center - s.discs[j].center) - s.discs[i].radius - s.discs[j].radius;
      if (gap <= thr)
        rep.violations.push_back({"closures intersect", {i, j}, gap,
                                  "discs " + std::to_string(i) + " and " + std::to_string(j) + " gap " + fmt(gap)});
    }
  if (!s.marks.empty()) {
    if (s.marks.size() != 3) {
      rep.violations.push_back({"marks malformed", {}, static_cast<double>(s.marks.size()), "expected three marks"});
    } else {
      const double mtol = 1e-6 * std::max(1.0, s.scale());
      bool on_boundary = true;
      for (int k = 0; k < 3; ++k) {
        const double dist = s.outer.distance(s.marks[k]);
        if (dist > mtol) {
          on_boundary = false;
          rep.violations.push_back({"mark not on outer boundary", {k}, dist,
                                    "mark " + std::to_string(k) + " off boundary by " + fmt(dist)});
        }
      }
      if (on_boundary) {
        const double t1 = s.outer.param(s.marks[0]);
        const double d2 = frac(s.outer.param(s.marks[1]) - t1);
        const double d3 = frac(s.outer.param(s.marks[2]) - t1);
        if (!(d2 > 0.0 && d3 > d2))
          rep.violations.push_back({"marks not in positive cyclic order", {0, 1, 2}, d2,
                                    "marks must be distinct and counterclockwise"});
      }
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

double relative_distance(const PlanarSet& e, const PlanarSet& f) {
  auto diam = [](const PlanarSet& x) {
    return std::holds_alternative<Disc>(x) ? 2.0 * std::get<Disc>(x).radius : std::get<Polyline>(x).diameter();
  };
  const double de = diam(e), df = diam(f);
  if (!(de > 0.0) || !(df > 0.0)) throw domain_error("relative distance needs sets of positive diameter");
  double dist;
  if (std::holds_alternative<Disc>(e) && std::holds_alternative<Disc>(f)) {
    const Disc &a = std::get<Disc>(e), &b = std::get<Disc>(f);
    dist = std::max(0.0, std::abs(a.center - b.center) - a.radius - b.radius);
  } else if (std::holds_alternative<Disc>(e) || std::holds_alternative<Disc>(f)) {
    const Disc& a = std::holds_alternative<Disc>(e) ? std::get<Disc>(e) : std::get<Disc>(f);
    const Polyline& l = std::holds_alternative<Polyline>(e) ? std::get<Polyline>(e) : std::get<Polyline>(f);
    dist = std::max(0.0, distance_to_polyline(a.center, l) - a.radius);
  } else {
    dist = polyline_distance(std::get<Polyline>(e), std::get<Polyline>(f));
  }
  return dist / std::min(de, df);
}

std::vector<OrbitDisc> group_orbit(const RelativeSchottkySet& s, int max_depth) {
  if (max_depth < 0) throw precondition_error("max_depth must be non-negative");
  std::vector<OrbitDisc> out;
  const int n = static_cast<int>(s.discs.size());
  for (int i = 0; i < n; ++i) out.push_back({s.discs[i], {}, i});
  size_t level_begin = 0, level_end = out.size();
  for (int depth = 1; depth <= max_depth; ++depth) {
    for (size_t e = level_begin; e < level_end; ++e) {
      const int last = out[e].word.empty() ? out[e].source : out[e].word.front();
      for (int j = 0; j < n; ++j) {
        if (j == last) continue;
        OrbitDisc child;
        child.disc = reflect_disc(s.discs[j], out[e].disc);
        child.word.push_back(j);
        child.word.insert(child.word.end(), out[e].word.begin(), out[e].word.end());
        child.source = out[e].source;
        out.push_back(std::move(child));
      }
    }
    level_begin = level_end;
    level_end = out.size();
  }
  return out;
}

Estimate area_fraction(const RelativeSchottkySet& s, int samples, uint64_t seed) {
  if (samples < 1000) throw precondition_error("area_fraction needs at least 1000 samples");
  Rng rng(seed, "area_fraction");
  const Box b = s.outer.bbox();
  int inside = 0, in_set = 0;
  while (inside < samples) {
    const Complex z(rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax));
    if (!s.outer.contains(z)) continue;
    ++inside;
    bool hit = false;
    for (const Disc& d : s.discs)
      if (d.contains_open(z)) {
        hit = true;
        break;
      }
    if (!hit) ++in_set;
  }
  const double p = static_cast<double>(in_set) / inside;
  return {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / inside)};
}

namespace {

// Candidate points of S_a where sup dist(., S_b) can be attained.
std::vector<Complex> hausdorff_candidates(const RelativeSchottkySet& a, const RelativeSchottkySet& b, int n) {
  std::vector<Complex> pts = a.outer.samples(n);
  for (const Disc& d : a.discs) {
    const int m = std::max(64, n / 2);
    for (int k = 0; k < m; ++k) pts.push_back(d.point_at(2.0 * kPi * k / m));
  }
  for (const Disc& d : b.discs)
    if (a.contains(d.center)) pts.push_back(d.center);
  const Box box = a.outer.bbox();
  const int g = 128;
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j <= g; ++j) {
      const Complex z(box.xmin + box.width() * i / g, box.ymin + box.height() * j / g);
      if (a.contains(z)) pts.push_back(z);
    }
  return pts;
}

double directed_hausdorff(const RelativeSchottkySet& a, const RelativeSchottkySet& b, int n) {
  double worst = 0.0;
  for (Complex z : hausdorff_candidates(a, b, n)) worst = std::max(worst, b.distance_to_set(z));
  return worst;
}

}  // namespace

double config_hausdorff(const RelativeSchottkySet& a, const RelativeSchottkySet& b, int boundary_samples) {
  return std::max(directed_hausdorff(a, b, boundary_samples), directed_hausdorff(b, a, boundary_samples));
}

}  // namespace sforge
