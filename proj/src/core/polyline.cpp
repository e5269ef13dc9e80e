#include "polyline.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace sforge {

Polyline::Polyline(std::vector<Complex> vertices, bool closed) : v_(std::move(vertices)), closed_(closed) {
  if (v_.empty()) throw domain_error("polyline needs at least one vertex");
  for (Complex z : v_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw domain_error("polyline vertex not finite");
  for (size_t i = 0; i + 1 < v_.size(); ++i)
    if (v_[i] == v_[i + 1]) throw domain_error("polyline has repeated consecutive vertices");
  if (closed_ && v_.size() > 1 && v_.front() == v_.back()) v_.pop_back();
  if (closed_ && v_.size() < 3) throw domain_error("closed polyline needs at least three vertices");
}

size_t Polyline::segment_count() const {
  if (v_.size() < 2) return 0;
  return closed_ ? v_.size() : v_.size() - 1;
}

double Polyline::length() const {
  double s = 0.0;
  for (size_t i = 0; i < segment_count(); ++i) s += std::abs(segment_end(i) - segment_start(i));
  return s;
}

double Polyline::diameter() const {
  double d = 0.0;
  for (size_t i = 0; i < v_.size(); ++i)
    for (size_t j = i + 1; j < v_.size(); ++j) d = std::max(d, std::abs(v_[i] - v_[j]));
  return d;
}

Complex Polyline::point_at_length(double s) const {
  if (segment_count() == 0) return v_.front();
  const double total = length();
  if (closed_) {
    s = std::fmod(s, total);
    if (s < 0) s += total;
  } else {
    s = std::clamp(s, 0.0, total);
  }
  for (size_t i = 0; i < segment_count(); ++i) {
    const double len = std::abs(segment_end(i) - segment_start(i));
    if (s <= len || i + 1 == segment_count()) {
      const double t = len > 0 ? std::min(s / len, 1.0) : 0.0;
      return segment_start(i) + t * (segment_end(i) - segment_start(i));
    }
    s -= len;
  }
  return v_.back();
}

std::vector<Complex> Polyline::resample(int n) const {
  std::vector<Complex> out;
  if (n <= 0) return out;
  const double total = length();
  out.reserve(n);
  if (closed_) {
    for (int k = 0; k < n; ++k) out.push_back(point_at_length(total * k / n));
  } else if (n == 1) {
    out.push_back(v_.front());
  } else {
    for (int k = 0; k < n; ++k) out.push_back(point_at_length(total * k / (n - 1)));
  }
  return out;
}

double Polyline::signed_area() const {
  double a = 0.0;
  for (size_t i = 0; i < v_.size(); ++i) a += cross(v_[i], v_[(i + 1) % v_.size()]);
  return 0.5 * a;
}

double project_on_segment(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double l2 = std::norm(ab);
  if (l2 == 0.0) return 0.0;
  return std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
}

double point_segment_distance(Complex p, Complex a, Complex b) {
  const double t = project_on_segment(p, a, b);
  return std::abs(p - (a + t * (b - a)));
}

bool segment_intersection(Complex a, Complex b, Complex c, Complex d, double* s, double* t) {
  const Complex r = b - a, q = d - c;
  const double den = cross(r, q);
  if (den == 0.0) {
    // Parallel: report an overlap point for collinear overlapping segments.
    if (cross(c - a, r) != 0.0) return false;
    const double l2 = std::norm(r);
    if (l2 == 0.0) return false;
    const double t0 = dot(c - a, r) / l2, t1 = dot(d - a, r) / l2;
    const double lo = std::max(0.0, std::min(t0, t1)), hi = std::min(1.0, std::max(t0, t1));
    if (lo > hi) return false;
    if (s) *s = lo;
    if (t) *t = (t1 != t0) ? (lo - t0) / (t1 - t0) : 0.0;
    return true;
  }
  const double ss = cross(c - a, q) / den;
  const double tt = cross(c - a, r) / den;
  if (ss < 0.0 || ss > 1.0 || tt < 0.0 || tt > 1.0) return false;
  if (s) *s = ss;
  if (t) *t = tt;
  return true;
}

double segment_segment_distance(Complex a, Complex b, Complex c, Complex d) {
  if (segment_intersection(a, b, c, d)) return 0.0;
  return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                  std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

std::vector<double> segment_circle_intersections(Complex a, Complex b, const Disc& disc) {
  std::vector<double> out;
  const Complex ab = b - a, ac = a - disc.center;
  const double A = std::norm(ab);
  if (A == 0.0) return out;
  const double B = 2.0 * dot(ab, ac);
  const double C = std::norm(ac) - disc.radius * disc.radius;
  const double disc_ = B * B - 4.0 * A * C;
  if (disc_ < 0.0) return out;
  const double sq = std::sqrt(disc_);
  // Numerically stable root pair.
  const double qv = -0.5 * (B + (B >= 0 ? sq : -sq));
  double t1 = qv / A;
  double t2 = (qv != 0.0) ? C / qv : t1;
  if (t1 > t2) std::swap(t1, t2);
  if (t1 >= 0.0 && t1 <= 1.0) out.push_back(t1);
  if (t2 >= 0.0 && t2 <= 1.0 && t2 != t1) out.push_back(t2);
  return out;
}

double distance_to_polyline(Complex p, const Polyline& l) {
  if (l.segment_count() == 0) return std::abs(p - l.front());
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < l.segment_count(); ++i)
    best = std::min(best, point_segment_distance(p, l.segment_start(i), l.segment_end(i)));
  return best;
}

double polyline_distance(const Polyline& a, const Polyline& b) {
  if (a.segment_count() == 0) return distance_to_polyline(a.front(), b);
  if (b.segment_count() == 0) return distance_to_polyline(b.front(), a);
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < a.segment_count(); ++i)
    for (size_t j = 0; j < b.segment_count(); ++j)
      best = std::min(best, segment_segment_distance(a.segment_start(i), a.segment_end(i), b.segment_start(j),
                                                     b.segment_end(j)));
  return best;
}

int winding_number(const Polyline& curve, Complex p) {
  int w = 0;
  const auto& v = curve.vertices();
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    const Complex a = v[i], b = v[(i + 1) % n];
    if (a.imag() <= p.imag()) {
      if (b.imag() > p.imag() && cross(b - a, p - a) > 0) ++w;
    } else {
      if (b.imag() <= p.imag() && cross(b - a, p - a) < 0) --w;
    }
  }
  return w;
}

bool is_simple(const Polyline& curve) {
  const size_t n = curve.segment_count();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (curve.closed() && i == 0 && j == n - 1);
      double s, t;
      if (!segment_intersection(curve.segment_start(i), curve.segment_end(i), curve.segment_start(j),
                                curve.segment_end(j), &s, &t))
        continue;
      if (!adjacent) return false;
      // Adjacent segments may only share their common vertex.
      const bool shared = (j == i + 1) ? (s == 1.0 && t == 0.0) : (s == 0.0 && t == 1.0);
      if (!shared) return false;
    }
  }
  return true;
}

std::vector<Complex> circumscribed_arc(const Disc& d, double start_angle, double sweep, double max_step) {
  std::vector<Complex> out;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / max_step - 1e-12)));
  const double step = sweep / n;
  const double outer_r = d.radius / std::cos(step / 2.0);
  for (int k = 0; k < n; ++k) out.push_back(d.center + std::polar(outer_r, start_angle + (k + 0.5) * step));
  out.push_back(d.center + std::polar(d.radius, start_angle + sweep));
  return out;
}

}  // namespace sforge
