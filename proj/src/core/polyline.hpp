#pragma once

#include <vector>

#include "geometry.hpp"

namespace sforge {

/// Ordered vertex list. A one-vertex polyline is the degenerate point curve.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Complex> vertices, bool closed = false);

  const std::vector<Complex>& vertices() const { return v_; }
  bool closed() const { return closed_; }
  size_t size() const { return v_.size(); }
  size_t segment_count() const;
  Complex segment_start(size_t i) const { return v_[i]; }
  Complex segment_end(size_t i) const { return v_[(i + 1) % v_.size()]; }
  Complex front() const { return v_.front(); }
  Complex back() const { return v_.back(); }

  double length() const;
  double diameter() const;
  /// Point at arc length s measured from the first vertex (wraps when closed).
  Complex point_at_length(double s) const;
  /// n points equally spaced in arc length; closed curves omit the duplicate end.
  std::vector<Complex> resample(int n) const;
  double signed_area() const;

 private:
  std::vector<Complex> v_;
  bool closed_ = false;
};

double point_segment_distance(Complex p, Complex a, Complex b);
/// Parameter in [0,1] of the closest point of [a,b] to p.
double project_on_segment(Complex p, Complex a, Complex b);
double segment_segment_distance(Complex a, Complex b, Complex c, Complex d);
/// Proper or touching intersection of [a,b] and [c,d]; s, t are the parameters on each.
bool segment_intersection(Complex a, Complex b, Complex c, Complex d, double* s = nullptr, double* t = nullptr);
/// Parameters t in [0,1] where a + t (b - a) lies on the circle, sorted.
std::vector<double> segment_circle_intersections(Complex a, Complex b, const Disc& d);

double distance_to_polyline(Complex p, const Polyline& l);
double polyline_distance(const Polyline& a, const Polyline& b);
/// Winding number of a closed polyline around p (zero outside).
int winding_number(const Polyline& closed_curve, Complex p);
bool is_simple(const Polyline& closed_curve);

/// Exact circle arc discretised by tangent segments so the path never enters the open disc.
/// Sweep is signed (positive = counterclockwise). Returns vertices after the start point.
std::vector<Complex> circumscribed_arc(const Disc& d, double start_angle, double sweep, double max_step);

}  // namespace sforge
