#pragma once

#include <string>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "polyline.hpp"

namespace sforge {

struct Box {
  double xmin, ymin, xmax, ymax;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

/// Outer boundary: a circle or a simple closed polyline stored counterclockwise.
class JordanBoundary {
 public:
  enum class Kind { Circle, Polyline };

  JordanBoundary() : JordanBoundary(Disc(0.0, 1.0)) {}
  explicit JordanBoundary(const Disc& circle);
  explicit JordanBoundary(const Polyline& closed_polyline);

  Kind kind() const { return kind_; }
  bool is_circle() const { return kind_ == Kind::Circle; }
  const Disc& circle() const { return circle_; }
  const Polyline& polygon() const { return poly_; }

  bool contains(Complex z) const;
  double distance(Complex z) const;
  double diameter() const { return diam_; }
  double perimeter() const { return perimeter_; }
  Box bbox() const;
  /// Boundary parameter in [0,1) of the closest boundary point, counterclockwise.
  double param(Complex z) const;
  Complex point(double t) const;
  /// Outward unit normal at parameter t.
  Complex normal(double t) const;
  std::vector<Complex> samples(int n) const;
  /// Parameters along [a,b] where the segment meets the boundary, sorted, with boundary params.
  std::vector<std::pair<double, double>> crossings(Complex a, Complex b) const;
  /// Closed polyline approximation (circles use n samples).
  Polyline as_polyline(int n = 512) const;

 private:
  Kind kind_;
  Disc circle_;
  Polyline poly_;
  std::vector<double> cum_;  // cumulative arc length at vertices
  double perimeter_ = 0.0;
  double diam_ = 0.0;
};

struct RelativeSchottkySet {
  JordanBoundary outer;
  std::vector<Disc> discs;
  std::vector<Complex> marks;  // empty or exactly three
  std::string meta = "{}";     // free-form JSON text, carried through I/O

  /// Closed-set membership of S: inside closure(Omega) and outside every open disc.
  bool contains(Complex z, double tol = 0.0) const;
  /// Distance from z to the closed set S (zero when z belongs to it).
  double distance_to_set(Complex z) const;
  double scale() const { return outer.diameter(); }
};

struct Violation {
  std::string kind;  // "closures intersect", "closure not inside Ω", ...
  std::vector<int> discs;
  double measured = 0.0;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Gap below which closures count as touching, relative to diam(Omega).
constexpr double kGapThreshold = 1e-9;

ValidationReport validate(const RelativeSchottkySet& s);

using PlanarSet = std::variant<Polyline, Disc>;
double relative_distance(const PlanarSet& e, const PlanarSet& f);

struct OrbitDisc {
  Disc disc;
  std::vector<int> word;  // outermost generator first
  int source = 0;         // index of the original disc
  int depth() const { return static_cast<int>(word.size()); }
};

std::vector<OrbitDisc> group_orbit(const RelativeSchottkySet& s, int max_depth);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

Estimate area_fraction(const RelativeSchottkySet& s, int samples, uint64_t seed);

double config_hausdorff(const RelativeSchottkySet& a, const RelativeSchottkySet& b, int boundary_samples = 512);

}  // namespace sforge
