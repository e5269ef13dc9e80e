#pragma once

// Exact-formula layer: complex points, discs, Mobius and anti-Mobius maps,
// circle inversion, the hyperbolic metric of the unit disc and jet matching.

#include <complex>
#include <limits>
#include <vector>

namespace sforge {

using Complex = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

/// Designated point at infinity. Only reflections and poles ever produce it.
inline Complex infinity_point() {
  const double inf = std::numeric_limits<double>::infinity();
  return {inf, inf};
}
inline bool is_infinity(Complex z) { return std::isinf(z.real()) || std::isinf(z.imag()); }

inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

struct Disc {
  Complex center;
  double radius = 1.0;

  Disc() = default;
  Disc(Complex c, double r);

  bool contains_open(Complex z) const { return std::abs(z - center) < radius; }
  bool contains_closed(Complex z) const { return std::abs(z - center) <= radius; }
  double area() const { return kPi * radius * radius; }
  Complex point_at(double theta) const { return center + std::polar(radius, theta); }
};

enum class Orientation { Preserving, Reversing };

/// z -> (a z + b)/(c z + d), applied to conj(z) when reversing.
class MobiusMap {
 public:
  MobiusMap();  // identity
  MobiusMap(Complex a, Complex b, Complex c, Complex d, Orientation o = Orientation::Preserving);

  static MobiusMap identity() { return {}; }
  /// Unique preserving map sending z1, z2, z3 to w1, w2, w3.
  static MobiusMap from_three_points(Complex z1, Complex z2, Complex z3, Complex w1, Complex w2,
                                     Complex w3);
  /// Reflection in the boundary circle of d, as a reversing map.
  static MobiusMap reflection(const Disc& d);

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }
  Complex d() const { return d_; }
  Orientation orientation() const { return orient_; }
  bool reversing() const { return orient_ == Orientation::Reversing; }

  /// Throws a domain error at the pole unless extended-plane semantics are requested.
  Complex apply(Complex z, bool extended = false) const;
  /// Complex derivative of a preserving map.
  Complex derivative(Complex z) const;
  Complex second_derivative(Complex z) const;
  Complex pole() const;

  MobiusMap inverse() const;
  /// (this o other)(z) = this(other(z)).
  MobiusMap compose(const MobiusMap& other) const;

  Complex determinant() const { return a_ * d_ - b_ * c_; }

 private:
  Complex a_, b_, c_, d_;
  Orientation orient_;
};

Complex reflect_in_circle(const Disc& d, Complex z);

/// Round-disc image of d under inversion in the mirror circle.
Disc reflect_disc(const Disc& mirror, const Disc& d);

/// Poincare distance in the unit disc.
double hyperbolic_distance(Complex p, Complex q);

struct Jet2 {
  Complex base;
  Complex value;
  Complex d1;
  Complex d2;
};

MobiusMap mobius_from_jet(const Jet2& j);

/// Principal square root with the branch fixed by Re >= 0, then Im >= 0.
Complex canonical_sqrt(Complex z);

/// Algebraic least-squares circle through points, refined by Gauss-Newton.
Disc fit_circle(const std::vector<Complex>& pts);

/// Largest deviation of the points from the given circle.
double circle_deviation(const Disc& d, const std::vector<Complex>& pts);

/// Circle through three non-collinear points.
Disc circle_through(Complex a, Complex b, Complex c);

}  // namespace sforge
