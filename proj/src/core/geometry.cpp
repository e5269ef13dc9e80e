#include "geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "errors.hpp"

namespace sforge {

Disc::Disc(Complex c, double r) : center(c), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw domain_error("disc radius must be positive and finite");
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw domain_error("disc center must be finite");
}

Complex canonical_sqrt(Complex z) {
  Complex s = std::sqrt(z);
  if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0)) s = -s;
  return s;
}

MobiusMap::MobiusMap() : a_(1.0), b_(0.0), c_(0.0), d_(1.0), orient_(Orientation::Preserving) {}

MobiusMap::MobiusMap(Complex a, Complex b, Complex c, Complex d, Orientation o)
    : a_(a), b_(b), c_(c), d_(d), orient_(o) {
  const Complex det = a * d - b * c;
  if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det))) throw domain_error("degenerate Mobius coefficients");
  const Complex s = canonical_sqrt(det);
  a_ /= s;
  b_ /= s;
  c_ /= s;
  d_ /= s;
}

MobiusMap MobiusMap::from_three_points(Complex z1, Complex z2, Complex z3, Complex w1, Complex w2, Complex w3) {
  auto cross_ratio_map = [](Complex p1, Complex p2, Complex p3) {
    if (p1 == p2 || p2 == p3 || p1 == p3) throw domain_error("three-point Mobius needs distinct points");
    return MobiusMap(p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1));
  };
  const MobiusMap tz = cross_ratio_map(z1, z2, z3);
  const MobiusMap tw = cross_ratio_map(w1, w2, w3);
  return tw.inverse().compose(tz);
}

MobiusMap MobiusMap::reflection(const Disc& d) {
  const Complex c = d.center;
  const double r = d.radius;
  return MobiusMap(c, r * r - std::norm(c), 1.0, -std::conj(c), Orientation::Reversing);
}

Complex MobiusMap::apply(Complex z, bool extended) const {
  if (is_infinity(z)) {
    if (c_ == 0.0) return infinity_point();
    return reversing() ? a_ / c_ : a_ / c_;
  }
  const Complex w = reversing() ? std::conj(z) : z;
  const Complex den = c_ * w + d_;
  if (den == 0.0) {
    if (extended) return infinity_point();
    throw domain_error("Mobius map evaluated at its pole");
  }
  return (a_ * w + b_) / den;
}

Complex MobiusMap::derivative(Complex z) const {
  const Complex den = c_ * z + d_;
  return 1.0 / (den * den);
}

Complex MobiusMap::second_derivative(Complex z) const {
  const Complex den = c_ * z + d_;
  return -2.0 * c_ / (den * den * den);
}

Complex MobiusMap::pole() const {
  if (c_ == 0.0) return infinity_point();
  const Complex p = -d_ / c_;
  return reversing() ? std::conj(p) : p;
}

MobiusMap MobiusMap::inverse() const {
  if (!reversing()) return MobiusMap(d_, -b_, -c_, a_);
  return MobiusMap(std::conj(d_), -std::conj(b_), -std::conj(c_), std::conj(a_), Orientation::Reversing);
}

MobiusMap MobiusMap::compose(const MobiusMap& other) const {
  Complex oa = other.a_, ob = other.b_, oc = other.c_, od = other.d_;
  if (reversing()) {
    oa = std::conj(oa);
    ob = std::conj(ob);
    oc = std::conj(oc);
    od = std::conj(od);
  }
  const Orientation o = (reversing() != other.reversing()) ? Orientation::Reversing : Orientation::Preserving;
  return MobiusMap(a_ * oa + b_ * oc, a_ * ob + b_ * od, c_ * oa + d_ * oc, c_ * ob + d_ * od, o);
}

Complex reflect_in_circle(const Disc& d, Complex z) {
  const Complex u = z - d.center;
  if (u == 0.0) return infinity_point();
  if (is_infinity(z)) return d.center;
  return d.center + d.radius * d.radius / std::conj(u);
}

Disc reflect_disc(const Disc& mirror, const Disc& d) {
  const Complex u = d.center - mirror.center;
  const double den = std::norm(u) - d.radius * d.radius;
  if (den <= 0.0) throw domain_error("disc closure contains the mirror center; image is not a bounded disc");
  const double r2 = mirror.radius * mirror.radius;
  return Disc(mirror.center + r2 * u / den, r2 * d.radius / den);
}

double hyperbolic_distance(Complex p, Complex q) {
  if (!(std::abs(p) < 1.0) || !(std::abs(q) < 1.0)) throw domain_error("hyperbolic distance needs points inside the unit disc");
  const double t = std::abs((p - q) / (1.0 - p * std::conj(q)));
  return 2.0 * std::atanh(std::min(t, 1.0));
}

MobiusMap mobius_from_jet(const Jet2& j) {
  if (j.d1 == 0.0) throw domain_error("jet derivative vanishes; no conformal Mobius match");
  const Complex s = canonical_sqrt(j.d1);
  const Complex a = s * (1.0 - j.value * j.d2 / (2.0 * j.d1 * j.d1));
  const Complex b = j.value / s;
  const Complex c = -j.d2 / (2.0 * j.d1 * s);
  const Complex d = 1.0 / s;
  const MobiusMap local(a, b, c, d);
  const MobiusMap shift(1.0, -j.base, 0.0, 1.0);
  return local.compose(shift);
}

Disc circle_through(Complex a, Complex b, Complex c) {
  const Complex ab = b - a, ac = c - a;
  const double den = 2.0 * cross(ab, ac);
  if (den == 0.0) throw domain_error("collinear points have no circumcircle");
  const Complex center = a + Complex(ac.imag() * std::norm(ab) - ab.imag() * std::norm(ac),
                                     ab.real() * std::norm(ac) - ac.real() * std::norm(ab)) /
                                 den;
  return Disc(center, std::abs(center - a));
}

Disc fit_circle(const std::vector<Complex>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw domain_error("circle fit needs at least three points");
  Complex mean = 0.0;
  for (Complex p : pts) mean += p;
  mean /= static_cast<double>(n);
  double scale = 0.0;
  for (Complex p : pts) scale = std::max(scale, std::abs(p - mean));
  if (scale == 0.0) throw domain_error("circle fit on coincident points");
  // Kasa fit in centred, scaled coordinates: x^2 + y^2 + D x + E y + F = 0.
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const Complex q = (pts[i] - mean) / scale;
    A(i, 0) = q.real();
    A(i, 1) = q.imag();
    A(i, 2) = 1.0;
    rhs(i) = -std::norm(q);
  }
  const Eigen::Vector3d s = A.colPivHouseholderQr().solve(rhs);
  Complex c(-s(0) / 2.0, -s(1) / 2.0);
  double r = std::sqrt(std::max(std::norm(c) - s(2), 1e-300));
  // Geometric refinement.
  for (int it = 0; it < 20; ++it) {
    Eigen::MatrixXd J(n, 3);
    Eigen::VectorXd res(n);
    for (int i = 0; i < n; ++i) {
      const Complex q = (pts[i] - mean) / scale;
      const Complex e = q - c;
      const double dist = std::abs(e);
      const Complex u = dist > 0.0 ? e / dist : Complex(1.0, 0.0);
      res(i) = dist - r;
      J(i, 0) = -u.real();
      J(i, 1) = -u.imag();
      J(i, 2) = -1.0;
    }
    const Eigen::Vector3d step = J.colPivHouseholderQr().solve(-res);
    c += Complex(step(0), step(1));
    r += step(2);
    if (step.norm() < 1e-15) break;
  }
  return Disc(mean + c * scale, std::abs(r) * scale);
}

double circle_deviation(const Disc& d, const std::vector<Complex>& pts) {
  double worst = 0.0;
  for (Complex p : pts) worst = std::max(worst, std::abs(std::abs(p - d.center) - d.radius));
  return worst;
}

}  // namespace sforge
