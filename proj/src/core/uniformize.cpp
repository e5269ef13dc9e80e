#include "uniformize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace sforge {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

Error nonconvergence(const std::string& msg) { return Error(ErrorKind::NonConvergence, msg); }

// Branch of sqrt(t^2 + c^2) that maps the upper half plane minus the slit [0, ic] onto the
// upper half plane and commutes with conjugation.
Complex slit_sqrt(Complex t, double c) {
  Complex s = std::sqrt(t * t + c * c);
  if (t.imag() != 0.0) {
    if (s.imag() * t.imag() < 0.0) s = -s;
  } else if (t.real() < 0.0) {
    s = -s;
  }
  return s;
}

// Inverse branch: sqrt(w^2 - c^2) in the closed upper half plane, sign-preserving on the real line.
Complex slit_sqrt_inverse(Complex w, double c) {
  Complex t = std::sqrt(w * w - c * c);
  if (t.imag() < 0.0) t = -t;
  if (t.imag() == 0.0 && w.imag() == 0.0 && (t.real() < 0.0) != (w.real() < 0.0)) t = -t;
  return t;
}

double wrap01(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

std::vector<double> unwrap(const std::vector<Complex>& pts, Complex centre) {
  std::vector<double> a(pts.size());
  for (size_t k = 0; k < pts.size(); ++k) {
    a[k] = std::arg(pts[k] - centre);
    if (k > 0) {
      while (a[k] - a[k - 1] > kPi) a[k] -= kTwoPi;
      while (a[k] - a[k - 1] < -kPi) a[k] += kTwoPi;
    }
  }
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Zipper

ZipperMap ZipperMap::build(const std::vector<Complex>& pts) {
  const size_t n = pts.size();
  if (n < 3) throw precondition_error("zipper needs at least three boundary samples");
  for (size_t k = 0; k < n; ++k)
    if (pts[k] == pts[(k + 1) % n]) throw precondition_error("repeated zipper sample");
  ZipperMap z;
  z.z0_ = pts[0];
  z.z1_ = pts[1];
  std::vector<Complex> w(n);
  for (size_t k = 2; k < n; ++k) w[k] = Complex(0.0, 1.0) * std::sqrt((pts[k] - z.z1_) / (pts[k] - z.z0_));
  // A zipped sample sits on the real line; at the base of the next slit its interior side is the
  // left side, which opens to the negative reals for counterclockwise samples.
  double area = 0.0;
  for (size_t k = 0; k < n; ++k) area += cross(pts[k], pts[(k + 1) % n]);
  const double sigma = area > 0.0 ? -1.0 : 1.0;
  z.sigma_ = sigma;
  auto real_slit = [sigma](double x, double binv, double c) {
    const double t = x / (1.0 - x * binv);
    return t == 0.0 ? sigma * c : std::copysign(std::sqrt(t * t + c * c), t);
  };
  std::vector<double> x(n, 0.0);
  bool zeta_inf = true;
  double zeta = 0.0;
  z.geo_.reserve(n - 2);
  for (size_t k = 2; k < n; ++k) {
    const Complex a = w[k];
    if (!(a.imag() > 0.0)) throw domain_error("zipper sample left the upper half plane");
    const double binv = a.real() / std::norm(a), c = std::norm(a) / a.imag();
    z.geo_.push_back({binv, c});
    for (size_t j = k + 1; j < n; ++j) w[j] = slit_sqrt(w[j] / (1.0 - w[j] * binv), c);
    for (size_t j = 1; j < k; ++j) x[j] = real_slit(x[j], binv, c);
    x[k] = 0.0;
    if (zeta_inf) {
      if (binv != 0.0) {
        zeta = -std::copysign(std::sqrt(1.0 / (binv * binv) + c * c), binv);
        zeta_inf = false;
      }
    } else {
      zeta = real_slit(zeta, binv, c);
    }
  }
  z.zeta0_inv_ = zeta_inf ? 0.0 : 1.0 / zeta;
  z.samples_.resize(n);
  z.samples_[0] = Complex(std::numeric_limits<double>::infinity(), 0.0);
  for (size_t j = 1; j < n; ++j) {
    const double t = x[j] / (1.0 - x[j] * z.zeta0_inv_);
    z.samples_[j] = t * t;
  }
  return z;
}

Complex ZipperMap::apply(Complex z) const {
  if (z == z0_) return Complex(std::numeric_limits<double>::infinity(), 0.0);
  Complex w = Complex(0.0, 1.0) * std::sqrt((z - z1_) / (z - z0_));
  for (const auto& [binv, c] : geo_) {
    const Complex t = w / (1.0 - w * binv);
    if (t == 0.0) {
      w = sigma_ * c;  // base of the slit, taken from the interior side
    } else if (std::abs(t * t + c * c) <= 1e-14 * c * c) {
      w = 0.0;  // tip of the slit: a build sample
    } else {
      w = slit_sqrt(t, c);
    }
  }
  const Complex t = w / (1.0 - w * zeta0_inv_);
  return t * t;
}

Complex ZipperMap::derivative(Complex z) const {
  const Complex q = (z - z1_) / (z - z0_);
  const Complex s = std::sqrt(q);
  Complex w = Complex(0.0, 1.0) * s;
  Complex d = Complex(0.0, 1.0) * ((z1_ - z0_) / ((z - z0_) * (z - z0_))) / (2.0 * s);
  for (const auto& [binv, c] : geo_) {
    const Complex den = 1.0 - w * binv;
    const Complex t = w / den;
    const Complex f = slit_sqrt(t, c);
    d *= t / (den * den) / f;
    w = f;
  }
  const Complex den = 1.0 - w * zeta0_inv_;
  const Complex t = w / den;
  return d * 2.0 * t / (den * den);
}

Complex ZipperMap::inverse(Complex w) const {
  Complex t = std::sqrt(w);
  if (t.imag() < 0.0) t = -t;
  Complex z = t / (1.0 + t * zeta0_inv_);
  for (auto it = geo_.rbegin(); it != geo_.rend(); ++it) {
    const Complex s = slit_sqrt_inverse(z, it->second);
    z = s / (1.0 + s * it->first);
  }
  const Complex q = -z * z;
  return (z1_ - q * z0_) / (1.0 - q);
}

// ---------------------------------------------------------------------------
// Series maps

Complex ExteriorSeriesMap::apply(Complex z) const {
  const Complex zi = r / (z - c);
  Complex u = 0.0;
  for (auto it = b.rbegin(); it != b.rend(); ++it) u = (u + *it) * zi;
  return c + (z - c) * std::exp(u);
}

Complex ExteriorSeriesMap::derivative(Complex z) const {
  const Complex zi = r / (z - c);
  Complex u = 0.0, du = 0.0;  // du = d u / d zi
  for (size_t k = b.size(); k-- > 0;) {
    du = du * zi + static_cast<double>(k + 1) * b[k];
    u = (u + b[k]) * zi;
  }
  // d zi / dz = -zi^2 / r
  return std::exp(u) * (1.0 + (z - c) * du * (-zi * zi / r));
}

Complex ExteriorSeriesMap::inverse(Complex w) const {
  Complex z = w;
  for (int it = 0; it < 100; ++it) {
    const Complex step = (apply(z) - w) / derivative(z);
    z -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) return z;
  }
  throw nonconvergence("exterior series inverse did not converge");
}

Complex InteriorSeriesMap::apply(Complex z) const {
  Complex v = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * z + *it;
  return z * std::exp(v);
}

Complex InteriorSeriesMap::derivative(Complex z) const {
  Complex v = 0.0, dv = 0.0;
  for (size_t k = a.size(); k-- > 0;) {
    dv = dv * z + v;
    v = v * z + a[k];
  }
  return std::exp(v) * (1.0 + z * dv);
}

Complex InteriorSeriesMap::inverse(Complex w) const {
  Complex z = w;
  for (int it = 0; it < 100; ++it) {
    const Complex step = (apply(z) - w) / derivative(z);
    z -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) return z;
  }
  throw nonconvergence("interior series inverse did not converge");
}

// ---------------------------------------------------------------------------
// Chain

namespace {

Complex step_apply(const MapStep& s, Complex z) {
  return std::visit([z](const auto& m) { return m.apply(z); }, s);
}

Complex step_derivative(const MapStep& s, Complex z) {
  return std::visit([z](const auto& m) { return m.derivative(z); }, s);
}

Complex step_inverse(const MapStep& s, Complex w) {
  if (const auto* m = std::get_if<MobiusMap>(&s)) return m->inverse().apply(w);
  return std::visit(
      [w](const auto& m) -> Complex {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MobiusMap>) return w;
        else return m.inverse(w);
      },
      s);
}

}  // namespace

Complex DiscreteConformalMap::operator()(Complex z) const {
  for (const auto& s : steps_) z = step_apply(s, z);
  return z;
}

Complex DiscreteConformalMap::derivative(Complex z) const {
  Complex d = 1.0;
  for (const auto& s : steps_) {
    d *= step_derivative(s, z);
    z = step_apply(s, z);
  }
  return d;
}

Complex DiscreteConformalMap::inverse(Complex w) const {
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) w = step_inverse(*it, w);
  return w;
}

size_t DiscreteConformalMap::elementary_count() const {
  size_t n = 0;
  for (const auto& s : steps_) {
    if (const auto* z = std::get_if<ZipperMap>(&s)) n += z->size();
    else if (const auto* e = std::get_if<ExteriorSeriesMap>(&s)) n += e->b.size();
    else if (const auto* i = std::get_if<InteriorSeriesMap>(&s)) n += i->a.size();
    else ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Outer normalization

namespace {

struct OuterSamples {
  std::vector<Complex> pts;
  std::vector<double> param;
  int mark[3] = {-1, -1, -1};
};

void check_marks(const JordanBoundary& b, const Complex* marks) {
  const double tol = 1e-6 * std::max(1.0, b.diameter());
  double t[3];
  for (int k = 0; k < 3; ++k) {
    if (!std::isfinite(marks[k].real()) || !std::isfinite(marks[k].imag()))
      throw precondition_error("marks must be finite");
    if (b.distance(marks[k]) > tol) throw precondition_error("marks must lie on the outer boundary");
    t[k] = b.param(marks[k]);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(marks[i] - marks[j]) <= tol) throw precondition_error("marks must be distinct");
  if (!(wrap01(t[1] - t[0]) < wrap01(t[2] - t[0]))) throw precondition_error("marks are not in positive order");
}

// Boundary samples graded towards polygon corners, with the marks inserted exactly.
OuterSamples outer_samples(const JordanBoundary& b, const Complex* marks, const RiemannOptions& opt) {
  OuterSamples out;
  std::vector<std::pair<double, Complex>> items;
  if (b.is_circle()) {
    const int n = opt.circle_samples;
    for (int k = 0; k < n; ++k) items.push_back({static_cast<double>(k) / n, b.point(static_cast<double>(k) / n)});
  } else {
    const auto& v = b.polygon().vertices();
    const size_t nv = v.size();
    for (size_t e = 0; e < nv; ++e) {
      const Complex p = v[e], q = v[(e + 1) % nv];
      const int m = std::max(8, static_cast<int>(std::lround(opt.polygon_samples * std::abs(q - p) / b.perimeter())));
      for (int k = 0; k < m; ++k) {
        const double s = 0.5 * (1.0 - std::cos(kPi * k / m));
        const Complex z = p + s * (q - p);
        items.push_back({b.param(z), z});
      }
    }
  }
  const double local = b.perimeter() / std::max<size_t>(items.size(), 1);
  for (int k = 0; k < 3; ++k) {
    const double tm = b.param(marks[k]);
    // Drop samples that would crowd the mark.
    items.erase(std::remove_if(items.begin(), items.end(),
                               [&](const auto& it) {
                                 return std::abs(it.second - marks[k]) < 0.25 * local && it.second != marks[k];
                               }),
                items.end());
    bool present = false;
    for (const auto& it : items)
      if (it.second == marks[k]) present = true;
    if (!present) items.push_back({tm, marks[k]});
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b2) { return a.first < b2.first; });
  for (const auto& [t, z] : items) {
    out.param.push_back(wrap01(t));
    out.pts.push_back(z);
  }
  for (int k = 0; k < 3; ++k)
    for (size_t i = 0; i < out.pts.size(); ++i)
      if (out.pts[i] == marks[k]) out.mark[k] = static_cast<int>(i);
  return out;
}

// A point of the domain far from its boundary.
Complex interior_point(const JordanBoundary& b) {
  if (b.is_circle()) return b.circle().center;
  const Box box = b.bbox();
  Complex best = 0.0;
  double dist = -1.0;
  const int n = 64;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      const Complex z(box.xmin + box.width() * i / n, box.ymin + box.height() * j / n);
      if (!b.contains(z)) continue;
      const double d = b.distance(z);
      if (d > dist) {
        dist = d;
        best = z;
      }
    }
  if (dist <= 0.0) throw internal_error("no interior point found");
  return best;
}

MobiusMap marks_to_standard(Complex m1, Complex m2, Complex m3) {
  return MobiusMap::from_three_points(m1, m2, m3, Complex(1, 0), Complex(0, 1), Complex(-1, 0));
}

struct OuterNormalization {
  std::vector<MapStep> steps;
  std::vector<Complex> images;  // interior-side images of the outer samples on the unit circle
};

// Steps taking the outer domain onto the unit disc with the marks at 1, i, -1.
OuterNormalization outer_steps(const JordanBoundary& b, const OuterSamples& os) {
  OuterNormalization out;
  MobiusMap last;
  if (b.is_circle()) {
    const Disc& d = b.circle();
    last = MobiusMap(1.0 / d.radius, -d.center / d.radius, 0.0, 1.0);
    out.images = os.pts;
  } else {
    // Open the zipper at the widest gap; a short first segment squeezes the whole domain
    // towards one point and costs digits.
    const size_t n = os.pts.size();
    size_t start = 0;
    for (size_t k = 1; k < n; ++k)
      if (std::abs(os.pts[(k + 1) % n] - os.pts[k]) > std::abs(os.pts[(start + 1) % n] - os.pts[start])) start = k;
    std::vector<Complex> rotated(n);
    for (size_t k = 0; k < n; ++k) rotated[k] = os.pts[(start + k) % n];
    ZipperMap z = ZipperMap::build(rotated);
    const Complex p = z.apply(interior_point(b));
    if (std::abs(p.imag()) <= 1e-300) throw internal_error("interior reference point mapped to the boundary");
    last = MobiusMap(1.0, -p, 1.0, -std::conj(p));
    out.images.resize(n);
    for (size_t k = 0; k < n; ++k) out.images[(start + k) % n] = z.sample_images()[k];
    out.steps.push_back(std::move(z));
  }
  for (auto& w : out.images) {
    w = last.apply(w);
    w /= std::abs(w);
  }
  const MobiusMap m = marks_to_standard(out.images[os.mark[0]], out.images[os.mark[1]], out.images[os.mark[2]]);
  for (auto& w : out.images) {
    w = m.apply(w);
    w /= std::abs(w);
  }
  for (int k = 0; k < 3; ++k) out.images[os.mark[k]] = std::array{Complex(1, 0), Complex(0, 1), Complex(-1, 0)}[k];
  out.steps.push_back(m.compose(last));
  return out;
}

}  // namespace

DiscreteConformalMap riemann_map(const JordanBoundary& domain, Complex p1, Complex p2, Complex p3,
                                 const RiemannOptions& opt) {
  const Complex marks[3] = {p1, p2, p3};
  check_marks(domain, marks);
  const OuterSamples os = outer_samples(domain, marks, opt);
  DiscreteConformalMap map;
  map.source.outer = domain;
  map.source.marks = {p1, p2, p3};
  map.target.outer = JordanBoundary(Disc(0.0, 1.0));
  map.target.marks = {Complex(1, 0), Complex(0, 1), Complex(-1, 0)};
  OuterNormalization on = outer_steps(domain, os);
  for (auto& s : on.steps) map.push(std::move(s));
  const std::vector<Complex>& img = on.images;
  BoundaryCorrespondence bc;
  bc.component = -1;
  bc.source = os.param;
  bc.image = unwrap(img, 0.0);
  map.correspondences.push_back(std::move(bc));
  map.residual = boundary_residual(map, domain, 512);
  return map;
}

double boundary_residual(const DiscreteConformalMap& map, const JordanBoundary& domain, int n) {
  double worst = 0.0;
  for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(std::abs(map(domain.point((k + 0.5) / n))) - 1.0));
  return worst;
}

// ---------------------------------------------------------------------------
// Series fits

namespace {

struct Fit {
  MapStep step;
  double deviation;
};

// Least-squares fit of Re u = log(rho) - log|z - c| on the samples.
ExteriorSeriesMap fit_exterior(const std::vector<Complex>& pts, const Disc& guess, int K) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd A(n, 2 * K + 1);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const Complex zi = guess.radius / (pts[i] - guess.center);
    Complex p = 1.0;
    A(i, 0) = -1.0;
    for (int k = 0; k < K; ++k) {
      p *= zi;
      A(i, 1 + 2 * k) = p.real();
      A(i, 2 + 2 * k) = -p.imag();
    }
    rhs(i) = -std::log(std::abs(pts[i] - guess.center) / guess.radius);
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);
  ExteriorSeriesMap m;
  m.c = guess.center;
  m.r = guess.radius;
  m.rho = guess.radius * std::exp(x(0));
  for (int k = 0; k < K; ++k) m.b.push_back(Complex(x(1 + 2 * k), x(2 + 2 * k)));
  return m;
}

InteriorSeriesMap fit_interior(const std::vector<Complex>& pts, int K) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd A(n, 2 * K + 1);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    Complex p = 1.0;
    A(i, 0) = 1.0;
    for (int k = 0; k < K; ++k) {
      p *= pts[i];
      A(i, 1 + 2 * k) = p.real();
      A(i, 2 + 2 * k) = -p.imag();
    }
    rhs(i) = -std::log(std::abs(pts[i]));
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);
  InteriorSeriesMap m;
  m.a.push_back(Complex(x(0), 0.0));
  for (int k = 0; k < K; ++k) m.a.push_back(Complex(x(1 + 2 * k), x(2 + 2 * k)));
  return m;
}

// Smallest series order whose fitted map rounds the samples to `target`, else the best tried.
template <class MakeFit, class Deviation>
Fit adaptive_fit(int n, double target, MakeFit make, Deviation dev) {
  Fit best{MobiusMap(), std::numeric_limits<double>::infinity()};
  for (int K = 4; K <= std::max(4, n / 4); K *= 2) {
    MapStep s = make(K);
    const double d = dev(s);
    if (d < best.deviation) best = {std::move(s), d};
    if (best.deviation <= target) break;
  }
  return best;
}

double unit_deviation(const std::vector<Complex>& pts) {
  double d = 0.0;
  for (Complex z : pts) d = std::max(d, std::abs(std::abs(z) - 1.0));
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Koebe iteration

KoebeResult koebe_uniformize(const RelativeSchottkySet& s, const KoebeOptions& opt) {
  if (!(opt.tol > 0.0)) throw precondition_error("tol must be positive");
  if (opt.max_sweeps < 0) throw precondition_error("max_sweeps must be non-negative");
  const ValidationReport vr = validate(s);
  if (!vr.ok) throw precondition_error("invalid scene: " + vr.violations.front().message);
  if (s.marks.size() != 3) throw precondition_error("three marks on the outer boundary are required");
  const Complex marks[3] = {s.marks[0], s.marks[1], s.marks[2]};
  check_marks(s.outer, marks);

  KoebeResult res;
  DiscreteConformalMap& map = res.map;
  map.source = s;
  const OuterSamples os = outer_samples(s.outer, marks, opt.riemann);
  const int nd = static_cast<int>(s.discs.size());
  const int nh = opt.disc_samples;
  const int no = 4 * ((s.outer.is_circle() ? opt.riemann.circle_samples : opt.riemann.polygon_samples) / 4);
  if (nh < 16 || no < 16) throw precondition_error("too few boundary samples");
  auto ring = [](Complex c, double r, int n) {
    std::vector<Complex> v(n);
    for (int k = 0; k < n; ++k) v[k] = c + std::polar(r, kTwoPi * k / n);
    return v;
  };
  // Tracked samples follow source boundary points through the chain. Fit samples lie evenly on
  // each component's current image and are reset to the fitted circle after each step.
  std::vector<std::vector<Complex>> track(nd + 1), fit(nd + 1);
  OuterNormalization on = outer_steps(s.outer, os);
  for (int j = 0; j < nd; ++j) track[j + 1] = ring(s.discs[j].center, s.discs[j].radius, nh);
  parallel_for(static_cast<size_t>(nd), [&](size_t j) {
    for (auto& z : track[j + 1])
      for (const auto& st : on.steps) z = step_apply(st, z);
  });
  for (auto& st : on.steps) map.push(std::move(st));
  track[0] = std::move(on.images);
  fit = track;
  fit[0] = ring(0.0, 1.0, no);
  const Complex standard[3] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0)};

  auto push_step = [&](MapStep st, int resampled) {
    parallel_for(static_cast<size_t>(nd + 1), [&](size_t c) {
      for (auto& z : track[c]) z = step_apply(st, z);
      if (static_cast<int>(c) != resampled)
        for (auto& z : fit[c]) z = step_apply(st, z);
    });
    map.push(std::move(st));
  };
  auto mark_residual = [&] {
    double r = 0.0;
    for (int k = 0; k < 3; ++k) r = std::max(r, std::abs(track[0][os.mark[k]] - standard[k]));
    return r;
  };
  auto component_residual = [&](int c) {
    if (c == 0) return std::max(unit_deviation(track[0]), unit_deviation(fit[0]));
    const Disc d = fit_circle(track[c]);
    return std::max(circle_deviation(d, track[c]), circle_deviation(fit_circle(fit[c]), fit[c]));
  };
  auto circle_residual = [&] {
    double r = 0.0;
    for (int c = 0; c <= nd; ++c) r = std::max(r, component_residual(c));
    return r;
  };

  UniformizeReport& rep = res.report;
  const double skip_below = 1e-2 * opt.tol;
  double cres = circle_residual();
  double nres = mark_residual();
  while (!(cres < opt.tol && nres < opt.tol) && rep.sweeps < opt.max_sweeps) {
    ++rep.sweeps;
    if (component_residual(0) > skip_below || nres > skip_below) {
      // Outer component onto the unit circle, then the marks back to 1, i, -1.
      Fit f = adaptive_fit(
          no, skip_below, [&](int K) -> MapStep { return fit_interior(fit[0], K); },
          [&](const MapStep& st) {
            double d = 0.0;
            for (Complex z : fit[0]) d = std::max(d, std::abs(std::abs(step_apply(st, z)) - 1.0));
            return d;
          });
      Complex mk[3];
      for (int k = 0; k < 3; ++k) {
        mk[k] = step_apply(f.step, track[0][os.mark[k]]);
        mk[k] /= std::abs(mk[k]);
      }
      push_step(std::move(f.step), 0);
      push_step(marks_to_standard(mk[0], mk[1], mk[2]), 0);
      fit[0] = ring(0.0, 1.0, no);
    }
    // Inner components by decreasing current radius.
    std::vector<Disc> guess(nd);
    for (int j = 0; j < nd; ++j) guess[j] = fit_circle(fit[j + 1]);
    std::vector<int> order(nd);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return guess[a].radius > guess[b].radius; });
    for (int j : order) {
      if (component_residual(j + 1) <= skip_below) continue;
      const Disc g = fit_circle(fit[j + 1]);
      Fit f = adaptive_fit(
          nh, skip_below, [&](int K) -> MapStep { return fit_exterior(fit[j + 1], g, K); },
          [&](const MapStep& st) {
            const auto& e = std::get<ExteriorSeriesMap>(st);
            double d = 0.0;
            for (Complex z : fit[j + 1]) d = std::max(d, std::abs(std::abs(e.apply(z) - e.c) - e.rho));
            return d;
          });
      const auto& e = std::get<ExteriorSeriesMap>(f.step);
      fit[j + 1] = ring(e.c, e.rho, nh);
      push_step(std::move(f.step), j + 1);
    }
    cres = circle_residual();
    nres = mark_residual();
    rep.history.push_back(cres);
  }
  rep.circle_residual = cres;
  rep.normalization_residual = nres;
  rep.converged = cres < opt.tol && nres < opt.tol;
  rep.boundary_residual = boundary_residual(map, s.outer, 512);

  RelativeSchottkySet& t = res.target;
  t.outer = JordanBoundary(Disc(0.0, 1.0));
  t.marks = {standard[0], standard[1], standard[2]};
  t.meta = s.meta;
  for (int j = 0; j < nd; ++j) t.discs.push_back(fit_circle(track[j + 1]));
  map.target = t;
  map.residual = cres;
  BoundaryCorrespondence outer;
  outer.component = -1;
  outer.source = os.param;
  outer.image = unwrap(track[0], 0.0);
  map.correspondences.push_back(std::move(outer));
  for (int j = 0; j < nd; ++j) {
    BoundaryCorrespondence bc;
    bc.component = j;
    for (int k = 0; k < nh; ++k) bc.source.push_back(kTwoPi * k / nh);
    bc.image = unwrap(track[j + 1], t.discs[j].center);
    map.correspondences.push_back(std::move(bc));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Radial extension

RadialExtension::RadialExtension(const Disc& from, const Disc& to, std::vector<double> theta, std::vector<double> image)
    : from_(from), to_(to), theta_(std::move(theta)), image_(std::move(image)) {
  const size_t n = theta_.size();
  if (n < 3 || image_.size() != n) throw precondition_error("correspondence needs matching samples");
  for (size_t k = 0; k < n; ++k)
    if (!std::isfinite(theta_[k]) || !std::isfinite(image_[k])) throw precondition_error("non-finite correspondence");
  const double sign = image_.back() > image_.front() ? 1.0 : -1.0;
  for (size_t k = 1; k < n; ++k)
    if (!(theta_[k] > theta_[k - 1]) || !(sign * (image_[k] - image_[k - 1]) > 0.0))
      throw precondition_error("correspondence is not cyclically monotone");
  if (!(theta_.back() - theta_.front() < kTwoPi) || !(sign * (image_.back() - image_.front()) < kTwoPi))
    throw precondition_error("correspondence is not cyclically monotone");
  if (sign < 0.0) throw precondition_error("correspondence reverses orientation");
}

double RadialExtension::interpolate(const std::vector<double>& x, const std::vector<double>& y, double t) {
  const size_t n = x.size();
  // Periodic piecewise-linear interpolation with x, y both advancing by 2 pi per turn.
  double u = x.front() + std::fmod(std::fmod(t - x.front(), kTwoPi) + kTwoPi, kTwoPi);
  const size_t k = static_cast<size_t>(std::upper_bound(x.begin(), x.end(), u) - x.begin());
  double x0, x1, y0, y1;
  if (k == n) {
    x0 = x.back();
    y0 = y.back();
    x1 = x.front() + kTwoPi;
    y1 = y.front() + kTwoPi;
  } else {
    x0 = x[k - 1];
    y0 = y[k - 1];
    x1 = x[k];
    y1 = y[k];
  }
  const double s = x1 > x0 ? (u - x0) / (x1 - x0) : 0.0;
  return y0 + s * (y1 - y0) + (t - u);
}

double RadialExtension::image_angle(double theta) const { return interpolate(theta_, image_, theta); }

Complex RadialExtension::operator()(Complex z) const {
  const Complex d = z - from_.center;
  const double r = std::abs(d);
  if (r > from_.radius * (1.0 + 1e-12)) throw precondition_error("point outside the closed disc");
  if (r == 0.0) return to_.center;
  return to_.center + std::polar(r * to_.radius / from_.radius, image_angle(std::arg(d)));
}

Complex RadialExtension::inverse(Complex w) const {
  const Complex d = w - to_.center;
  const double r = std::abs(d);
  if (r > to_.radius * (1.0 + 1e-12)) throw precondition_error("point outside the closed image disc");
  if (r == 0.0) return from_.center;
  return from_.center + std::polar(r * from_.radius / to_.radius, interpolate(image_, theta_, std::arg(d)));
}

RadialExtension radial_extension(const std::function<Complex(Complex)>& boundary_map, const Disc& from,
                                 const Disc& to, int n) {
  std::vector<double> theta(n);
  std::vector<Complex> img(n);
  for (int k = 0; k < n; ++k) {
    theta[k] = kTwoPi * k / n;
    img[k] = boundary_map(from.point_at(theta[k]));
  }
  return RadialExtension(from, to, std::move(theta), unwrap(img, to.center));
}

RadialExtension radial_extension(const DiscreteConformalMap& map, int disc) {
  for (const auto& bc : map.correspondences)
    if (bc.component == disc) return RadialExtension(map.source.discs.at(disc), map.target.discs.at(disc), bc.source, bc.image);
  throw precondition_error("no correspondence for this disc");
}

// ---------------------------------------------------------------------------
// Sequences

SequenceResult uniformize_sequence(const RelativeSchottkySet& s, const std::vector<int>& n_list,
                                   const KoebeOptions& opt, double margin, int probe_points, uint64_t seed) {
  if (n_list.empty()) throw precondition_error("n_list must not be empty");
  for (size_t k = 0; k < n_list.size(); ++k) {
    if (n_list[k] < 0 || n_list[k] > static_cast<int>(s.discs.size())) throw precondition_error("n out of range");
    if (k > 0 && n_list[k] <= n_list[k - 1]) throw precondition_error("n_list must be increasing");
  }
  SequenceResult out;
  out.n_list = n_list;
  // Probe compactum: points of S at distance >= margin from the outer boundary.
  Rng rng(seed, "uniformize-sequence-probe");
  const Box box = s.outer.bbox();
  for (int tries = 0; tries < 200 * probe_points && static_cast<int>(out.probe.size()) < probe_points; ++tries) {
    const Complex z(rng.uniform(box.xmin, box.xmax), rng.uniform(box.ymin, box.ymax));
    if (!s.outer.contains(z) || s.outer.distance(z) < margin) continue;
    bool free = true;
    for (const Disc& d : s.discs)
      if (std::abs(z - d.center) <= d.radius + 1e-9) free = false;
    if (free) out.probe.push_back(z);
  }
  std::vector<std::vector<Complex>> values;
  for (int n : n_list) {
    RelativeSchottkySet prefix = s;
    prefix.discs.resize(n);
    KoebeResult r = koebe_uniformize(prefix, opt);
    const bool ok = r.report.converged;
    std::vector<Complex> v(out.probe.size());
    parallel_for(v.size(), [&](size_t i) { v[i] = r.map(out.probe[i]); });
    out.runs.push_back(std::move(r));
    if (!ok) {
      out.truncated = true;
      break;
    }
    if (!values.empty()) {
      const auto& prev = values.back();
      double sup = 0.0;
      for (size_t i = 0; i < v.size(); ++i) sup = std::max(sup, std::abs(v[i] - prev[i]));
      out.sup_deltas.push_back(sup);
      const size_t m = out.runs.size();
      out.hausdorff_deltas.push_back(config_hausdorff(out.runs[m - 2].target, out.runs[m - 1].target));
    }
    values.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derivative estimate

DerivativeEstimate estimate_derivative(const std::function<Complex(Complex)>& f, const RelativeSchottkySet& s,
                                       Complex p, std::vector<double> h_list) {
  if (!s.contains(p)) throw precondition_error("p must lie in S");
  const double clearance = s.outer.distance(p);
  if (h_list.empty()) h_list = {1e-1 * clearance, 3e-2 * clearance, 1e-2 * clearance, 3e-3 * clearance};
  std::sort(h_list.begin(), h_list.end(), std::greater<>());
  if (!(h_list.back() > 0.0)) throw precondition_error("scales must be positive");
  if (h_list.front() > clearance) throw precondition_error("clearance of p is below the largest scale");
  DerivativeEstimate est;
  const Complex fp = f(p);
  std::vector<bool> complete;
  for (double h : h_list) {
    Complex sum = 0.0;
    int used = 0;
    for (int m = 0; m < 8; ++m) {
      const Complex q = p + std::polar(h, kTwoPi * m / 8);
      if (!s.contains(q)) continue;
      sum += (f(q) - fp) / (q - p);
      ++used;
    }
    if (used == 0) continue;
    est.per_scale.push_back(sum / static_cast<double>(used));
    est.scales.push_back(h);
    complete.push_back(used == 8);
  }
  const size_t n = est.per_scale.size();
  if (n == 0) throw precondition_error("no valid difference quotients at any scale");
  // A full ring of eight directions cancels the error terms up to order h^7; partial rings
  // are first order in h and get linear extrapolation from the two finest scales.
  if (n >= 2 && !complete[n - 1]) {
    const double h0 = est.scales[n - 2], h1 = est.scales[n - 1];
    est.value = (h0 * est.per_scale[n - 1] - h1 * est.per_scale[n - 2]) / (h0 - h1);
  } else {
    est.value = est.per_scale[n - 1];
  }
  est.converged = n >= 2 && std::abs(est.per_scale[n - 1] - est.per_scale[n - 2]) <
                                1e-3 * std::max(1.0, std::abs(est.per_scale[n - 1]));
  if (!(std::abs(est.value) > 0.0)) throw domain_error("derivative estimate vanished");
  return est;
}

}  // namespace sforge
