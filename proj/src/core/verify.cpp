#include "verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace sforge {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Positive inside the outer boundary, negative outside.
double signed_clearance(const JordanBoundary& outer, Complex w) {
  const double d = outer.distance(w);
  return outer.contains(w) ? d : -d;
}

bool outside_open_discs(const RelativeSchottkySet& s, Complex z) {
  for (const Disc& d : s.discs)
    if (std::abs(z - d.center) < d.radius) return false;
  return true;
}

/// Uniform point of the disc B(c, r).
Complex uniform_in_ball(Rng& rng, Complex c, double r) {
  const double rho = r * std::sqrt(rng.uniform());
  return c + std::polar(rho, 2.0 * pi * rng.uniform());
}

/// Points of closure(A) in the open ball B(c, r): uniform interior points plus points on the
/// peripheral circles meeting the ball. At most `count` points from `count * 8` attempts.
std::vector<Complex> sample_set_in_ball(Rng& rng, const RelativeSchottkySet& s, Complex c, double r, int count) {
  std::vector<const Disc*> near;
  for (const Disc& d : s.discs)
    if (std::abs(d.center - c) < r + d.radius) near.push_back(&d);
  const int on_circles = near.empty() ? 0 : count / 8;
  std::vector<Complex> pts;
  pts.reserve(count);
  for (int attempt = 0; attempt < 8 * count && static_cast<int>(pts.size()) < count - on_circles; ++attempt) {
    const Complex z = uniform_in_ball(rng, c, r);
    if (std::abs(z - c) < r && s.outer.contains(z) && outside_open_discs(s, z)) pts.push_back(z);
  }
  for (int attempt = 0; attempt < 8 * on_circles && static_cast<int>(pts.size()) < count; ++attempt) {
    const Disc& d = *near[rng.index(static_cast<int>(near.size()))];
    const Complex z = d.point_at(2.0 * pi * rng.uniform());
    if (std::abs(z - c) < r && s.outer.contains(z)) pts.push_back(z);
  }
  return pts;
}

/// Points of closure(A) spread over Omega: uniform interior points and peripheral circle points.
std::vector<Complex> sample_set(Rng& rng, const RelativeSchottkySet& s, int count) {
  const Box b = s.outer.bbox();
  const int on_circles = s.discs.empty() ? 0 : count / 4;
  std::vector<Complex> pts;
  pts.reserve(count);
  for (int attempt = 0; attempt < 16 * count && static_cast<int>(pts.size()) < count - on_circles; ++attempt) {
    const Complex z(rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax));
    if (s.outer.contains(z) && outside_open_discs(s, z)) pts.push_back(z);
  }
  for (int k = 0; k < on_circles; ++k) {
    const Disc& d = s.discs[rng.index(static_cast<int>(s.discs.size()))];
    pts.push_back(d.point_at(2.0 * pi * rng.uniform()));
  }
  return pts;
}

/// Largest distance from `centre` to the outer boundary of s.
double outer_radius_about(const JordanBoundary& outer, Complex centre) {
  if (outer.is_circle()) return std::abs(outer.circle().center - centre) + outer.circle().radius;
  double r = 0.0;
  for (Complex v : outer.polygon().vertices()) r = std::max(r, std::abs(v - centre));
  return r;
}

std::vector<double> clearances(const Evaluator& g, const JordanBoundary& target, const std::vector<Complex>& pts) {
  std::vector<double> out(pts.size());
  parallel_for(pts.size(), [&](size_t i) {
    const Complex w = g(pts[i]);
    out[i] = finite(w) ? signed_clearance(target, w) : -inf;
  });
  return out;
}

/// Points of K_d for each d: level-set points at every d' >= d and pool points with clearance >= d.
std::vector<PropernessRow> clearance_table(const Evaluator& g, const RelativeSchottkySet& from,
                                           const JordanBoundary& to, const std::vector<double>& d_list,
                                           int samples, Rng& rng, bool inverse_side,
                                           std::vector<PropernessRow> rows) {
  const std::vector<Complex> pool = sample_set(rng, from, samples);
  std::vector<double> pool_d(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) pool_d[i] = from.outer.distance(pool[i]);

  const int level_n = std::max(16, samples / 4);
  std::vector<std::vector<Complex>> level(d_list.size());
  for (size_t j = 0; j < d_list.size(); ++j) {
    const double d = d_list[j];
    for (int k = 0; k < level_n; ++k) {
      const double t = (k + 0.5) / level_n;
      const Complex z = from.outer.point(t) - d * from.outer.normal(t);
      if (from.outer.contains(z) && from.outer.distance(z) >= d * (1.0 - 1e-9) && outside_open_discs(from, z))
        level[j].push_back(z);
    }
  }

  std::vector<Complex> all = pool;
  std::vector<double> all_d = pool_d;
  for (size_t j = 0; j < d_list.size(); ++j)
    for (Complex z : level[j]) {
      all.push_back(z);
      all_d.push_back(from.outer.distance(z));
    }
  const std::vector<double> c = clearances(g, to, all);

  for (size_t j = 0; j < d_list.size(); ++j) {
    double best = inf;
    int count = 0;
    for (size_t i = 0; i < all.size(); ++i) {
      if (all_d[i] < d_list[j] * (1.0 - 1e-9)) continue;
      best = std::min(best, c[i]);
      ++count;
    }
    if (!inverse_side) {
      if (count == 0) continue;
      rows.push_back({d_list[j], best, std::numeric_limits<double>::quiet_NaN(), count, 0});
    } else {
      for (PropernessRow& row : rows)
        if (row.d == d_list[j] && count > 0) {
          row.inverse_clearance = best;
          row.inverse_samples = count;
        }
    }
  }
  return rows;
}

/// Fourth-order central differences for g' and g'' along the real axis.
std::pair<Complex, Complex> central_jet(const Evaluator& g, Complex p, double h) {
  const Complex f0 = g(p), fp1 = g(p + h), fm1 = g(p - h), fp2 = g(p + 2.0 * h), fm2 = g(p - 2.0 * h);
  const Complex d1 = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
  const Complex d2 = (16.0 * (fp1 + fm1) - (fp2 + fm2) - 30.0 * f0) / (12.0 * h * h);
  return {d1, d2};
}

}  // namespace

double dilatation(const Evaluator& f, Complex p, const std::vector<double>& r_list, int samples) {
  if (r_list.empty()) throw precondition_error("dilatation needs at least one radius");
  if (samples < 8) throw precondition_error("dilatation needs at least 8 samples per circle");
  const Complex fp = f(p);
  double worst = 0.0;
  for (double r : r_list) {
    if (!(r > 0.0)) throw precondition_error("dilatation radii must be positive");
    double big = 0.0, small = inf;
    for (int k = 0; k < samples; ++k) {
      const double m = std::abs(f(p + std::polar(r, 2.0 * pi * k / samples)) - fp);
      if (!std::isfinite(m)) return inf;
      big = std::max(big, m);
      small = std::min(small, m);
    }
    if (small <= 1e-12 * big) return inf;
    worst = std::max(worst, big / small);
  }
  return worst;
}

SchwarzPickFrame rescaling_frame(const Evaluator& g, const RelativeSchottkySet& source,
                                 const RelativeSchottkySet& image, Complex c) {
  if (!source.outer.contains(c)) throw precondition_error("frame centre lies outside the source domain");
  SchwarzPickFrame f;
  f.centre = c;
  f.scale = source.outer.distance(c);
  f.image_centre = g(c);
  f.image_scale = image.outer.diameter();
  if (!finite(f.image_centre)) throw precondition_error("map is not finite at the frame centre");
  return f;
}

BoundReport schwarz_pick_check(const Evaluator& g, const RelativeSchottkySet& source,
                               const RelativeSchottkySet& image, int pairs, uint64_t seed,
                               const std::optional<SchwarzPickFrame>& frame, double tol) {
  if (pairs < 1) throw precondition_error("Schwarz-Pick check needs at least one pair");
  const SchwarzPickFrame f = frame.value_or(SchwarzPickFrame{});
  if (!(f.scale > 0.0) || !(f.image_scale > 0.0)) throw precondition_error("frame scales must be positive");
  const double slack = 1e-12 * std::max(1.0, f.scale);
  if (!source.outer.contains(f.centre) || source.outer.distance(f.centre) < f.scale - slack)
    throw precondition_error("unit disc is not contained in the rescaled source domain");
  if (outer_radius_about(image.outer, f.image_centre) > f.image_scale * (1.0 + 1e-12))
    throw precondition_error("rescaled image domain is not contained in the unit disc");

  Rng rng(seed, "schwarz-pick");
  std::vector<Complex> pts = sample_set_in_ball(rng, source, f.centre, f.scale, 2 * pairs);
  const size_t n = pts.size() / 2;
  if (n == 0) throw precondition_error("no sample pairs in closure(A) inside the unit disc");

  std::vector<double> excess(n), src(n);
  parallel_for(n, [&](size_t k) {
    const Complex p = pts[2 * k], q = pts[2 * k + 1];
    const Complex up = (p - f.centre) / f.scale, uq = (q - f.centre) / f.scale;
    const Complex wp = (g(p) - f.image_centre) / f.image_scale, wq = (g(q) - f.image_centre) / f.image_scale;
    src[k] = hyperbolic_distance(up, uq);
    if (!finite(wp) || !finite(wq) || std::abs(wp) >= 1.0 || std::abs(wq) >= 1.0) {
      excess[k] = inf;
      return;
    }
    excess[k] = hyperbolic_distance(wp, wq) - src[k];
  });

  BoundReport r;
  r.name = "schwarz_pick";
  r.constant = "d_hyp(g(p), g(q)) <= d_hyp(p, q)";
  r.kind = "explicit";
  r.measured = *std::max_element(excess.begin(), excess.end());
  r.bound = tol;
  r.margin = r.bound - r.measured;
  r.samples = static_cast<int>(n);
  r.pass = r.margin >= 0.0;
  r.details = {{"worst_slack", -r.measured}, {"max_source_distance", *std::max_element(src.begin(), src.end())}};
  return r;
}

BoundReport lipschitz_profile(const Evaluator& g, const RelativeSchottkySet& s, Complex p0, double r, double sigma,
                              int pairs, uint64_t seed) {
  if (!(r > 0.0) || !(sigma > 0.0)) throw precondition_error("radius and image diameter must be positive");
  if (!s.outer.contains(p0) || s.outer.distance(p0) < r * (1.0 - 1e-12))
    throw precondition_error("ball B(p0, r) does not fit inside the domain");
  if (pairs < 1) throw precondition_error("Lipschitz profile needs at least one pair");

  Rng rng(seed, "lipschitz-profile");
  const double ball = 0.25 * r;
  const std::vector<Complex> pts = sample_set_in_ball(rng, s, p0, ball, 2 * pairs);
  // Half of the pairs are far pairs from the pool, half are close pairs probing |g'|.
  std::vector<std::pair<Complex, Complex>> pair_list;
  for (size_t k = 0; k + 1 < pts.size() && static_cast<int>(pair_list.size()) < pairs / 2 + pairs % 2; k += 2)
    pair_list.emplace_back(pts[k], pts[k + 1]);
  const double eps = 1e-4 * ball;
  for (size_t k = 0; k < pts.size() && static_cast<int>(pair_list.size()) < pairs; ++k) {
    const Complex q = pts[k] + std::polar(eps, 2.0 * pi * rng.uniform());
    if (std::abs(q - p0) < ball && s.outer.contains(q) && outside_open_discs(s, q)) pair_list.emplace_back(pts[k], q);
  }
  if (static_cast<int>(pair_list.size()) < std::max(2, pairs / 2))
    throw precondition_error("too few valid sample pairs in the Lipschitz ball");

  std::vector<double> ratio(pair_list.size());
  parallel_for(pair_list.size(), [&](size_t k) {
    const auto [p, q] = pair_list[k];
    const double num = std::abs(g(p) - g(q));
    ratio[k] = std::isfinite(num) ? num / std::abs(p - q) : inf;
  });

  // Second-difference proxy for |g''| at a few interior points.
  double second = 0.0;
  const double h = 1e-3 * ball;
  for (size_t k = 0; k < std::min<size_t>(32, pts.size()); ++k) {
    const Complex z = pts[k];
    if (!s.contains(z + h) || !s.contains(z - h)) continue;
    second = std::max(second, std::abs(g(z + h) - 2.0 * g(z) + g(z - h)) / (h * h));
  }

  BoundReport rep;
  rep.name = "lipschitz";
  rep.constant = "pi * 2 sigma / r";
  rep.kind = "explicit";
  rep.measured = *std::max_element(ratio.begin(), ratio.end());
  rep.bound = pi * 2.0 * sigma / r * (1.0 + 1e-2);
  rep.margin = rep.bound - rep.measured;
  rep.samples = static_cast<int>(pair_list.size());
  rep.pass = rep.margin >= 0.0;
  rep.details = {{"r", r}, {"sigma", sigma}, {"second_difference", second}};
  return rep;
}

std::vector<PropernessRow> properness_profile(const Evaluator& g, const RelativeSchottkySet& source,
                                              const RelativeSchottkySet& image, const std::vector<double>& d_list,
                                              int samples, uint64_t seed, const Evaluator& inverse) {
  if (samples < 16) throw precondition_error("properness profile needs at least 16 samples");
  for (double d : d_list)
    if (!(d > 0.0)) throw precondition_error("properness depths must be positive");
  Rng rng(seed, "properness");
  std::vector<PropernessRow> rows = clearance_table(g, source, image.outer, d_list, samples, rng, false, {});
  if (inverse) {
    Rng inv_rng(seed, "properness-inverse");
    rows = clearance_table(inverse, image, source.outer, d_list, samples, inv_rng, true, std::move(rows));
  }
  return rows;
}

int winding_index(const Polyline& curve, const Evaluator& v) {
  if (!curve.closed() || curve.size() < 3) throw precondition_error("winding index needs a closed polyline");
  const double length = curve.length();
  if (!(length > 0.0)) throw precondition_error("winding index curve has zero length");
  for (int level = 0; level < 7; ++level) {
    const double target = length / (1024.0 * (1 << level));
    std::vector<Complex> pts;
    for (size_t e = 0; e < curve.segment_count(); ++e) {
      const Complex a = curve.segment_start(e), b = curve.segment_end(e);
      const int m = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / target)));
      for (int k = 0; k < m; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / m));
    }
    double step = 0.0;
    for (size_t k = 0; k < pts.size(); ++k) step = std::max(step, std::abs(pts[(k + 1) % pts.size()] - pts[k]));
    std::vector<Complex> w(pts.size());
    parallel_for(pts.size(), [&](size_t k) { w[k] = v(pts[k]); });
    bool ok = true;
    double turn = 0.0;
    for (size_t k = 0; k < w.size() && ok; ++k) {
      const Complex a = w[k], b = w[(k + 1) % w.size()];
      if (!finite(a) || std::abs(a) <= 10.0 * step) {
        ok = false;
        break;
      }
      const double da = std::arg(b / a);
      if (std::abs(da) > pi / 4.0) ok = false;
      turn += da;
    }
    if (!ok) continue;
    const double idx = turn / (2.0 * pi);
    const double rounded = std::round(idx);
    if (std::abs(idx - rounded) > 1e-6) throw internal_error("winding sum is not an integer");
    return static_cast<int>(rounded);
  }
  throw domain_error("winding index indeterminate: displacement nearly vanishes on the curve");
}

Jet2 estimate_jet(const Evaluator& g, Complex p, double h) {
  if (!(h > 0.0)) throw precondition_error("jet step must be positive");
  const auto richardson = [&](double step) {
    const auto [a1, a2] = central_jet(g, p, step);
    const auto [b1, b2] = central_jet(g, p, 0.5 * step);
    return std::pair<Complex, Complex>{(16.0 * b1 - a1) / 15.0, (16.0 * b2 - a2) / 15.0};
  };
  const auto [d1, d2] = richardson(h);
  const auto [e1, e2] = richardson(0.5 * h);
  const double s1 = std::max(std::abs(e1), 1e-300), s2 = std::max({std::abs(e2), std::abs(e1) / h, 1e-300});
  if (!finite(e1) || !finite(e2) || std::abs(d1 - e1) > 1e-6 * s1 || std::abs(d2 - e2) > 1e-3 * s2)
    throw Error(ErrorKind::NonConvergence, "jet estimate did not converge at the requested step");
  return {p, g(p), e1, e2};
}

JetCheck jet_distance(const Jet2& jet, const JordanBoundary& source_outer, const JordanBoundary& image_outer,
                      int samples) {
  if (samples < 16) throw precondition_error("jet distance needs at least 16 boundary samples");
  JetCheck out;
  out.m = mobius_from_jet(jet);
  const std::vector<Complex> b = source_outer.samples(samples);
  std::vector<Complex> w(b.size());
  for (size_t k = 0; k < b.size(); ++k) w[k] = out.m.apply(b[k], true);
  double best = inf, spacing = 0.0;
  for (size_t k = 0; k < w.size(); ++k) {
    if (!finite(w[k])) continue;
    best = std::min(best, image_outer.distance(w[k]));
    const Complex next = w[(k + 1) % w.size()];
    if (finite(next)) spacing = std::max(spacing, std::abs(next - w[k]));
  }
  out.min_distance = best;
  out.resolution = spacing;
  out.pass = best < 10.0 * spacing;
  return out;
}

JetCheck jet_intersection_check(const Evaluator& g, const RelativeSchottkySet& source,
                                const RelativeSchottkySet& image, Complex p, int samples) {
  if (!source.outer.contains(p) || !outside_open_discs(source, p))
    throw precondition_error("jet base point must lie in the interior of the source set");
  double clearance = source.outer.distance(p);
  for (const Disc& d : source.discs) clearance = std::min(clearance, std::abs(p - d.center) - d.radius);
  if (!(clearance > 0.0)) throw precondition_error("jet base point must lie in the interior of the source set");
  const Jet2 jet = estimate_jet(g, p, 0.05 * clearance);
  return jet_distance(jet, source.outer, image.outer, samples);
}

RigidityResult rigidity_probe(const std::vector<Complex>& z, const std::vector<Complex>& f) {
  if (z.size() != f.size()) throw precondition_error("rigidity probe needs one value per sample point");
  for (size_t k = 0; k < z.size(); ++k)
    if (!finite(z[k]) || !finite(f[k])) throw precondition_error("rigidity probe samples must be finite");
  std::vector<Complex> distinct;
  for (Complex p : z) {
    bool seen = false;
    for (Complex q : distinct) seen = seen || std::abs(p - q) <= 1e-12 * std::max(1.0, std::abs(q));
    if (!seen) distinct.push_back(p);
    if (distinct.size() >= 4) break;
  }
  if (distinct.size() < 4) throw domain_error("rigidity probe needs at least four distinct sample points");

  const size_t n = z.size();
  Complex cz = 0.0, cf = 0.0;
  for (size_t k = 0; k < n; ++k) {
    cz += z[k];
    cf += f[k];
  }
  cz /= static_cast<double>(n);
  cf /= static_cast<double>(n);
  double sz = 0.0, sf = 0.0;
  for (size_t k = 0; k < n; ++k) {
    sz = std::max(sz, std::abs(z[k] - cz));
    sf = std::max(sf, std::abs(f[k] - cf));
  }
  if (sf == 0.0) throw domain_error("constant values admit no Moebius fit");

  // Linear fit a u + b - c u v - d v = 0 in normalized coordinates.
  Eigen::MatrixXcd a(n, 4);
  for (size_t k = 0; k < n; ++k) {
    const Complex u = (z[k] - cz) / sz, v = (f[k] - cf) / sf;
    a(k, 0) = u;
    a(k, 1) = 1.0;
    a(k, 2) = -u * v;
    a(k, 3) = -v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv(2) <= 1e-10 * sv(0)) throw domain_error("degenerate sample set: Moebius fit is not unique");
  Eigen::VectorXcd x = svd.matrixV().col(3);

  // Gauss-Newton on the holomorphic residuals with the largest coefficient held fixed.
  int fixed = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(x(i)) > std::abs(x(fixed))) fixed = i;
  x /= x(fixed);
  for (int it = 0; it < 20; ++it) {
    Eigen::MatrixXcd jac(n, 3);
    Eigen::VectorXcd res(n);
    for (size_t k = 0; k < n; ++k) {
      const Complex u = (z[k] - cz) / sz, v = (f[k] - cf) / sf;
      const Complex num = x(0) * u + x(1), den = x(2) * u + x(3);
      res(k) = num / den - v;
      const Complex grad[4] = {u / den, 1.0 / den, -num * u / (den * den), -num / (den * den)};
      for (int i = 0, col = 0; i < 4; ++i)
        if (i != fixed) jac(k, col++) = grad[i];
    }
    const Eigen::VectorXcd step = jac.colPivHouseholderQr().solve(-res);
    for (int i = 0, col = 0; i < 4; ++i)
      if (i != fixed) x(i) += step(col++);
    if (step.norm() <= 1e-15 * x.norm()) break;
  }

  const MobiusMap local(x(0), x(1), x(2), x(3));
  const MobiusMap to_local(1.0 / sz, -cz / sz, 0.0, 1.0);
  const MobiusMap from_local(sf, cf, 0.0, 1.0);
  RigidityResult out{from_local.compose(local.compose(to_local)), 0.0};
  for (size_t k = 0; k < n; ++k) out.residual = std::max(out.residual, std::abs(out.fit.apply(z[k], true) - f[k]));
  return out;
}

}  // namespace sforge
