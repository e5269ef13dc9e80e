#include <doctest.h>

#include <algorithm>
#include <limits>

#include "errors.hpp"
#include "modulus.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace sforge;

namespace {

RelativeSchottkySet disc_domain(double r, std::vector<Disc> discs = {}) {
  RelativeSchottkySet s;
  s.outer = JordanBoundary(Disc(0.0, r));
  s.discs = std::move(discs);
  return s;
}

RelativeSchottkySet rectangle(double x0, double y0, double x1, double y1, std::vector<Disc> discs = {}) {
  RelativeSchottkySet s;
  s.outer = JordanBoundary(Polyline({Complex(x0, y0), Complex(x1, y0), Complex(x1, y1), Complex(x0, y1)}, true));
  s.discs = std::move(discs);
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Quadrature of the left side of the disc-sum inequality on a fine grid.
double disc_sum_quadrature(const std::vector<Disc>& d, const std::vector<double>& a, double lambda, int n) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Disc& b : d) {
    xmin = std::min(xmin, b.center.real() - lambda * b.radius);
    xmax = std::max(xmax, b.center.real() + lambda * b.radius);
    ymin = std::min(ymin, b.center.imag() - lambda * b.radius);
    ymax = std::max(ymax, b.center.imag() + lambda * b.radius);
  }
  const double hx = (xmax - xmin) / n, hy = (ymax - ymin) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex z(xmin + (i + 0.5) * hx, ymin + (j + 0.5) * hy);
      double v = 0.0;
      for (size_t k = 0; k < d.size(); ++k)
        if (std::abs(z - d[k].center) < lambda * d[k].radius) v += a[k];
      sum += v * v;
    }
  return sum * hx * hy;
}

std::vector<Disc> random_packing(Rng& rng, int max_discs, double rmin, double rmax, double gap) {
  std::vector<Disc> d;
  for (int tries = 0; tries < 2000 && static_cast<int>(d.size()) < max_discs; ++tries) {
    const Complex c(rng.uniform(), rng.uniform());
    const double r = rng.uniform(rmin, rmax);
    bool ok = true;
    for (const Disc& e : d)
      if (std::abs(e.center - c) < e.radius + r + gap) ok = false;
    if (ok) d.push_back(Disc(c, r));
  }
  return d;
}

std::shared_ptr<ModulusGrid> uniform_grid(double x0, double y0, double h, int nx, int ny) {
  auto g = std::make_shared<ModulusGrid>();
  g->x0 = x0;
  g->y0 = y0;
  g->h = h;
  g->nx = nx;
  g->ny = ny;
  g->label.assign(nx * ny, 0);
  g->area.assign(nx * ny, 1.0);
  return g;
}

}  // namespace

TEST_CASE("continuum set parsing") {
  const auto s = disc_domain(2.0, {Disc(0.0, 0.5)});
  CHECK(ContinuumSet::parse("outer", s).kind() == ContinuumSet::Kind::Outer);
  CHECK(ContinuumSet::parse("circle:0", s).kind() == ContinuumSet::Kind::Circle);
  CHECK(ContinuumSet::parse("ball:1,0,0.2", s).kind() == ContinuumSet::Kind::Ball);
  CHECK(ContinuumSet::parse("outside:0,0,1.5", s).kind() == ContinuumSet::Kind::Outside);
  CHECK(ContinuumSet::parse("segment:0.6,0,1.5,0", s).kind() == ContinuumSet::Kind::Segment);
  CHECK(ContinuumSet::parse("arcp:2,0,0,2", s).kind() == ContinuumSet::Kind::OuterArc);
  CHECK_THROWS_AS(ContinuumSet::parse("circle:3", s), Error);
  CHECK_THROWS_AS(ContinuumSet::parse("ball:1,0", s), Error);
  CHECK_THROWS_AS(ContinuumSet::parse("ball:1,0,-1", s), Error);
  CHECK_THROWS_AS(ContinuumSet::parse("blob", s), Error);
  const auto b = ContinuumSet::parse("ball:1,0,0.2", s);
  CHECK(b.contains(Complex(1.1, 0), s));
  CHECK_FALSE(b.contains(Complex(1.3, 0), s));
}

TEST_CASE("round annuli match 2 pi / log(R / r)") {
  const auto e = disc_domain(std::exp(1.0), {Disc(0.0, 1.0)});
  const auto r1 = conformal_modulus(e, ContinuumSet::circle(0), ContinuumSet::outer(), 256);
  CHECK(rel(r1.value, 2 * kPi) < 0.03);
  const auto four = disc_domain(4.0, {Disc(0.0, 1.0)});
  const auto r2 = conformal_modulus(four, ContinuumSet::circle(0), ContinuumSet::outer(), 256);
  CHECK(rel(r2.value, 2 * kPi / std::log(4.0)) < 0.03);
  for (const auto* r : {&r1, &r2}) {
    CHECK(r->admissibility_slack >= -1e-3);
    CHECK(r->upper_bound >= r->value * (1 - 1e-9));
    CHECK_FALSE(r->empty_family);
  }
}

TEST_CASE("unit square between opposite sides has modulus 1") {
  const auto s = rectangle(0, 0, 1, 1);
  const auto r = conformal_modulus(s, ContinuumSet::parse("segment:0,0,0,1", s),
                                   ContinuumSet::parse("segment:1,0,1,1", s), 256);
  CHECK(rel(r.value, 1.0) < 0.02);
  CHECK(r.admissibility_slack >= -1e-3);
  // The rescaled certificate is admissible on its own family.
  CHECK(admissibility_check(r.distribution, r.family) >= -1e-9);
}

TEST_CASE("grid refinement changes analytic values by under 3%") {
  const auto e = disc_domain(std::exp(1.0), {Disc(0.0, 1.0)});
  const double a = conformal_modulus(e, ContinuumSet::circle(0), ContinuumSet::outer(), 128).value;
  const double b = conformal_modulus(e, ContinuumSet::circle(0), ContinuumSet::outer(), 256).value;
  CHECK(rel(a, b) < 0.03);
  const auto sq = rectangle(0, 0, 1, 1);
  const auto le = ContinuumSet::parse("segment:0,0,0,1", sq), ri = ContinuumSet::parse("segment:1,0,1,1", sq);
  CHECK(rel(conformal_modulus(sq, le, ri, 128).value, conformal_modulus(sq, le, ri, 256).value) < 0.03);
}

TEST_CASE("transboundary agrees with conformal modulus without discs") {
  const auto s = rectangle(0, 0, 2, 1);
  const auto le = ContinuumSet::parse("segment:0,0,0,1", s), ri = ContinuumSet::parse("segment:2,0,2,1", s);
  const double c = conformal_modulus(s, le, ri, 128).value;
  const double t = transboundary_modulus(s, le, ri, 128).value;
  CHECK(rel(t, c) < 0.02);
  CHECK(rel(c, 0.5) < 0.02);
  const auto d = disc_domain(1.0);
  const auto b1 = ContinuumSet::ball(Complex(-0.5, 0), 0.1), b2 = ContinuumSet::ball(Complex(0.5, 0), 0.1);
  CHECK(rel(transboundary_modulus(d, b1, b2, 128).value, conformal_modulus(d, b1, b2, 128).value) < 0.02);
}

TEST_CASE("one disc in the annulus: transboundary below pass-through and below the disc-free value") {
  const auto base = disc_domain(std::exp(1.0), {Disc(0.0, 1.0)});
  const double free_value = conformal_modulus(base, ContinuumSet::circle(0), ContinuumSet::outer(), 256).value;
  for (double x : {1.3, 1.8, 2.3}) {
    auto s = base;
    s.discs.push_back(Disc(Complex(x, 0.2), 0.1));
    const auto tb = transboundary_modulus(s, ContinuumSet::circle(0), ContinuumSet::outer(), 256);
    const auto pt = conformal_modulus(s, ContinuumSet::circle(0), ContinuumSet::outer(), 256);
    CHECK(tb.value <= pt.value + 1e-9);
    CHECK(tb.value <= free_value + 1e-9);
    CHECK(tb.admissibility_slack >= -1e-3);
    REQUIRE(tb.distribution.weights.size() == 1);
    CHECK(tb.distribution.weights[0] > 0.0);
  }
}

TEST_CASE("obstacle discs lower the modulus further") {
  auto s = disc_domain(std::exp(1.0), {Disc(0.0, 1.0), Disc(Complex(1.8, 0.2), 0.1)});
  const double ob = conformal_modulus(s, ContinuumSet::circle(0), ContinuumSet::outer(), 256, HoleMode::Obstacle).value;
  const double tb = transboundary_modulus(s, ContinuumSet::circle(0), ContinuumSet::outer(), 256).value;
  CHECK(ob <= tb + 1e-9);
}

TEST_CASE("monotone under shrinking E") {
  // Every curve from the small ball to F has a subcurve from the large ball to F.
  const auto s = disc_domain(1.0, {Disc(Complex(0.2, 0.3), 0.1), Disc(Complex(0.1, -0.4), 0.15)});
  const auto f = ContinuumSet::ball(Complex(0.6, 0), 0.1);
  const auto small = transboundary_modulus(s, ContinuumSet::ball(Complex(-0.5, 0), 0.05), f, 128);
  const auto large = transboundary_modulus(s, ContinuumSet::ball(Complex(-0.5, 0), 0.15), f, 128);
  CHECK(small.value <= large.value + 2e-6);
}

TEST_CASE("Moebius-transported annulus keeps its modulus") {
  // Unit disc minus an off-centre disc is conformally a round annulus.
  for (auto [x0, r] : {std::pair{0.3, 0.2}, std::pair{-0.4, 0.3}}) {
    const double rho = oracle::concentric_radius(Complex(x0, 0.0), r);
    const double exact = 2 * kPi / std::log(1.0 / rho);
    const auto s = disc_domain(1.0, {Disc(x0, r)});
    const auto m = transboundary_modulus(s, ContinuumSet::circle(0), ContinuumSet::outer(), 256);
    CHECK(rel(m.value, exact) < 0.05);
    const auto c = disc_domain(1.0, {Disc(0.0, rho)});
    CHECK(rel(transboundary_modulus(c, ContinuumSet::circle(0), ContinuumSet::outer(), 256).value, m.value) < 0.05);
  }
}

TEST_CASE("unreachable F gives an empty family") {
  // F sits inside the hole disc but outside Omega's reach in obstacle mode.
  const auto s = disc_domain(1.0, {Disc(0.0, 0.4)});
  const auto r = conformal_modulus(s, ContinuumSet::outer(), ContinuumSet::ball(0.0, 0.1), 64, HoleMode::Obstacle);
  CHECK(r.empty_family);
  CHECK(r.value == 0.0);
}

TEST_CASE("precondition errors") {
  const auto s = disc_domain(1.0);
  const auto a = ContinuumSet::ball(Complex(-0.5, 0), 0.1), b = ContinuumSet::ball(Complex(0.5, 0), 0.1);
  CHECK_THROWS_AS(conformal_modulus(s, a, b, 32), Error);
  CHECK_THROWS_AS(conformal_modulus(s, a, ContinuumSet::ball(Complex(-0.45, 0), 0.1), 64), Error);
}

TEST_CASE("admissibility_check examples") {
  const auto g = uniform_grid(0.0, 0.0, 0.01, 200, 100);  // a 2 x 1 rectangle
  CurveFamily fam;
  for (int k = 1; k < 10; ++k) fam.curves.push_back(Polyline({Complex(0, 0.1 * k), Complex(2, 0.1 * k)}));
  MassDistribution zero;
  zero.grid = g;
  zero.density.assign(g->cells(), 0.0);
  CHECK(admissibility_check(zero, fam) == -1.0);
  MassDistribution ext = zero;
  ext.density.assign(g->cells(), 0.5);  // 1 / width
  CHECK(std::abs(admissibility_check(ext, fam)) < 1e-9);
  CHECK(ext.mass() == doctest::Approx(0.5));  // height / width
  MassDistribution w = zero;
  w.holes = {Disc(Complex(1.0, 0.5), 0.45)};
  w.weights = {1.0};
  CHECK(std::abs(admissibility_check(w, fam)) < 1e-12);
  CHECK(std::isinf(admissibility_check(w, CurveFamily{})));
}

TEST_CASE("disc-sum inequality: exact cases") {
  const std::vector<Disc> d{Disc(0.0, 1.0), Disc(Complex(2.5, 0), 0.5), Disc(Complex(0, 3), 0.7)};
  const std::vector<double> a{1.0, 2.0, 0.5};
  CHECK(check_disc_sum_inequality(d, a, 1.0).ratio == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<Disc> far{Disc(0.0, 1.0), Disc(Complex(10, 0), 0.5)};
  CHECK(check_disc_sum_inequality(far, {1.0, 3.0}, 2.0).ratio == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(check_disc_sum_inequality({Disc(0.0, 1.0), Disc(1.5, 1.0)}, {1, 1}, 1.0), Error);
  CHECK_THROWS_AS(check_disc_sum_inequality(far, {1.0, -1.0}, 1.0), Error);
  CHECK_THROWS_AS(check_disc_sum_inequality(far, {1.0, 1.0}, 0.5), Error);
}

TEST_CASE("disc-sum left side agrees with quadrature") {
  Rng rng(11, "disc-sum-quadrature");
  for (int k = 0; k < 5; ++k) {
    const auto d = random_packing(rng, 8, 0.05, 0.2, 0.01);
    std::vector<double> a;
    for (size_t i = 0; i < d.size(); ++i) a.push_back(rng.uniform());
    const auto rep = check_disc_sum_inequality(d, a, 2.0);
    CHECK(rep.lhs == doctest::Approx(disc_sum_quadrature(d, a, 2.0, 800)).epsilon(5e-3));
  }
  CHECK(lens_area(Disc(0.0, 1.0), Disc(0.0, 0.5)) == doctest::Approx(kPi * 0.25));
  CHECK(lens_area(Disc(0.0, 1.0), Disc(3.0, 1.0)) == 0.0);
  // Two unit discs at distance 1: 2 pi / 3 - sqrt(3) / 2.
  CHECK(lens_area(Disc(0.0, 1.0), Disc(1.0, 1.0)) == doctest::Approx(2 * kPi / 3 - std::sqrt(3.0) / 2));
}

TEST_CASE("disc-sum ratio at lambda 2 stays below the fitted envelope") {
  // Envelope measured once on these 100 packings (max 6.84) and frozen.
  constexpr double kFittedConstant = 7.0;
  Rng rng(7, "disc-sum-packings");
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<Disc> d;
    std::vector<double> a;
    for (int tries = 0; tries < 2000 && d.size() < 30; ++tries) {
      const Complex c(rng.uniform(), rng.uniform());
      const double r = rng.uniform(0.02, 0.12);
      bool ok = true;
      for (const Disc& e : d)
        if (std::abs(e.center - c) < e.radius + r + 0.002) ok = false;
      if (ok) {
        d.push_back(Disc(c, r));
        a.push_back(rng.uniform());
      }
    }
    worst = std::max(worst, check_disc_sum_inequality(d, a, 2.0).ratio);
  }
  MESSAGE("worst lambda = 2 ratio: " << worst);
  CHECK(worst <= kFittedConstant);
  CHECK(worst >= 4.0);
}

TEST_CASE("count_big_discs examples") {
  const Polyline k({Complex(0, 0), Complex(1, 0)});
  CHECK(count_big_discs(k, {Disc(Complex(0.5, 0.2), 0.3)}).count == 1);
  CHECK(count_big_discs(k, {Disc(Complex(0.5, 0.1), 0.2)}).count == 0);
  CHECK(count_big_discs(k, {Disc(Complex(0.5, 0.5), 0.3)}).count == 0);
  CHECK(count_big_discs(k, {Disc(Complex(0.5, 0.25), 0.25)}).count == 1);  // tangent, exactly 2 diam = 1
  CHECK_THROWS_AS(count_big_discs(Polyline(std::vector<Complex>{Complex(0, 0)}), {}), Error);
}

TEST_CASE("count_big_discs matches a brute-force oracle") {
  Rng rng(5, "big-discs");
  int most = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Polyline k({Complex(0, 0), Complex(1, 0)});
    std::vector<Disc> d;
    for (int tries = 0; tries < 300 && d.size() < 40; ++tries) {
      const Complex c(rng.uniform(-0.6, 1.6), rng.uniform(-0.8, 0.8));
      const double r = rng.uniform(0.05, 0.6);
      bool ok = true;
      for (const Disc& e : d)
        if (std::abs(e.center - c) < e.radius + r) ok = false;
      if (ok) d.push_back(Disc(c, r));
    }
    // Oracle: dense sampling of K for the meeting test.
    std::vector<int> expected;
    for (size_t i = 0; i < d.size(); ++i) {
      bool meets = false;
      for (int s = 0; s <= 20000 && !meets; ++s)
        meets = std::abs(Complex(s / 20000.0, 0) - d[i].center) <= d[i].radius;
      const double x = std::clamp(d[i].center.real(), 0.0, 1.0);
      const double gap = std::abs(Complex(x, 0) - d[i].center) - d[i].radius;
      if (std::abs(gap) < 1e-4) continue;  // ambiguous at sampling resolution
      if (meets && 4 * d[i].radius >= 1.0) expected.push_back(static_cast<int>(i));
    }
    auto got = count_big_discs(k, d).indices;
    got.erase(std::remove_if(got.begin(), got.end(),
                             [&](int i) {
                               const double x = std::clamp(d[i].center.real(), 0.0, 1.0);
                               return std::abs(std::abs(Complex(x, 0) - d[i].center) - d[i].radius) < 1e-4;
                             }),
              got.end());
    CHECK(got == expected);
    most = std::max(most, static_cast<int>(expected.size()));
  }
  MESSAGE("max observed big-disc count: " << most);
}

TEST_CASE("Loewner estimate on the unit disc") {
  const auto s = disc_domain(1.0);
  std::vector<double> m;
  for (uint64_t seed : {1, 2, 3}) m.push_back(loewner_estimate(s, 0.5, 128, seed).m_hat);
  for (double v : m) CHECK(v > 0.0);
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  const double mid = 0.5 * (*lo + *hi);
  CHECK((*hi - *lo) / 2 <= 0.10 * mid);
  CHECK(loewner_estimate(s, 0.5, 128, 1).m_hat == m[0]);
  CHECK_THROWS_AS(loewner_estimate(s, 2.5, 16, 1), Error);
}

TEST_CASE("Loewner estimate is non-decreasing in delta on nested runs") {
  const auto s = disc_domain(1.0);
  double prev = 0.0;
  int prev_pairs = 1 << 30;
  for (double delta : {0.25, 0.5, 1.0, 1.5}) {
    const auto est = loewner_estimate(s, delta, 32, 9);
    CHECK(est.m_hat >= prev - 1e-9);
    CHECK(est.pairs_used <= prev_pairs);
    prev = est.m_hat;
    prev_pairs = est.pairs_used;
  }
  const auto sq = rectangle(0, 0, 1, 1);
  CHECK(loewner_estimate(sq, 0.5, 32, 4).m_hat > 0.0);
}

TEST_CASE("modcomp probe without discs has ratio one") {
  const auto s = disc_domain(1.0);
  const auto r = modcomp_probe(s, ContinuumSet::ball(Complex(-0.5, 0), 0.1), ContinuumSet::ball(Complex(0.5, 0), 0.1), 128);
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(0.02));
  CHECK(r.weight_share == 0.0);
}

TEST_CASE("modcomp probe through one dominant disc") {
  for (auto [len, rad] : {std::pair{0.4, 0.28}, std::pair{0.35, 0.295}}) {
    const auto s = rectangle(-len, -0.3, len, 0.3, {Disc(0.0, rad)});
    const auto e = ContinuumSet::segment(Complex(-len, -0.3), Complex(-len, 0.3));
    const auto f = ContinuumSet::segment(Complex(len, -0.3), Complex(len, 0.3));
    const auto r = modcomp_probe(s, e, f, 128);
    CHECK(r.weight_share >= 0.5);
    CHECK(r.ratio > 0.0);
    CHECK(r.ratio <= 1.0 + 1e-9);
    CHECK(r.lifted_slack >= 0.0);           // lifted density admissible for the pass-through family
    CHECK(r.mod <= r.lifted_mass);          // hence an upper bound on Mod
    CHECK(r.lifted_mass <= r.lifted_bound);  // within 8 max(1, C' pi) mod_A
  }
}

TEST_CASE("annulus profile is non-increasing and below the round bound") {
  const auto s = disc_domain(1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {2.0, 4.0, 8.0, 16.0}) {
    const double v = annulus_profile(s, Complex(1, 0), 0.8, t, 128).value;
    CHECK(v <= prev + 1e-9);
    CHECK(v <= 2 * kPi / std::log(t) * 1.05);
    prev = v;
  }
  CHECK_THROWS_AS(annulus_profile(s, Complex(0.5, 0), 0.8, 2.0, 128), Error);
}

TEST_CASE("annulus profile with discs crossing the annulus") {
  const auto s = disc_domain(1.0, {Disc(Complex(0.55, 0.1), 0.08), Disc(Complex(0.6, -0.35), 0.06)});
  const double t = 4.0;
  const auto r = annulus_profile(s, Complex(1, 0), 0.8, t, 128);
  REQUIRE(r.distribution.weights.size() == 2);
  double w2 = 0.0;
  for (double w : r.distribution.weights) {
    CHECK(w > 0.0);
    w2 += w * w;
  }
  CHECK(std::isfinite(r.value));
  CHECK(r.value <= 2 * kPi / std::log(t) * 1.05 + w2);
}

TEST_CASE("transboundary modulus decays as F moves away among many discs") {
  auto s = rectangle(-1, -1, 3, 1);
  Rng rng(3, "many");
  while (s.discs.size() < 30) {
    const Complex c(rng.uniform(-0.9, 2.9), rng.uniform(-0.9, 0.9));
    const double r = rng.uniform(0.04, 0.12);
    bool ok = std::abs(c - Complex(-0.6, 0)) > r + 0.1;
    for (const Disc& e : s.discs)
      if (std::abs(e.center - c) < e.radius + r + 0.02) ok = false;
    if (c.real() - r < -0.98 || c.real() + r > 2.98 || std::abs(c.imag()) + r > 0.98) ok = false;
    if (ok) s.discs.push_back(Disc(c, r));
  }
  const auto e = ContinuumSet::ball(Complex(-0.6, 0), 0.05);
  double prev = std::numeric_limits<double>::infinity();
  for (double x : {0.0, 0.8, 1.6, 2.4}) {
    const double v = transboundary_modulus(s, e, ContinuumSet::ball(Complex(x, 0), 0.05), 128).value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("cutting-plane route brackets the potential solver") {
  const auto sq = rectangle(0, 0, 1, 1);
  const auto le = ContinuumSet::parse("segment:0,0,0,1", sq), ri = ContinuumSet::parse("segment:1,0,1,1", sq);
  const auto cp = cutting_plane_modulus(sq, le, ri, 48, HoleMode::PassThrough);
  CHECK(rel(cp.value, 1.0) < 0.02);
  CHECK(cp.lower_bound <= cp.upper_bound * (1 + 1e-6));
  CHECK(cp.admissibility_slack >= -1e-3);

  const auto s = disc_domain(std::exp(1.0), {Disc(0.0, 1.0), Disc(Complex(1.8, 0.2), 0.3)});
  const double pot = transboundary_modulus(s, ContinuumSet::circle(0), ContinuumSet::outer(), 256).value;
  const auto tb = cutting_plane_modulus(s, ContinuumSet::circle(0), ContinuumSet::outer(), 48, HoleMode::Transboundary);
  // Grid paths are a subfamily of all curves, so this route can only undershoot.
  CHECK(tb.value / pot >= 0.90);
  CHECK(tb.value / pot <= 1.01);
  CHECK(tb.lower_bound <= tb.upper_bound * (1 + 1e-6));
}

TEST_CASE("modulus runs are deterministic") {
  const auto s = disc_domain(1.0, {Disc(Complex(0.2, 0.3), 0.1), Disc(Complex(0.1, -0.4), 0.15)});
  const auto e = ContinuumSet::ball(Complex(-0.5, 0), 0.1), f = ContinuumSet::ball(Complex(0.6, 0), 0.1);
  const auto a = transboundary_modulus(s, e, f, 96), b = transboundary_modulus(s, e, f, 96);
  CHECK(a.value == b.value);
  CHECK(a.distribution.density == b.distribution.density);
  CHECK(a.distribution.weights == b.distribution.weights);
}
