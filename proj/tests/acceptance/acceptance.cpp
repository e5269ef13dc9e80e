// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "curves.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "modulus.hpp"
#include "rng.hpp"
#include "scene_gen.hpp"
#include "sforge/sforge.h"
#include "uniformize.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using namespace sforge;

namespace {

const std::string kFixtures = SFORGE_FIXTURES;

int failures = 0;

void verdict(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double clearance(const RelativeSchottkySet& s, Complex z) {
  double c = s.outer.contains(z) ? s.outer.distance(z) : -s.outer.distance(z);
  for (const Disc& d : s.discs) c = std::min(c, std::abs(z - d.center) - d.radius);
  return c;
}

std::vector<Complex> interior_points(const RelativeSchottkySet& s, int count, double margin, uint64_t seed) {
  Rng rng(seed, "acceptance-probe");
  const Box b = s.outer.bbox();
  std::vector<Complex> out;
  for (int attempt = 0; attempt < 50000 && static_cast<int>(out.size()) < count; ++attempt) {
    const Complex z(rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax));
    if (clearance(s, z) >= margin) out.push_back(z);
  }
  return out;
}

Complex deepest_point(const RelativeSchottkySet& s) {
  const JordanBoundary& outer = s.outer;
  const Box b = outer.bbox();
  Complex best = 0.5 * Complex(b.xmin + b.xmax, b.ymin + b.ymax);
  double depth = outer.contains(best) && s.contains(best) ? outer.distance(best) : -1.0;
  for (int i = 0; i <= 64; ++i)
    for (int j = 0; j <= 64; ++j) {
      const Complex z(b.xmin + b.width() * i / 64.0, b.ymin + b.height() * j / 64.0);
      if (outer.contains(z) && s.contains(z) && outer.distance(z) > depth) {
        depth = outer.distance(z);
        best = z;
      }
    }
  return best;
}

struct CorpusMap {
  std::string name;
  RelativeSchottkySet source;
  KoebeResult koebe;
};

std::vector<CorpusMap> load_corpus() {
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(kFixtures + "/corpus")) paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<CorpusMap> out;
  for (const auto& p : paths) {
    CorpusMap m;
    m.name = p.filename().string();
    m.source = io::load_scene(p.string());
    m.koebe = koebe_uniformize(m.source);
    out.push_back(std::move(m));
  }
  return out;
}

// 1. Conformal modulus of the round annulus 1 < |z| < e.
void annulus_modulus() {
  setenv("SFORGE_THREADS", "1", 1);
  const auto s = io::load_scene(kFixtures + "/annulus.json");
  const auto t0 = std::chrono::steady_clock::now();
  const ModulusResult r = conformal_modulus(s, ContinuumSet::circle(0), ContinuumSet::outer(), 256);
  const double secs = seconds_since(t0);
  unsetenv("SFORGE_THREADS");
  const double rel = std::abs(r.value / (2.0 * kPi) - 1.0);
  verdict(1, rel < 0.03 && secs < 60.0, "annulus modulus",
          "value " + num(r.value) + " vs 2pi, rel err " + num(rel) + " (tol 0.03), " + num(secs) +
              " s single-threaded (limit 60)");
}

// 2. Rerouting length bound on random scenes and the diameter fixture.
void rerouting() {
  Rng rng(77, "acceptance-reroute");
  int trials = 0, violations = 0;
  double worst = 0.0;
  while (trials < 1200) {
    const auto s = testgen::random_scene(rng, 12);
    std::vector<Complex> v{testgen::random_point_in_set(rng, s)};
    const int inner = rng.index(5);
    for (int k = 0; k < inner; ++k) v.push_back(testgen::random_point_in_omega(rng, s));
    v.push_back(testgen::random_point_in_set(rng, s));
    if (std::adjacent_find(v.begin(), v.end()) != v.end()) continue;
    const RerouteResult r = reroute(s, Polyline(v));
    ++trials;
    worst = std::max(worst, r.ratio);
    if (r.ratio > kPi * (1.0 + 1e-3)) ++violations;
  }
  const auto disc = io::load_scene(kFixtures + "/diameter_disc.json");
  const auto curve = io::parse_polyline(io::read_file(kFixtures + "/diameter_curve.json"));
  const double ratio = reroute(disc, curve).ratio;
  const double err = std::abs(ratio - (2.0 + kPi) / 4.0);
  verdict(2, violations == 0 && err < 1e-3, "rerouting bound",
          std::to_string(trials) + " random curves, " + std::to_string(violations) + " violations, worst ratio " +
              num(worst) + " (limit pi(1+1e-3)); diameter ratio " + num(ratio) + " vs (2+pi)/4, err " + num(err));
}

// 3. Koebe convergence, mark placement and idempotence on the corpus.
void koebe_convergence(const std::vector<CorpusMap>& corpus) {
  const Complex targets[3] = {1.0, Complex(0, 1), -1.0};
  int bad = 0;
  double worst_res = 0.0, worst_mark = 0.0, worst_id = 0.0;
  int worst_sweeps = 0;
  std::string first_bad;
  for (const CorpusMap& m : corpus) {
    const UniformizeReport& rep = m.koebe.report;
    double mark = 0.0;
    for (int j = 0; j < 3; ++j) mark = std::max(mark, std::abs(m.koebe.map(m.source.marks[j]) - targets[j]));
    const KoebeResult again = koebe_uniformize(m.koebe.target);
    double id = 0.0;
    for (Complex z : interior_points(m.koebe.target, 200, 0.01, 5)) id = std::max(id, std::abs(again.map(z) - z));
    for (size_t i = 0; i < m.koebe.target.discs.size(); ++i) {
      id = std::max(id, std::abs(again.target.discs[i].center - m.koebe.target.discs[i].center));
      id = std::max(id, std::abs(again.target.discs[i].radius - m.koebe.target.discs[i].radius));
    }
    worst_res = std::max(worst_res, rep.circle_residual);
    worst_sweeps = std::max(worst_sweeps, rep.sweeps);
    worst_mark = std::max(worst_mark, mark);
    worst_id = std::max(worst_id, id);
    const bool ok = rep.converged && rep.circle_residual < 1e-6 && rep.sweeps <= 500 && mark < 1e-5 && id < 2e-6;
    if (!ok) {
      ++bad;
      if (first_bad.empty()) first_bad = ", first failure " + m.name;
    }
  }
  verdict(3, bad == 0 && !corpus.empty(), "Koebe convergence",
          std::to_string(corpus.size() - bad) + "/" + std::to_string(corpus.size()) + " scenes; max residual " +
              num(worst_res) + " (tol 1e-6), max sweeps " + std::to_string(worst_sweeps) + ", max mark error " +
              num(worst_mark) + " (tol 1e-5), max re-run deviation " + num(worst_id) + " (tol 2e-6)" + first_bad);
}

// 4. Transboundary modulus of circle 0 against the arc between the first two marks, source vs image.
void modulus_invariance(const std::vector<CorpusMap>& corpus) {
  int checked = 0, bad = 0;
  double worst = 0.0;
  std::string worst_name;
  for (const CorpusMap& m : corpus) {
    if (!m.koebe.report.converged || m.source.discs.empty()) continue;
    const auto& t = m.koebe.target;
    const double src = transboundary_modulus(m.source, ContinuumSet::circle(0),
                                             ContinuumSet::outer_arc(m.source, m.source.marks[0], m.source.marks[1]),
                                             256)
                           .value;
    const double img =
        transboundary_modulus(t, ContinuumSet::circle(0), ContinuumSet::outer_arc(t, t.marks[0], t.marks[1]), 256)
            .value;
    const double rel = std::abs(src - img) / img;
    ++checked;
    if (rel >= 0.05) ++bad;
    if (rel > worst) {
      worst = rel;
      worst_name = m.name;
    }
  }
  verdict(4, bad == 0 && checked > 0, "modulus invariance",
          std::to_string(checked) + " convergent runs, " + std::to_string(bad) + " above 5%, worst rel diff " +
              num(worst) + " (" + worst_name + ")");
}

// 5. Schwarz-Pick with 10^4 pairs per map.
void schwarz_pick(const std::vector<CorpusMap>& corpus) {
  int bad = 0, pairs = 0;
  double worst_excess = -1.0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const CorpusMap& m = corpus[i];
    const Evaluator g = [&m](Complex z) { return m.koebe.map(z); };
    const bool nested = m.source.outer.contains(0.0) && m.source.outer.distance(0.0) >= 1.0;
    std::optional<SchwarzPickFrame> frame;
    if (!nested) frame = rescaling_frame(g, m.source, m.koebe.target, deepest_point(m.source));
    const BoundReport b = schwarz_pick_check(g, m.source, m.koebe.target, 10000, i, frame);
    pairs += b.samples;
    worst_excess = std::max(worst_excess, b.measured);
    if (!b.pass) ++bad;
  }
  verdict(5, bad == 0 && !corpus.empty(), "Schwarz-Pick",
          std::to_string(corpus.size()) + " maps, " + std::to_string(pairs) + " pairs, " + std::to_string(bad) +
              " maps with violations; worst excess " + num(worst_excess) + " (margin 1e-3)");
}

// 6. Lipschitz envelope and finite second-derivative proxies.
void lipschitz(const std::vector<CorpusMap>& corpus) {
  int bad = 0, probes = 0, nonfinite = 0;
  double worst_ratio = 0.0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const CorpusMap& m = corpus[i];
    const Evaluator g = [&m](Complex z) { return m.koebe.map(z); };
    const double diam = m.source.outer.diameter();
    for (Complex p : interior_points(m.source, 6, 0.05 * diam, 100 + i)) {
      const double r = m.source.outer.distance(p);
      const BoundReport b = lipschitz_profile(g, m.source, p, r, m.koebe.target.outer.diameter(), 500, i);
      worst_ratio = std::max(worst_ratio, b.measured / b.bound);
      if (!b.pass) ++bad;
      ++probes;
      try {
        const Jet2 j = estimate_jet(g, p, 0.05 * clearance(m.source, p));
        if (!std::isfinite(std::abs(j.d2))) ++nonfinite;
      } catch (const Error&) {
        ++nonfinite;
      }
    }
  }
  verdict(6, bad == 0 && nonfinite == 0 && probes > 0, "Lipschitz envelope",
          std::to_string(probes) + " probes on " + std::to_string(corpus.size()) + " maps, " + std::to_string(bad) +
              " above pi 2 sigma / r (1+1e-2), worst measured/bound " + num(worst_ratio) + "; " +
              std::to_string(nonfinite) + " non-finite g'' proxies");
}

Polyline circle_curve(Complex c, double r, int n = 256) {
  std::vector<Complex> v;
  for (int k = 0; k < n; ++k) v.push_back(c + std::polar(r, 2.0 * kPi * k / n));
  return Polyline(v, true);
}

Polyline reversed(const Polyline& p) {
  std::vector<Complex> v(p.vertices().rbegin(), p.vertices().rend());
  return Polyline(v, true);
}

// 7. Index identities.
void index_identities() {
  struct Case {
    std::string label;
    int got;
    int want;
  };
  std::vector<Case> cases;
  const Polyline unit = circle_curve(0.0, 1.0);
  // Moebius and linear fixtures: displacement z -> f(z) - z.
  const MobiusMap hyperbolic(2.0, 1.0, 1.0, 2.0);  // fixed points +-1, pole -2
  const Evaluator disp = [&](Complex z) { return hyperbolic.apply(z) - z; };
  cases.push_back({"moebius about +1", winding_index(circle_curve(1.0, 0.3), disp), 1});
  cases.push_back({"moebius about 0 (no fixed point)", winding_index(circle_curve(0.0, 0.5), disp), 0});
  cases.push_back({"moebius about -2 (pole)", winding_index(circle_curve(-2.0, 0.3), disp), -1});
  cases.push_back({"linear 2z+1 about -1", winding_index(circle_curve(-1.0, 0.5), [](Complex z) { return z + 1.0; }), 1});
  cases.push_back({"linear 2z+1 about 1", winding_index(circle_curve(1.0, 0.5), [](Complex z) { return z + 1.0; }), 0});
  cases.push_back({"rotation about 0", winding_index(unit, [](Complex z) { return Complex(0, 1) * z - z; }), 1});

  // Rational map R(z) = z^2 (z - 2) / (z + 3) has fixed points 0 and the roots of z^2 - 3z - 3 = 0;
  // boundary sum on a domain equals the fixed points minus the poles of R(z) - z inside it.
  const Evaluator r_disp = [](Complex z) { return z * z * (z - 2.0) / (z + 3.0) - z; };
  const double s21 = std::sqrt(21.0);
  const std::vector<Complex> fixed{0.0, (3.0 + s21) / 2.0, (3.0 - s21) / 2.0};
  int local_sum = 0;
  for (Complex f : fixed) local_sum += winding_index(circle_curve(f, 0.2), r_disp);
  cases.push_back({"rational local indices", local_sum, 3});
  cases.push_back({"rational big circle (3 fixed, 1 pole)", winding_index(circle_curve(0.0, 6.0), r_disp), 2});
  // Annular domain 0.5 < |z| < 5 with a hole around the pole: outer counterclockwise, holes clockwise.
  const int domain_sum = winding_index(circle_curve(0.0, 5.0), r_disp) +
                         winding_index(reversed(circle_curve(0.0, 0.5)), r_disp) +
                         winding_index(reversed(circle_curve(-3.0, 0.4)), r_disp);
  cases.push_back({"rational multiply connected domain", domain_sum, 2});

  int bad = 0;
  std::string detail;
  for (const Case& c : cases) {
    if (c.got != c.want) {
      ++bad;
      detail += "; " + c.label + " gave " + std::to_string(c.got) + " want " + std::to_string(c.want);
    }
  }
  verdict(7, bad == 0, "index identities",
          std::to_string(cases.size() - bad) + "/" + std::to_string(cases.size()) + " exact" + detail);
}

// 8. Derivative limits: Moebius ground truth on S and isotropy of pipeline maps.
void derivatives(const std::vector<CorpusMap>& corpus) {
  const auto s = io::load_scene(kFixtures + "/twelve_discs_a.json");
  const MobiusMap m(Complex(1.0, 0.5), Complex(0.2, -0.1), Complex(0.3, 0.2), Complex(2.5, 0.0));
  double mob_err = 0.0;
  int mob_points = 0;
  Rng rng(8, "acceptance-derivative");
  while (mob_points < 40) {
    const Complex p = testgen::random_point_in_set(rng, s);
    if (s.outer.distance(p) < 0.05) continue;
    const auto est = estimate_derivative([&m](Complex z) { return m.apply(z); }, s, p);
    mob_err = std::max(mob_err, std::abs(est.value - m.derivative(p)));
    ++mob_points;
  }

  double spread = 0.0, min_abs = std::numeric_limits<double>::infinity();
  int probes = 0, failed = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const CorpusMap& c = corpus[i];
    const double diam = c.source.outer.diameter();
    for (Complex p : interior_points(c.source, 4, 0.05 * diam, 200 + i)) {
      const double h = 1e-3 * clearance(c.source, p);
      std::vector<Complex> q;
      for (int k = 0; k < 8; ++k) {
        const Complex dz = std::polar(h, 2.0 * kPi * k / 8);
        q.push_back((c.koebe.map(p + dz) - c.koebe.map(p)) / dz);
      }
      for (int k = 1; k < 8; ++k) spread = std::max(spread, std::abs(q[k] - q[0]) / std::abs(q[0]));
      try {
        const auto est = estimate_derivative([&c](Complex z) { return c.koebe.map(z); }, c.source, p);
        min_abs = std::min(min_abs, std::abs(est.value));
        if (!est.converged) ++failed;
      } catch (const Error&) {
        ++failed;
      }
      ++probes;
    }
  }
  const bool pass = mob_err < 1e-4 && spread < 1e-2 && min_abs > 1e-3 && failed == 0 && probes > 0;
  verdict(8, pass, "derivative limit",
          "Moebius max err " + num(mob_err) + " over " + std::to_string(mob_points) + " points (tol 1e-4); pipeline " +
              std::to_string(probes) + " probes, max 8-direction spread " + num(spread) + " (tol 1e-2), min |g'| " +
              num(min_abs) + " (floor 1e-3), " + std::to_string(failed) + " unconverged");
}

// Image of the scene under a Moebius map whose pole lies outside closure(Omega).
RelativeSchottkySet moebius_image(const RelativeSchottkySet& s, const MobiusMap& g, int per_edge) {
  RelativeSchottkySet t;
  if (s.outer.is_circle()) {
    const Disc& d = s.outer.circle();
    t.outer = JordanBoundary(
        circle_through(g.apply(d.point_at(0.0)), g.apply(d.point_at(2.0)), g.apply(d.point_at(4.0))));
  } else {
    std::vector<Complex> v;
    const Polyline& p = s.outer.polygon();
    for (size_t i = 0; i < p.segment_count(); ++i)
      for (int k = 0; k < per_edge; ++k)
        v.push_back(g.apply(p.segment_start(i) + (p.segment_end(i) - p.segment_start(i)) * (double(k) / per_edge)));
    t.outer = JordanBoundary(Polyline(v, true));
  }
  for (const Disc& d : s.discs)
    t.discs.push_back(circle_through(g.apply(d.point_at(0.0)), g.apply(d.point_at(2.0)), g.apply(d.point_at(4.0))));
  for (Complex z : s.marks) t.marks.push_back(g.apply(z));
  return t;
}

// 9. Rigidity: f = g~^-1 o g on S recovers G where g~ uniformizes G(S).
void rigidity() {
  const MobiusMap G(Complex(1.0, 0.2), Complex(0.1, 0.3), Complex(0.08, -0.05), Complex(1.2, 0.0));
  const std::vector<double> tols{1e-4, 1e-5, 1e-6};
  bool pass = true;
  std::string detail;
  for (const char* name : {"twelve_discs_a", "twelve_discs_b", "twelve_discs_c"}) {
    const auto s = io::load_scene(kFixtures + "/" + name + ".json");
    const RelativeSchottkySet t = moebius_image(s, G, 256);
    std::vector<Complex> z;
    Rng rng(9, name);
    while (z.size() < 200) {
      const Complex p = testgen::random_point_in_set(rng, s);
      if (clearance(s, p) >= 0.01) z.push_back(p);
    }
    std::vector<double> sup;
    double fit_res = 0.0;
    bool converged = true;
    for (double tol : tols) {
      KoebeOptions a, b;
      a.tol = b.tol = tol;
      b.disc_samples = 320;
      b.riemann.polygon_samples = 3072;
      const KoebeResult g = koebe_uniformize(s, a);
      const KoebeResult gt = koebe_uniformize(t, b);
      converged = converged && g.report.converged && gt.report.converged;
      std::vector<Complex> f;
      double e = 0.0;
      for (Complex p : z) {
        f.push_back(gt.map.inverse(g.map(p)));
        e = std::max(e, std::abs(f.back() - G.apply(p)));
      }
      sup.push_back(e);
      if (tol == tols.back()) fit_res = rigidity_probe(z, f).residual;
    }
    const bool monotone = sup[1] < sup[0] && sup[2] < sup[1];
    const bool ok = converged && sup.back() < 1e-2 && monotone;
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + name + " sup|f-G| at tol 1e-4,1e-5,1e-6: " + num(sup[0]) + ", " +
              num(sup[1]) + ", " + num(sup[2]) + (monotone ? " decreasing" : " not decreasing") + ", fit residual " +
              num(fit_res);
  }
  verdict(9, pass, "rigidity", detail + " (limit 1e-2 at tol 1e-6)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs one command through the C API and returns report plus file contents keyed by file name.
std::map<std::string, std::string> capi_outputs(const std::function<sforge_status(sforge_config*, sforge_result**)>& run,
                                                const std::string& dir) {
  fs::remove_all(dir);
  sforge_config* c = nullptr;
  sforge_config_new(&c);
  sforge_config_merge_json(c, ("{\"output\": \"" + dir + "\"}").c_str());
  sforge_result* r = nullptr;
  std::map<std::string, std::string> out;
  if (run(c, &r) != SFORGE_OK) {
    out["error"] = sforge_last_error();
  } else {
    // Reports name their output directory; normalize it so runs in different directories compare.
    std::string rep = sforge_result_report(r);
    for (size_t at = rep.find(dir); at != std::string::npos; at = rep.find(dir, at)) rep.replace(at, dir.size(), "<out>");
    out["report"] = rep;
    for (size_t i = 0; i < sforge_result_file_count(r); ++i) {
      const std::string f = sforge_result_file(r, i);
      out[fs::path(f).filename().string()] = slurp(f);
    }
    sforge_result_free(r);
  }
  sforge_config_free(c);
  return out;
}

// 10. Determinism of the modulus and uniformize commands across reruns and thread counts.
void determinism() {
  sforge_scene* twenty = nullptr;
  sforge_scene* eight = nullptr;
  sforge_scene_load((kFixtures + "/twenty_discs.json").c_str(), &twenty);
  sforge_scene_load((kFixtures + "/eight_discs.json").c_str(), &eight);
  const fs::path base = fs::temp_directory_path() / "sforge_acceptance_determinism";
  const int seq[] = {1, 2, 4, 8};
  int compared = 0, differing = 0;
  for (const char* cmd : {"modulus", "uniformize"}) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* threads : {"1", "1", "4"}) {
      setenv("SFORGE_THREADS", threads, 1);
      const std::string dir = (base / (std::string(cmd) + "_" + std::to_string(runs.size()))).string();
      if (std::string(cmd) == "modulus")
        runs.push_back(capi_outputs(
            [&](sforge_config* c, sforge_result** r) {
              return sforge_cmd_modulus(twenty, "circle:0", "outer", 1, c, r);
            },
            dir));
      else
        runs.push_back(capi_outputs(
            [&](sforge_config* c, sforge_result** r) { return sforge_cmd_uniformize(eight, seq, 4, c, r); }, dir));
    }
    unsetenv("SFORGE_THREADS");
    for (size_t k = 1; k < runs.size(); ++k) {
      ++compared;
      if (runs[k] != runs[0] || runs[0].count("error")) ++differing;
    }
  }
  fs::remove_all(base);
  sforge_scene_free(twenty);
  sforge_scene_free(eight);
  verdict(10, differing == 0, "determinism",
          std::to_string(compared) + " output-set comparisons (rerun and SFORGE_THREADS 1 vs 4), " +
              std::to_string(differing) + " differ");
}

// An exception inside a criterion fails that criterion only.
void guarded(int id, const std::string& title, const std::function<void()>& run) {
  try {
    run();
  } catch (const std::exception& e) {
    verdict(id, false, title, std::string("aborted: ") + e.what());
  }
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  guarded(1, "annulus modulus", annulus_modulus);
  guarded(2, "rerouting bound", rerouting);
  std::vector<CorpusMap> corpus;
  try {
    corpus = load_corpus();
  } catch (const std::exception& e) {
    std::printf("corpus uniformization aborted: %s\n", e.what());
  }
  guarded(3, "Koebe convergence", [&] { koebe_convergence(corpus); });
  guarded(4, "modulus invariance", [&] { modulus_invariance(corpus); });
  guarded(5, "Schwarz-Pick", [&] { schwarz_pick(corpus); });
  guarded(6, "Lipschitz envelope", [&] { lipschitz(corpus); });
  guarded(7, "index identities", index_identities);
  guarded(8, "derivative limit", [&] { derivatives(corpus); });
  guarded(9, "rigidity", rigidity);
  guarded(10, "determinism", determinism);
  std::printf("%s: %d failing criteria, %.1f s\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures,
              seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
