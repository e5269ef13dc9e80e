#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "curves.hpp"
#include "errors.hpp"
#include "modulus.hpp"
#include "rng.hpp"
#include "uniformize.hpp"
#include "verify.hpp"

namespace sforge::app {

namespace {

using json = nlohmann::ordered_json;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void emit(CommandResult& r, const std::string& dir, const std::string& name, const std::string& content) {
  const std::string path = join(dir, name);
  io::write_file(path, content);
  r.files.push_back(path);
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

json validation_json(const ValidationReport& v) {
  json out{{"ok", v.ok}, {"violations", json::array()}};
  for (const Violation& x : v.violations)
    out["violations"].push_back(
        json{{"kind", x.kind}, {"discs", x.discs}, {"measured", x.measured}, {"message", x.message}});
  return out;
}

/// Throws a precondition error listing the violations of an invalid scene.
void require_valid(const RelativeSchottkySet& s) {
  const ValidationReport v = validate(s);
  if (v.ok) return;
  std::string msg = "scene is invalid:";
  for (const Violation& x : v.violations) msg += " " + x.message + ";";
  throw precondition_error(msg);
}

json uniformize_json(const KoebeResult& k) {
  const UniformizeReport& r = k.report;
  return json{{"converged", r.converged},
              {"sweeps", r.sweeps},
              {"circle_residual", r.circle_residual},
              {"normalization_residual", r.normalization_residual},
              {"boundary_residual", r.boundary_residual},
              {"history", r.history},
              {"discs", k.target.discs.size()},
              {"elementary_maps", k.map.elementary_count()}};
}

std::string overlay_svg(const RelativeSchottkySet& source, const RelativeSchottkySet& target) {
  const Box a = source.outer.bbox(), b = target.outer.bbox();
  io::SvgCanvas c({std::min(a.xmin, b.xmin), std::min(a.ymin, b.ymin), std::max(a.xmax, b.xmax),
                   std::max(a.ymax, b.ymax)});
  c.scene(source, "#888888");
  c.scene(target, "#1f4e9c", "#dbe6f6");
  return c.str();
}

KoebeOptions koebe_options(const io::RunConfig& cfg) {
  KoebeOptions opt;
  opt.tol = cfg.tol;
  opt.max_sweeps = cfg.max_sweeps;
  return opt;
}

json bound_json(const BoundReport& b) {
  json d = json::object();
  for (const auto& [k, v] : b.details) d[k] = v;
  return json{{"name", b.name},       {"constant", b.constant}, {"kind", b.kind},   {"measured", b.measured},
              {"bound", b.bound},     {"margin", b.margin},     {"samples", b.samples}, {"pass", b.pass},
              {"details", d}};
}

BoundReport envelope(const std::string& name, const std::string& constant) {
  BoundReport b;
  b.name = name;
  b.constant = constant;
  b.kind = "envelope";
  return b;
}

std::string bound_line(const BoundReport& b) {
  return (b.pass ? "PASS " : "FAIL ") + b.name + " [" + b.kind + "] measured " + fmt(b.measured) + " bound " +
         fmt(b.bound) + " margin " + fmt(b.margin) + " (" + std::to_string(b.samples) + " samples)\n";
}

/// Clearance of z from every boundary component of s (negative inside a disc).
double clearance(const RelativeSchottkySet& s, Complex z) {
  double c = s.outer.contains(z) ? s.outer.distance(z) : -s.outer.distance(z);
  for (const Disc& d : s.discs) c = std::min(c, std::abs(z - d.center) - d.radius);
  return c;
}

std::vector<Complex> probe_points(const RelativeSchottkySet& s, int count, double margin, uint64_t seed) {
  Rng rng(seed, "verify-probe");
  const Box b = s.outer.bbox();
  std::vector<Complex> out;
  for (int attempt = 0; attempt < 20000 && static_cast<int>(out.size()) < count; ++attempt) {
    const Complex z(rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax));
    if (clearance(s, z) >= margin) out.push_back(z);
  }
  return out;
}

/// Point of S farthest from the outer boundary on a coarse grid.
Complex deepest_point(const RelativeSchottkySet& s) {
  const JordanBoundary& outer = s.outer;
  const Box b = outer.bbox();
  Complex best = 0.5 * Complex(b.xmin + b.xmax, b.ymin + b.ymax);
  double depth = outer.contains(best) && s.contains(best) ? outer.distance(best) : -1.0;
  for (int i = 0; i <= 64; ++i)
    for (int j = 0; j <= 64; ++j) {
      const Complex z(b.xmin + b.width() * i / 64.0, b.ymin + b.height() * j / 64.0);
      if (!outer.contains(z) || !s.contains(z)) continue;
      const double d = outer.distance(z);
      if (d > depth) {
        depth = d;
        best = z;
      }
    }
  return best;
}

}  // namespace

CommandResult cmd_validate(const RelativeSchottkySet& s) {
  const ValidationReport v = validate(s);
  CommandResult r;
  r.exit_code = v.ok ? 0 : 1;
  r.report = validation_json(v).dump(2) + "\n";
  r.summary = v.ok ? "valid scene: " + std::to_string(s.discs.size()) + " discs\n" : "invalid scene\n";
  for (const Violation& x : v.violations) r.summary += "  " + x.kind + ": " + x.message + "\n";
  return r;
}

CommandResult cmd_reroute(const RelativeSchottkySet& s, const Polyline& curve, const io::RunConfig& cfg, bool svg) {
  require_valid(s);
  const RerouteResult rr = reroute(s, curve);
  const double bound = std::numbers::pi * (1.0 + 1e-3);
  CommandResult r;
  r.exit_code = rr.ratio <= bound ? 0 : 4;
  const double new_length = rr.curve.length();
  json rep{{"original_length", rr.original_length}, {"rerouted_length", new_length}, {"ratio", rr.ratio},
           {"bound", bound},    {"within_bound", rr.ratio <= bound},  {"discs_rerouted", rr.steps.size()},
           {"passes", rr.passes}};
  r.report = rep.dump(2) + "\n";
  emit(r, cfg.output, "rerouted.json", io::polyline_to_json(rr.curve));
  emit(r, cfg.output, "reroute.csv",
       "original_length,rerouted_length,ratio\n" + io::format_double(rr.original_length) + "," +
           io::format_double(new_length) + "," + io::format_double(rr.ratio) + "\n");
  if (svg) {
    io::SvgCanvas c(s.outer.bbox());
    c.scene(s, "#444444", "#eeeeee");
    c.polyline(curve, "#999999", 1.5);
    c.polyline(rr.curve, "#c0392b", 1.5);
    emit(r, cfg.output, "reroute.svg", c.str());
  }
  r.summary = "length " + fmt(rr.original_length) + " -> " + fmt(new_length) + ", ratio " + fmt(rr.ratio) +
              (rr.ratio <= bound ? " (within pi bound)\n" : " (EXCEEDS pi bound)\n");
  return r;
}

CommandResult cmd_modulus(const RelativeSchottkySet& s, const std::string& e_spec, const std::string& f_spec,
                          bool transboundary, const io::RunConfig& cfg) {
  require_valid(s);
  const ContinuumSet e = ContinuumSet::parse(e_spec, s), f = ContinuumSet::parse(f_spec, s);
  const ModulusResult m =
      transboundary ? transboundary_modulus(s, e, f, cfg.grid_n) : conformal_modulus(s, e, f, cfg.grid_n);
  CommandResult r;
  json rep{{"value", m.value},
           {"mode", transboundary ? "transboundary" : "conformal"},
           {"e", e_spec},
           {"f", f_spec},
           {"grid_n", cfg.grid_n},
           {"method", m.method},
           {"upper_bound", m.upper_bound},
           {"lower_bound", m.lower_bound},
           {"admissibility_slack", m.admissibility_slack},
           {"empty_family", m.empty_family},
           {"iterations", m.iterations}};
  r.report = rep.dump(2) + "\n";
  emit(r, cfg.output, "modulus.json", r.report);

  const MassDistribution& dist = m.distribution;
  std::string csv = "kind,index,i,j,x,y,value\n";
  double peak = 0.0;
  if (dist.grid) {
    const ModulusGrid& g = *dist.grid;
    for (double d : dist.density) peak = std::max(peak, d);
    io::SvgCanvas c(s.outer.bbox());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int k = g.cell_index(i, j);
        const double rho = dist.density[k];
        if (rho <= 0.0) continue;
        const Complex z = g.cell_center(i, j);
        csv += "cell," + std::to_string(k) + "," + std::to_string(i) + "," + std::to_string(j) + "," +
               io::format_double(z.real()) + "," + io::format_double(z.imag()) + "," + io::format_double(rho) + "\n";
        const Complex lo = g.node(i, j);
        c.rect({lo.real(), lo.imag(), lo.real() + g.h, lo.imag() + g.h}, io::heat_colour(peak > 0 ? rho / peak : 0.0));
      }
    c.scene(s, "#222222");
    emit(r, cfg.output, "mass.svg", c.str());
  }
  for (size_t i = 0; i < dist.holes.size(); ++i)
    csv += "disc," + std::to_string(i) + ",,," + io::format_double(dist.holes[i].center.real()) + "," +
           io::format_double(dist.holes[i].center.imag()) + "," + io::format_double(dist.weights[i]) + "\n";
  emit(r, cfg.output, "certificate.csv", csv);
  r.summary = std::string(transboundary ? "transboundary" : "conformal") + " modulus " + fmt(m.value) +
              " (grid " + std::to_string(cfg.grid_n) + ", " + m.method + ")\n";
  return r;
}

CommandResult cmd_uniformize(const RelativeSchottkySet& s, const std::vector<int>& sequence,
                             const io::RunConfig& cfg) {
  if (s.marks.size() != 3) throw precondition_error("uniformize needs three marks on the outer boundary");
  require_valid(s);
  const KoebeOptions opt = koebe_options(cfg);
  CommandResult r;
  json rep;
  bool all_converged = true;

  const auto write_run = [&](const KoebeResult& k, const std::string& suffix) {
    emit(r, cfg.output, "target" + suffix + ".json", io::scene_to_json(k.target));
    emit(r, cfg.output, "report" + suffix + ".json", uniformize_json(k).dump(2) + "\n");
    emit(r, cfg.output, "overlay" + suffix + ".svg", overlay_svg(k.map.source, k.target));
    all_converged = all_converged && k.report.converged;
    r.summary += (k.report.converged ? "converged" : "NOT converged") + std::string(suffix.empty() ? "" : " " + suffix) +
                 ": " + std::to_string(k.report.sweeps) + " sweeps, circle residual " +
                 fmt(k.report.circle_residual) + "\n";
  };

  if (sequence.empty()) {
    const KoebeResult k = koebe_uniformize(s, opt);
    write_run(k, "");
    rep = uniformize_json(k);
  } else {
    const SequenceResult seq = uniformize_sequence(s, sequence, opt, 0.1, 400, cfg.seed);
    rep["n_list"] = sequence;
    rep["runs"] = json::array();
    for (size_t i = 0; i < seq.runs.size(); ++i) {
      write_run(seq.runs[i], "_n" + std::to_string(sequence[i]));
      json run = uniformize_json(seq.runs[i]);
      run["n"] = sequence[i];
      rep["runs"].push_back(run);
    }
    rep["hausdorff_deltas"] = seq.hausdorff_deltas;
    rep["sup_deltas"] = seq.sup_deltas;
    rep["truncated"] = seq.truncated;
    all_converged = all_converged && !seq.truncated;
    for (size_t i = 0; i < seq.hausdorff_deltas.size(); ++i)
      r.summary += "delta n" + std::to_string(sequence[i]) + " -> n" + std::to_string(sequence[i + 1]) +
                   ": hausdorff " + fmt(seq.hausdorff_deltas[i]) + ", sup " + fmt(seq.sup_deltas[i]) + "\n";
    emit(r, cfg.output, "sequence.json", rep.dump(2) + "\n");
  }
  r.report = rep.dump(2) + "\n";
  r.exit_code = all_converged ? 0 : 3;
  return r;
}

Fault parse_fault(const std::string& name) {
  if (name.empty() || name == "none") return Fault::None;
  if (name == "expand") return Fault::Expand;
  throw parse_error("unknown fault '" + name + "' (expected none or expand)");
}

CommandResult cmd_verify(const RelativeSchottkySet& s, const io::RunConfig& cfg, Fault fault) {
  if (s.marks.size() != 3) throw precondition_error("verify needs three marks on the outer boundary");
  require_valid(s);
  const KoebeResult k = koebe_uniformize(s, koebe_options(cfg));
  CommandResult r;
  json rep{{"fault", fault == Fault::Expand ? "expand" : "none"}, {"uniformize", uniformize_json(k)}};
  if (!k.report.converged) {
    r.exit_code = 3;
    r.report = rep.dump(2) + "\n";
    r.summary = "uniformization did not converge; bounds not checked\n";
    emit(r, cfg.output, "verify.json", r.report);
    return r;
  }

  // The expand fault post-composes with z (2 - |z|), which stretches hyperbolic distances near 0.
  const Evaluator g = [&k, fault](Complex z) {
    const Complex w = k.map(z);
    return fault == Fault::Expand ? w * (2.0 - std::abs(w)) : w;
  };
  const Evaluator g_inv = [&k](Complex w) { return k.map.inverse(w); };
  const double diam = s.outer.diameter();
  const std::vector<Complex> probes = probe_points(s, 6, 0.05 * diam, cfg.seed);
  std::vector<BoundReport> bounds;

  // Dilatation at probe points against the conformal value 1.
  {
    BoundReport b = envelope("dilatation", "1 + 5e-2");
    b.bound = 1.05;
    for (Complex p : probes) {
      const double c = clearance(s, p);
      b.measured = std::max(b.measured, dilatation(g, p, {0.02 * c, 0.05 * c}));
      ++b.samples;
    }
    b.margin = b.bound - b.measured;
    b.pass = b.margin >= 0.0;
    bounds.push_back(b);
  }

  // Schwarz-Pick, in the identity frame when the scenes are nested about the unit disc.
  {
    const bool nested = s.outer.contains(0.0) && s.outer.distance(0.0) >= 1.0;
    std::optional<SchwarzPickFrame> frame;
    if (!nested) frame = rescaling_frame(g, s, k.target, deepest_point(s));
    bounds.push_back(schwarz_pick_check(g, s, k.target, cfg.samples, cfg.seed, frame));
  }

  // Lipschitz envelope on balls about the probe points.
  {
    BoundReport worst;
    bool first = true;
    for (size_t i = 0; i < probes.size(); ++i) {
      const double radius = s.outer.distance(probes[i]);
      const BoundReport b = lipschitz_profile(g, s, probes[i], radius, k.target.outer.diameter(),
                                              std::max(50, cfg.samples / 20), cfg.seed + i);
      if (first || b.margin / b.bound < worst.margin / worst.bound) worst = b;
      first = false;
    }
    if (!first) bounds.push_back(worst);
  }

  // Uniform properness in both directions.
  json table = json::array();
  {
    const std::vector<double> depths{0.02 * diam, 0.05 * diam, 0.1 * diam, 0.2 * diam};
    const std::vector<PropernessRow> rows =
        properness_profile(g, s, k.target, depths, std::max(400, cfg.samples / 10), cfg.seed, g_inv);
    BoundReport b = envelope("properness", "dist(g(K_d), image boundary) > 0");
    b.measured = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (size_t i = 0; i < rows.size(); ++i) {
      b.measured = std::min(b.measured, rows[i].clearance);
      if (rows[i].inverse_samples > 0) b.measured = std::min(b.measured, rows[i].inverse_clearance);
      if (i > 0 && rows[i].clearance < rows[i - 1].clearance) monotone = false;
      b.samples += rows[i].samples + rows[i].inverse_samples;
      table.push_back(json{{"d", rows[i].d},
                           {"clearance", rows[i].clearance},
                           {"inverse_clearance", rows[i].inverse_clearance},
                           {"samples", rows[i].samples},
                           {"inverse_samples", rows[i].inverse_samples}});
    }
    b.bound = 0.0;
    b.margin = b.measured;
    b.pass = !rows.empty() && b.measured > 0.0 && monotone;
    b.details = {{"rows", static_cast<double>(rows.size())}, {"monotone", monotone ? 1.0 : 0.0}};
    bounds.push_back(b);
  }

  // Jet intersection at the probe points.
  {
    BoundReport b = envelope("jet_intersection", "min dist < 10 x sampling resolution");
    b.bound = 1.0;
    for (Complex p : probes) {
      const JetCheck c = jet_intersection_check(g, s, k.target, p);
      b.measured = std::max(b.measured, c.min_distance / (10.0 * c.resolution));
      ++b.samples;
    }
    b.margin = b.bound - b.measured;
    b.pass = b.samples > 0 && b.measured < b.bound;
    bounds.push_back(b);
  }

  bool pass = true;
  rep["bounds"] = json::array();
  for (const BoundReport& b : bounds) {
    rep["bounds"].push_back(bound_json(b));
    r.summary += bound_line(b);
    pass = pass && b.pass;
  }
  rep["properness"] = table;
  rep["pass"] = pass;
  r.report = rep.dump(2) + "\n";
  emit(r, cfg.output, "verify.json", r.report);
  r.exit_code = pass ? 0 : 4;
  r.summary += pass ? "all bounds pass\n" : "verification FAILED\n";
  return r;
}

}  // namespace sforge::app
