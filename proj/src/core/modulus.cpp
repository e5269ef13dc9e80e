#include "modulus.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace sforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap01(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

std::vector<double> parse_numbers(const std::string& body, size_t expected, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw parse_error("bad number in set spec '" + spec + "'");
    }
  }
  if (out.size() != expected) throw parse_error("wrong number of values in set spec '" + spec + "'");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuumSet

ContinuumSet ContinuumSet::outer() { return ContinuumSet(); }

ContinuumSet ContinuumSet::outer_arc(const RelativeSchottkySet& s, Complex from, Complex to) {
  ContinuumSet c;
  c.kind_ = Kind::OuterArc;
  c.t0_ = s.outer.param(from);
  c.t1_ = s.outer.param(to);
  c.a_ = s.outer.point(c.t0_);
  c.b_ = s.outer.point(c.t1_);
  if (std::abs(wrap01(c.t1_ - c.t0_)) < 1e-12) throw precondition_error("outer arc has zero length");
  std::ostringstream os;
  os.precision(17);
  os << "arcp:" << from.real() << "," << from.imag() << "," << to.real() << "," << to.imag();
  c.spec_ = os.str();
  return c;
}

ContinuumSet ContinuumSet::circle(int disc) {
  ContinuumSet c;
  c.kind_ = Kind::Circle;
  c.disc_ = disc;
  c.spec_ = "circle:" + std::to_string(disc);
  return c;
}

ContinuumSet ContinuumSet::ball(Complex center, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw precondition_error("ball radius must be positive");
  ContinuumSet c;
  c.kind_ = Kind::Ball;
  c.c_ = center;
  c.r_ = r;
  std::ostringstream os;
  os.precision(17);
  os << "ball:" << center.real() << "," << center.imag() << "," << r;
  c.spec_ = os.str();
  return c;
}

ContinuumSet ContinuumSet::outside(Complex center, double r) {
  ContinuumSet c = ball(center, r);
  c.kind_ = Kind::Outside;
  c.spec_ = "outside" + c.spec_.substr(4);
  return c;
}

ContinuumSet ContinuumSet::segment(Complex a, Complex b) {
  if (a == b) throw precondition_error("segment set has zero length");
  ContinuumSet c;
  c.kind_ = Kind::Segment;
  c.a_ = a;
  c.b_ = b;
  std::ostringstream os;
  os.precision(17);
  os << "segment:" << a.real() << "," << a.imag() << "," << b.real() << "," << b.imag();
  c.spec_ = os.str();
  return c;
}

ContinuumSet ContinuumSet::parse(const std::string& spec, const RelativeSchottkySet& s) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  ContinuumSet out;
  if (head == "outer" && colon == std::string::npos) {
    out = outer();
  } else if (head == "arc") {
    const auto dash = body.find('-');
    if (dash == std::string::npos) throw parse_error("arc spec needs i-j");
    int i, j;
    try {
      i = std::stoi(body.substr(0, dash));
      j = std::stoi(body.substr(dash + 1));
    } catch (const std::exception&) {
      throw parse_error("bad mark index in '" + spec + "'");
    }
    if (s.marks.size() != 3) throw precondition_error("arc spec needs scene marks");
    if (i < 0 || j < 0 || i > 2 || j > 2 || i == j) throw precondition_error("mark indices must be distinct in 0..2");
    out = outer_arc(s, s.marks[i], s.marks[j]);
  } else if (head == "arcp") {
    const auto v = parse_numbers(body, 4, spec);
    out = outer_arc(s, Complex(v[0], v[1]), Complex(v[2], v[3]));
  } else if (head == "circle") {
    int k;
    try {
      size_t used = 0;
      k = std::stoi(body, &used);
      if (used != body.size()) throw std::invalid_argument(body);
    } catch (const std::exception&) {
      throw parse_error("bad disc index in '" + spec + "'");
    }
    if (k < 0 || k >= static_cast<int>(s.discs.size())) throw precondition_error("disc index out of range");
    out = circle(k);
  } else if (head == "ball" || head == "outside") {
    const auto v = parse_numbers(body, 3, spec);
    out = head == "ball" ? ball(Complex(v[0], v[1]), v[2]) : outside(Complex(v[0], v[1]), v[2]);
  } else if (head == "segment") {
    const auto v = parse_numbers(body, 4, spec);
    out = segment(Complex(v[0], v[1]), Complex(v[2], v[3]));
  } else {
    throw parse_error("unknown set spec '" + spec + "'");
  }
  out.spec_ = spec;
  return out;
}

bool ContinuumSet::arc_contains_param(double t) const {
  return wrap01(t - t0_) <= wrap01(t1_ - t0_) + 1e-12;
}

bool ContinuumSet::contains(Complex z, const RelativeSchottkySet& s) const {
  const double eps = 1e-12 * std::max(1.0, s.scale());
  switch (kind_) {
    case Kind::Outer:
      return s.outer.distance(z) <= eps;
    case Kind::OuterArc:
      return s.outer.distance(z) <= eps && arc_contains_param(s.outer.param(z));
    case Kind::Circle:
      return std::abs(z - s.discs[disc_].center) <= s.discs[disc_].radius;
    case Kind::Ball:
      return std::abs(z - c_) <= r_;
    case Kind::Outside:
      return std::abs(z - c_) >= r_;
    case Kind::Segment:
      return point_segment_distance(z, a_, b_) <= eps;
  }
  return false;
}

std::vector<double> ContinuumSet::hits(Complex a, Complex b, const RelativeSchottkySet& s) const {
  std::vector<double> out;
  switch (kind_) {
    case Kind::Outer:
      for (const auto& [t, p] : s.outer.crossings(a, b)) out.push_back(t);
      break;
    case Kind::OuterArc:
      for (const auto& [t, p] : s.outer.crossings(a, b))
        if (arc_contains_param(p)) out.push_back(t);
      break;
    case Kind::Circle:
      out = segment_circle_intersections(a, b, s.discs[disc_]);
      break;
    case Kind::Ball:
    case Kind::Outside:
      out = segment_circle_intersections(a, b, Disc(c_, r_));
      break;
    case Kind::Segment: {
      double u, v;
      if (segment_intersection(a, b, a_, b_, &u, &v)) out.push_back(u);
      break;
    }
  }
  return out;
}

double ContinuumSet::boundary_distance(Complex z, const RelativeSchottkySet& s) const {
  switch (kind_) {
    case Kind::Outer:
    case Kind::OuterArc:
      return s.outer.distance(z);
    case Kind::Circle:
      return std::abs(std::abs(z - s.discs[disc_].center) - s.discs[disc_].radius);
    case Kind::Ball:
    case Kind::Outside:
      return std::abs(std::abs(z - c_) - r_);
    case Kind::Segment:
      return point_segment_distance(z, a_, b_);
  }
  return 0.0;
}

std::vector<Complex> ContinuumSet::samples(const RelativeSchottkySet& s, int n) const {
  std::vector<Complex> out;
  out.reserve(n + 1);
  switch (kind_) {
    case Kind::Outer:
      return s.outer.samples(n);
    case Kind::OuterArc: {
      const double span = wrap01(t1_ - t0_);
      for (int k = 0; k <= n; ++k) out.push_back(s.outer.point(t0_ + span * k / n));
      break;
    }
    case Kind::Circle:
      for (int k = 0; k < n; ++k) out.push_back(s.discs[disc_].point_at(2.0 * kPi * k / n));
      break;
    case Kind::Ball:
    case Kind::Outside:
      for (int k = 0; k < n; ++k) out.push_back(c_ + std::polar(r_, 2.0 * kPi * k / n));
      break;
    case Kind::Segment:
      for (int k = 0; k <= n; ++k) out.push_back(a_ + (b_ - a_) * (static_cast<double>(k) / n));
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mass distributions

double MassDistribution::mass() const {
  double m = 0.0;
  const double h2 = grid->h * grid->h;
  for (size_t c = 0; c < density.size(); ++c) m += density[c] * density[c] * grid->area[c] * h2;
  for (double w : weights) m += w * w;
  return m;
}

double MassDistribution::density_at(Complex z) const {
  const int i = static_cast<int>(std::floor((z.real() - grid->x0) / grid->h));
  const int j = static_cast<int>(std::floor((z.imag() - grid->y0) / grid->h));
  if (i < 0 || j < 0 || i >= grid->nx || j >= grid->ny) return 0.0;
  return density[grid->cell_index(i, j)];
}

MassDistribution MassDistribution::scaled(double f) const {
  MassDistribution d = *this;
  for (double& v : d.density) v *= f;
  for (double& v : d.weights) v *= f;
  return d;
}

namespace {

// Walks the cells crossed by [a,b]. Calls f(length, cell, other) where `other` is the
// second candidate cell when the piece runs along a grid line, else -1. Cells outside
// the grid are reported as -1.
template <class F>
void walk_cells(const ModulusGrid& g, Complex a, Complex b, F&& f) {
  const Complex d = b - a;
  const double len = std::abs(d);
  if (len == 0.0) return;
  std::vector<double> ts{0.0, 1.0};
  auto add_lines = [&](double p0, double p1, double origin) {
    if (p0 == p1) return;
    const double lo = std::min(p0, p1), hi = std::max(p0, p1);
    for (double k = std::ceil((lo - origin) / g.h); origin + k * g.h < hi; k += 1.0) {
      const double t = (origin + k * g.h - p0) / (p1 - p0);
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
  };
  add_lines(a.real(), b.real(), g.x0);
  add_lines(a.imag(), b.imag(), g.y0);
  std::sort(ts.begin(), ts.end());
  auto cell = [&](int i, int j) { return (i < 0 || j < 0 || i >= g.nx || j >= g.ny) ? -1 : g.cell_index(i, j); };
  for (size_t k = 0; k + 1 < ts.size(); ++k) {
    const double piece = (ts[k + 1] - ts[k]) * len;
    if (piece <= 0.0) continue;
    const Complex m = a + 0.5 * (ts[k] + ts[k + 1]) * d;
    const double fx = (m.real() - g.x0) / g.h, fy = (m.imag() - g.y0) / g.h;
    const bool on_x = d.real() == 0.0 && std::abs(fx - std::round(fx)) < 1e-9;
    const bool on_y = d.imag() == 0.0 && std::abs(fy - std::round(fy)) < 1e-9;
    if (on_x) {
      const int i = static_cast<int>(std::round(fx)), j = static_cast<int>(std::floor(fy));
      f(piece, cell(i - 1, j), cell(i, j));
    } else if (on_y) {
      const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::round(fy));
      f(piece, cell(i, j - 1), cell(i, j));
    } else {
      f(piece, cell(static_cast<int>(std::floor(fx)), static_cast<int>(std::floor(fy))), -2);
    }
  }
}

double segment_integral(const MassDistribution& dist, Complex a, Complex b) {
  double s = 0.0;
  auto val = [&](int c) { return c < 0 ? 0.0 : dist.density[c]; };
  walk_cells(*dist.grid, a, b, [&](double len, int c, int other) {
    s += len * (other == -2 ? val(c) : std::min(val(c), val(other)));
  });
  return s;
}

bool curve_meets(const Polyline& curve, const Disc& d, double inflation) {
  const double reach = d.radius + inflation;
  if (curve.size() == 1) return std::abs(curve.front() - d.center) <= reach;
  for (size_t i = 0; i < curve.segment_count(); ++i)
    if (point_segment_distance(d.center, curve.segment_start(i), curve.segment_end(i)) <= reach) return true;
  return false;
}

}  // namespace

double rho_length(const MassDistribution& dist, const Polyline& curve) {
  double l = 0.0;
  for (size_t i = 0; i < curve.segment_count(); ++i) l += segment_integral(dist, curve.segment_start(i), curve.segment_end(i));
  for (size_t i = 0; i < dist.holes.size(); ++i)
    if (dist.weights[i] != 0.0 && curve_meets(curve, dist.holes[i], dist.meet_inflation)) l += dist.weights[i];
  return l;
}

double admissibility_check(const MassDistribution& dist, const CurveFamily& family) {
  if (family.curves.empty()) return kInf;
  std::vector<double> slack(family.curves.size());
  parallel_for(family.curves.size(), [&](size_t k) { slack[k] = rho_length(dist, family.curves[k]) - 1.0; });
  return *std::min_element(slack.begin(), slack.end());
}

// ---------------------------------------------------------------------------
// Discretisation

namespace {

constexpr int kOut = -1;
constexpr int kFixedE = -2;
constexpr int kFixedF = -3;
constexpr double kMinFraction = 0.01;  // Shortley-Weller distance floor, in cells

struct Event {
  double t;
  int type;  // 0 = E, 1 = F, 2 = wall, 3 = hole
  int which;
};

struct RegTerm {
  int a, b;
  double w;
  int c0, c1;
  bool horizontal;
};

struct DirTerm {
  int a;
  double w, g, t;
  Complex p;
  int c0, c1;
  bool horizontal;
};

struct CutTerm {
  int a, hole;
  double w, t;
  int c0, c1;
  bool horizontal;
};

const int kOffsets16[16][2] = {{1, 0},  {0, 1},  {-1, 0}, {0, -1}, {1, 1},  {-1, 1}, {-1, -1}, {1, -1},
                               {2, 1},  {1, 2},  {-1, 2}, {-2, 1}, {-2, -1}, {-1, -2}, {1, -2}, {2, -1}};

class Problem {
 public:
  Problem(const RelativeSchottkySet& scene, const ContinuumSet& e, const ContinuumSet& f, int n, HoleMode m)
      : s(scene), E(e), F(f), mode(m) {
    check_sets();
    build_grid(n);
    classify_nodes();
    build_terms();
    find_components();
  }

  const RelativeSchottkySet& s;
  ContinuumSet E, F;
  HoleMode mode;
  std::shared_ptr<ModulusGrid> grid;
  std::vector<int> state;          // per node: var index or kOut/kFixedE/kFixedF
  std::vector<int> var_node;       // var -> node
  std::vector<char> var_active;    // var belongs to a component touching E, F or a hole
  std::vector<double> clearance;   // per node
  std::vector<char> hole;          // per disc: acts as obstacle or transboundary hole
  std::vector<char> dirichlet_disc;
  std::vector<RegTerm> regs;
  std::vector<DirTerm> dirs;
  std::vector<CutTerm> cuts;
  bool has_e = false, has_f = false;

  Complex node_point(int node) const {
    const int w = grid->nx + 1;
    return grid->node(node % w, node / w);
  }

  /// Transboundary holes in disc order; maps disc -> slot or -1.
  std::vector<int> hole_slots() const {
    std::vector<int> slot(s.discs.size(), -1);
    if (mode != HoleMode::Transboundary) return slot;
    int k = 0;
    for (size_t i = 0; i < s.discs.size(); ++i)
      if (hole[i]) slot[i] = k++;
    return slot;
  }

  std::vector<Disc> hole_discs() const {
    std::vector<Disc> out;
    if (mode != HoleMode::Transboundary) return out;
    for (size_t i = 0; i < s.discs.size(); ++i)
      if (hole[i]) out.push_back(s.discs[i]);
    return out;
  }

  std::vector<Event> events(Complex a, Complex b) const {
    std::vector<Event> ev;
    for (double t : E.hits(a, b, s)) ev.push_back({t, 0, -1});
    for (double t : F.hits(a, b, s)) ev.push_back({t, 1, -1});
    const bool e_outer = E.kind() == ContinuumSet::Kind::Outer || F.kind() == ContinuumSet::Kind::Outer;
    if (!e_outer) {
      for (const auto& [t, p] : s.outer.crossings(a, b)) {
        const bool dir = (E.kind() == ContinuumSet::Kind::OuterArc && E.arc_contains_param(p)) ||
                         (F.kind() == ContinuumSet::Kind::OuterArc && F.arc_contains_param(p));
        if (!dir) ev.push_back({t, 2, -1});
      }
    }
    for (size_t i = 0; i < s.discs.size(); ++i) {
      if (!hole[i]) continue;
      const Disc& d = s.discs[i];
      if (point_segment_distance(d.center, a, b) > d.radius) continue;
      for (double t : segment_circle_intersections(a, b, d)) ev.push_back({t, 3, static_cast<int>(i)});
    }
    return ev;
  }

  /// Whether a straight move between two solver nodes stays inside the domain.
  bool clear_segment(int na, int nb) const {
    const double h = grid->h;
    const double reach = 0.5 * std::abs(node_point(na) - node_point(nb)) + 1e-12 * h;
    if (clearance[na] > reach && clearance[nb] > reach) return true;
    return events(node_point(na), node_point(nb)).empty();
  }

 private:
  void check_sets() {
    if (E.kind() == ContinuumSet::Kind::Circle && F.kind() == ContinuumSet::Kind::Circle && E.disc() == F.disc())
      throw precondition_error("E and F must be disjoint");
    const auto es = E.samples(s, 256), fs = F.samples(s, 256);
    double dmin = kInf;
    for (Complex p : es)
      for (Complex q : fs) dmin = std::min(dmin, std::abs(p - q));
    const double eps = 1e-9 * std::max(1.0, s.scale());
    if (dmin <= eps) throw precondition_error("E and F must be disjoint");
    for (Complex p : es)
      if (F.contains(p, s)) throw precondition_error("E and F must be disjoint");
    for (Complex q : fs)
      if (E.contains(q, s)) throw precondition_error("E and F must be disjoint");
    hole.assign(s.discs.size(), 0);
    dirichlet_disc.assign(s.discs.size(), 0);
    for (size_t i = 0; i < s.discs.size(); ++i) {
      const bool dir = (E.kind() == ContinuumSet::Kind::Circle && E.disc() == static_cast<int>(i)) ||
                       (F.kind() == ContinuumSet::Kind::Circle && F.disc() == static_cast<int>(i));
      dirichlet_disc[i] = dir;
      hole[i] = !dir && mode != HoleMode::PassThrough;
    }
  }

  // Region where faces are open: walls are the Neumann parts of the boundary.
  bool face_open(Complex z) const {
    if (!s.outer.contains(z)) {
      if (E.kind() == ContinuumSet::Kind::Outer || F.kind() == ContinuumSet::Kind::Outer) return true;
      const double p = s.outer.param(z);
      return (E.kind() == ContinuumSet::Kind::OuterArc && E.arc_contains_param(p)) ||
             (F.kind() == ContinuumSet::Kind::OuterArc && F.arc_contains_param(p));
    }
    for (size_t i = 0; i < s.discs.size(); ++i)
      if (hole[i] && std::abs(z - s.discs[i].center) < s.discs[i].radius) return false;
    return true;
  }

  // Region that carries density.
  bool mass_open(Complex z) const {
    if (!s.outer.contains(z)) return false;
    for (size_t i = 0; i < s.discs.size(); ++i)
      if ((hole[i] || dirichlet_disc[i]) && std::abs(z - s.discs[i].center) < s.discs[i].radius) return false;
    for (const ContinuumSet* c : {&E, &F}) {
      const auto k = c->kind();
      if ((k == ContinuumSet::Kind::Ball || k == ContinuumSet::Kind::Outside) && c->contains(z, s) &&
          c->boundary_distance(z, s) > 0.0)
        return false;
    }
    return true;
  }

  double point_clearance(Complex z) const {
    double c = std::min({s.outer.distance(z), E.boundary_distance(z, s), F.boundary_distance(z, s)});
    for (const Disc& d : s.discs) c = std::min(c, std::abs(std::abs(z - d.center) - d.radius));
    return c;
  }

  void build_grid(int n) {
    if (n < 8) throw precondition_error("grid resolution too small");
    auto g = std::make_shared<ModulusGrid>();
    const Box b = s.outer.bbox();
    const double span = std::max(b.width(), b.height());
    const double margin = 0.01 * span;
    g->h = (span + 2.0 * margin) / n;
    g->nx = static_cast<int>(std::ceil((b.width() + 2.0 * margin) / g->h - 1e-9));
    g->ny = static_cast<int>(std::ceil((b.height() + 2.0 * margin) / g->h - 1e-9));
    g->x0 = 0.5 * (b.xmin + b.xmax) - 0.5 * g->nx * g->h;
    g->y0 = 0.5 * (b.ymin + b.ymax) - 0.5 * g->ny * g->h;
    grid = g;

    clearance.assign(g->nodes(), 0.0);
    parallel_for(g->ny + 1, [&](size_t j) {
      for (int i = 0; i <= g->nx; ++i)
        clearance[g->node_index(i, static_cast<int>(j))] = point_clearance(g->node(i, static_cast<int>(j)));
    });

    g->label.assign(g->cells(), -1);
    g->area.assign(g->cells(), 0.0);
    const double diag = std::sqrt(2.0) * g->h;
    parallel_for(g->ny, [&](size_t jj) {
      const int j = static_cast<int>(jj);
      for (int i = 0; i < g->nx; ++i) {
        const int c = g->cell_index(i, j);
        const Complex z = g->cell_center(i, j);
        int lab = -1;
        if (s.outer.contains(z)) {
          lab = 0;
          for (size_t k = 0; k < s.discs.size(); ++k)
            if (s.discs[k].contains_closed(z)) lab = static_cast<int>(k) + 1;
        }
        g->label[c] = lab;
        const double far = std::max({clearance[g->node_index(i, j)], clearance[g->node_index(i + 1, j)],
                                     clearance[g->node_index(i, j + 1)], clearance[g->node_index(i + 1, j + 1)]});
        if (far > diag) {
          g->area[c] = mass_open(z) ? 1.0 : 0.0;
        } else {
          int in = 0;
          for (int a = 0; a < 4; ++a)
            for (int bb = 0; bb < 4; ++bb)
              if (mass_open(g->node(i, j) + Complex((a + 0.5) * g->h / 4, (bb + 0.5) * g->h / 4))) ++in;
          g->area[c] = in / 16.0;
        }
      }
    });
  }

  void classify_nodes() {
    const ModulusGrid& g = *grid;
    state.assign(g.nodes(), kOut);
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) {
        const int k = g.node_index(i, j);
        const Complex z = g.node(i, j);
        if (!s.outer.contains(z)) continue;
        const bool in_e = E.contains(z, s), in_f = F.contains(z, s);
        if (in_e && in_f) throw precondition_error("E and F must be disjoint");
        if (in_e) {
          state[k] = kFixedE;
          has_e = true;
          continue;
        }
        if (in_f) {
          state[k] = kFixedF;
          has_f = true;
          continue;
        }
        bool in_hole = false;
        for (size_t d = 0; d < s.discs.size(); ++d)
          if (hole[d] && s.discs[d].contains_closed(z)) in_hole = true;
        if (in_hole) continue;
        state[k] = static_cast<int>(var_node.size());
        var_node.push_back(k);
      }
  }

  double face_fraction(Complex centre, bool horizontal_edge, bool near) const {
    if (!near) return 1.0;
    const Complex dir = horizontal_edge ? Complex(0, 1) : Complex(1, 0);
    int in = 0;
    for (int k = 0; k < 8; ++k)
      if (face_open(centre + dir * (grid->h * (-0.5 + (k + 0.5) / 8.0)))) ++in;
    return in == 0 ? 1.0 / 16.0 : in / 8.0;
  }

  void add_term(int node, const Event& ev, double t, Complex from, Complex to, bool horizontal, int c0, int c1) {
    const int v = state[node];
    if (ev.type == 2) return;
    if (ev.type == 3 && mode != HoleMode::Transboundary) return;
    const double tc = std::max(t, kMinFraction);
    const double w = face_fraction(from + 0.5 * t * (to - from), horizontal, true) / tc;
    if (ev.type == 3) {
      cuts.push_back({v, ev.which, w, t, c0, c1, horizontal});
      return;
    }
    dirs.push_back({v, w, ev.type == 0 ? 0.0 : 1.0, t, from + t * (to - from), c0, c1, horizontal});
    if (ev.type == 0) has_e = true;
    if (ev.type == 1) has_f = true;
  }

  void build_terms() {
    const ModulusGrid& g = *grid;
    auto cell = [&](int i, int j) { return (i < 0 || j < 0 || i >= g.nx || j >= g.ny) ? -1 : g.cell_index(i, j); };
    auto pick = [](const std::vector<Event>& ev, bool first) {
      double tt = first ? kInf : -kInf;
      for (const Event& e : ev) tt = first ? std::min(tt, e.t) : std::max(tt, e.t);
      const Event* best = nullptr;
      for (const Event& e : ev)
        if (std::abs(e.t - tt) <= 1e-12 && (!best || e.type < best->type)) best = &e;
      return *best;
    };
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i)
        for (int dir = 0; dir < 2; ++dir) {
          const int i2 = i + (dir == 0), j2 = j + (dir == 1);
          if (i2 > g.nx || j2 > g.ny) continue;
          const int na = g.node_index(i, j), nb = g.node_index(i2, j2);
          const bool fa = state[na] >= 0, fb = state[nb] >= 0;
          if (!fa && !fb) continue;
          const bool horizontal = dir == 0;
          const int c0 = horizontal ? cell(i, j - 1) : cell(i - 1, j);
          const int c1 = cell(i, j);
          const Complex za = g.node(i, j), zb = g.node(i2, j2);
          const bool near = clearance[na] < g.h || clearance[nb] < g.h;
          std::vector<Event> ev;
          if (near) ev = events(za, zb);
          if (ev.empty()) {
            if (fa && fb) {
              regs.push_back({state[na], state[nb], face_fraction(0.5 * (za + zb), horizontal, near), c0, c1, horizontal});
            } else {
              const int free_node = fa ? na : nb, other = fa ? nb : na;
              if (state[other] == kFixedE || state[other] == kFixedF) {
                const Event e{1.0, state[other] == kFixedE ? 0 : 1, -1};
                add_term(free_node, e, 1.0, fa ? za : zb, fa ? zb : za, horizontal, c0, c1);
              }
            }
            continue;
          }
          if (fa) {
            const Event e = pick(ev, true);
            add_term(na, e, e.t, za, zb, horizontal, c0, c1);
          }
          if (fb) {
            const Event e = pick(ev, false);
            add_term(nb, e, 1.0 - e.t, zb, za, horizontal, c0, c1);
          }
        }
  }

  void find_components() {
    const int m = static_cast<int>(var_node.size());
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const RegTerm& r : regs) parent[find(r.a)] = find(r.b);
    std::vector<char> anchored(m, 0);
    for (const DirTerm& d : dirs) anchored[find(d.a)] = 1;
    for (const CutTerm& c : cuts) anchored[find(c.a)] = 1;
    var_active.assign(m, 0);
    for (int v = 0; v < m; ++v) var_active[v] = anchored[find(v)];
  }
};

// ---------------------------------------------------------------------------
// Potential solver

struct PotentialSolution {
  std::vector<double> u;       // per var (0 for inactive vars)
  std::vector<double> hi, lo;  // per disc (transboundary holes only)
  double energy = 0.0;
  int iterations = 0;
};

double cut_excess(double u, double hi, double lo) {
  if (u > hi) return u - hi;
  if (u < lo) return lo - u;
  return 0.0;
}

double total_energy(const Problem& P, const std::vector<double>& u, const std::vector<double>& hi,
                    const std::vector<double>& lo) {
  double e = 0.0;
  for (const RegTerm& r : P.regs) e += r.w * (u[r.a] - u[r.b]) * (u[r.a] - u[r.b]);
  for (const DirTerm& d : P.dirs) e += d.w * (u[d.a] - d.g) * (u[d.a] - d.g);
  for (const CutTerm& c : P.cuts) {
    const double x = cut_excess(u[c.a], hi[c.hole], lo[c.hole]);
    e += c.w * x * x;
  }
  if (P.mode == HoleMode::Transboundary)
    for (size_t i = 0; i < hi.size(); ++i)
      if (P.hole[i]) e += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return e;
}

PotentialSolution solve_potential(const Problem& P) {
  const int m_all = static_cast<int>(P.var_node.size());
  std::vector<int> sys(m_all, -1);
  int m = 0;
  for (int v = 0; v < m_all; ++v)
    if (P.var_active[v]) sys[v] = m++;
  const int nd = static_cast<int>(P.s.discs.size());
  std::vector<int> hi_idx(nd, -1), lo_idx(nd, -1);
  int nvar = m;
  if (P.mode == HoleMode::Transboundary) {
    std::vector<char> used(nd, 0);
    for (const CutTerm& c : P.cuts)
      if (sys[c.a] >= 0) used[c.hole] = 1;
    for (int i = 0; i < nd; ++i)
      if (used[i]) {
        hi_idx[i] = nvar++;
        lo_idx[i] = nvar++;
      }
  }

  PotentialSolution sol;
  sol.u.assign(m_all, 0.0);
  sol.hi.assign(nd, 0.0);
  sol.lo.assign(nd, 0.0);

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> base;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nvar);
  for (const RegTerm& r : P.regs) {
    const int a = sys[r.a], b = sys[r.b];
    if (a < 0 || b < 0) continue;
    base.emplace_back(a, a, r.w);
    base.emplace_back(b, b, r.w);
    base.emplace_back(a, b, -r.w);
    base.emplace_back(b, a, -r.w);
  }
  for (const DirTerm& d : P.dirs) {
    const int a = sys[d.a];
    if (a < 0) continue;
    base.emplace_back(a, a, d.w);
    rhs[a] += d.w * d.g;
  }
  for (int i = 0; i < nd; ++i) {
    if (hi_idx[i] < 0) continue;
    const double reg = 1e-10;
    base.emplace_back(hi_idx[i], hi_idx[i], 1.0 + reg);
    base.emplace_back(lo_idx[i], lo_idx[i], 1.0 + reg);
    base.emplace_back(hi_idx[i], lo_idx[i], -1.0);
    base.emplace_back(lo_idx[i], hi_idx[i], -1.0);
  }

  auto unpack = [&](const Eigen::VectorXd& x) {
    for (int v = 0; v < m_all; ++v) sol.u[v] = sys[v] >= 0 ? x[sys[v]] : 0.0;
    for (int i = 0; i < nd; ++i)
      if (hi_idx[i] >= 0) {
        sol.hi[i] = x[hi_idx[i]];
        sol.lo[i] = x[lo_idx[i]];
      }
  };

  if (nvar == 0) return sol;

  // Pattern shared by every active set: each cut term couples its node to hi and lo.
  auto assemble = [&](const std::vector<signed char>& act) {
    std::vector<Trip> t = base;
    for (size_t k = 0; k < P.cuts.size(); ++k) {
      const CutTerm& c = P.cuts[k];
      const int a = sys[c.a];
      if (a < 0) continue;
      const double wh = act[k] > 0 ? c.w : 0.0, wl = act[k] < 0 ? c.w : 0.0;
      const int h = hi_idx[c.hole], l = lo_idx[c.hole];
      t.emplace_back(a, a, wh + wl);
      t.emplace_back(h, h, wh);
      t.emplace_back(l, l, wl);
      t.emplace_back(a, h, -wh);
      t.emplace_back(h, a, -wh);
      t.emplace_back(a, l, -wl);
      t.emplace_back(l, a, -wl);
    }
    Eigen::SparseMatrix<double> A(nvar, nvar);
    A.setFromTriplets(t.begin(), t.end());
    return A;
  };

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  std::vector<signed char> act(P.cuts.size(), 0);
  Eigen::SparseMatrix<double> A = assemble(act);
  ldlt.analyzePattern(A);
  ldlt.factorize(A);
  if (ldlt.info() != Eigen::Success) throw internal_error("potential system factorisation failed");
  Eigen::VectorXd x = ldlt.solve(rhs);
  sol.iterations = 1;
  unpack(x);
  if (P.mode != HoleMode::Transboundary || P.cuts.empty()) {
    sol.energy = total_energy(P, sol.u, sol.hi, sol.lo);
    return sol;
  }

  // Semismooth Newton on the piecewise quadratic transboundary energy.
  for (int i = 0; i < nd; ++i) {
    if (hi_idx[i] < 0) continue;
    double mx = -kInf, mn = kInf;
    for (const CutTerm& c : P.cuts)
      if (c.hole == i && sys[c.a] >= 0) {
        mx = std::max(mx, sol.u[c.a]);
        mn = std::min(mn, sol.u[c.a]);
      }
    x[hi_idx[i]] = mx;
    x[lo_idx[i]] = mn;
  }
  unpack(x);
  double f_cur = total_energy(P, sol.u, sol.hi, sol.lo);
  auto active_of = [&](const PotentialSolution& s) {
    std::vector<signed char> a(P.cuts.size(), 0);
    for (size_t k = 0; k < P.cuts.size(); ++k) {
      const CutTerm& c = P.cuts[k];
      if (sys[c.a] < 0) continue;
      if (s.u[c.a] > s.hi[c.hole]) a[k] = 1;
      else if (s.u[c.a] < s.lo[c.hole]) a[k] = -1;
    }
    return a;
  };
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    act = active_of(sol);
    A = assemble(act);
    ldlt.factorize(A);
    if (ldlt.info() != Eigen::Success) throw internal_error("transboundary system factorisation failed");
    const Eigen::VectorXd xn = ldlt.solve(rhs);
    ++sol.iterations;
    PotentialSolution trial = sol;
    unpack(xn);
    std::swap(trial, sol);  // sol holds the old iterate, trial the Newton point
    const double f_new = total_energy(P, trial.u, trial.hi, trial.lo);
    const bool same = active_of(trial) == act;
    if (f_new <= f_cur + 1e-15 * std::max(1.0, f_cur)) {
      const double step = (xn - x).lpNorm<Eigen::Infinity>();
      x = xn;
      sol = trial;
      f_cur = f_new;
      if (same || step < 1e-13) {
        converged = true;
        break;
      }
      continue;
    }
    // Exact line search on the convex piecewise quadratic along the Newton direction.
    const Eigen::VectorXd d = xn - x;
    auto eval = [&](double s) {
      const Eigen::VectorXd y = x + s * d;
      PotentialSolution tmp = sol;
      for (int v = 0; v < m_all; ++v) tmp.u[v] = sys[v] >= 0 ? y[sys[v]] : 0.0;
      for (int i = 0; i < nd; ++i)
        if (hi_idx[i] >= 0) {
          tmp.hi[i] = y[hi_idx[i]];
          tmp.lo[i] = y[lo_idx[i]];
        }
      return std::make_pair(total_energy(P, tmp.u, tmp.hi, tmp.lo), tmp);
    };
    double lo_s = 0.0, hi_s = 1.0;
    for (int k = 0; k < 60; ++k) {
      const double a = lo_s + (hi_s - lo_s) / 3.0, b = hi_s - (hi_s - lo_s) / 3.0;
      if (eval(a).first < eval(b).first) hi_s = b;
      else lo_s = a;
    }
    auto [f_s, tmp] = eval(0.5 * (lo_s + hi_s));
    if (!(f_s < f_cur)) {
      converged = true;  // no further decrease available at working precision
      break;
    }
    x = x + 0.5 * (lo_s + hi_s) * d;
    sol = tmp;
    f_cur = f_s;
  }
  if (!converged) throw Error(ErrorKind::NonConvergence, "transboundary Newton iteration did not settle");
  sol.energy = f_cur;
  return sol;
}

// Cellwise gradient magnitude: mean squared difference quotient over the cell's
// horizontal edges plus the same over its vertical edges.
MassDistribution energy_density(const Problem& P, const PotentialSolution& sol) {
  const ModulusGrid& g = *P.grid;
  std::vector<double> sx(g.cells(), 0.0), sy(g.cells(), 0.0);
  std::vector<int> nx(g.cells(), 0), ny(g.cells(), 0);
  auto add = [&](double q, int c0, int c1, bool horizontal) {
    for (int c : {c0, c1}) {
      if (c < 0) continue;
      (horizontal ? sx : sy)[c] += q * q;
      ++(horizontal ? nx : ny)[c];
    }
  };
  const auto& u = sol.u;
  const double h = g.h;
  for (const RegTerm& r : P.regs) add((u[r.a] - u[r.b]) / h, r.c0, r.c1, r.horizontal);
  for (const DirTerm& d : P.dirs) add((u[d.a] - d.g) / (std::max(d.t, kMinFraction) * h), d.c0, d.c1, d.horizontal);
  for (const CutTerm& c : P.cuts)
    add(cut_excess(u[c.a], sol.hi[c.hole], sol.lo[c.hole]) / (std::max(c.t, kMinFraction) * h), c.c0, c.c1,
        c.horizontal);
  // Cells cut by a wall may lack one orientation; borrow it from neighbouring cells.
  auto mean_of = [&](const std::vector<double>& sum, const std::vector<int>& cnt, int i, int j) {
    const int c = g.cell_index(i, j);
    if (cnt[c]) return sum[c] / cnt[c];
    double acc = 0.0;
    int k = 0;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int i2 = i + di, j2 = j + dj;
        if (i2 < 0 || j2 < 0 || i2 >= g.nx || j2 >= g.ny) continue;
        const int c2 = g.cell_index(i2, j2);
        if (cnt[c2]) {
          acc += sum[c2] / cnt[c2];
          ++k;
        }
      }
    return k ? acc / k : 0.0;
  };
  MassDistribution dist;
  dist.density.assign(g.cells(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      dist.density[g.cell_index(i, j)] = std::sqrt(mean_of(sx, nx, i, j) + mean_of(sy, ny, i, j));
  dist.grid = P.grid;
  dist.holes = P.hole_discs();
  dist.meet_inflation = 0.5 * g.h;
  for (size_t i = 0; i < P.s.discs.size(); ++i)
    if (P.mode == HoleMode::Transboundary && P.hole[i]) dist.weights.push_back(sol.hi[i] - sol.lo[i]);
  return dist;
}

// ---------------------------------------------------------------------------
// Shortest rho-paths

// Search states are (node, hole the last step touched). A hole's weight is paid on entering
// its inflated disc, so a path grazing it over several steps pays once, as in rho_length.
struct PathSearch {
  std::vector<double> dist;
  std::vector<int> pred;        // state, or -2 - dir for sources
  std::vector<int> state_var;   // grid variable of a state, -1 for hubs
  std::vector<int> state_hub;   // hole of a hub state, else -1
  struct Target {
    double total;
    int var;  // state
    int dir;
  };
  std::vector<Target> targets;  // sorted by total
};

PathSearch shortest_paths(const Problem& P, const MassDistribution& dist) {
  const ModulusGrid& g = *P.grid;
  const int m = static_cast<int>(P.var_node.size());
  const auto slot = P.hole_slots();
  const int nh = static_cast<int>(dist.holes.size());
  // Hub adjacency from cut terms.
  std::vector<std::vector<int>> hub_nodes(nh);
  std::vector<std::vector<int>> var_hubs(m);
  for (const CutTerm& c : P.cuts) {
    const int k = slot[c.hole];
    if (k < 0 || !P.var_active[c.a]) continue;
    hub_nodes[k].push_back(c.a);
    var_hubs[c.a].push_back(k);
  }
  for (auto& v : hub_nodes) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& v : var_hubs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  PathSearch ps;
  // State 0..m-1 is (var, untagged); tagged states follow, then one state per hub.
  std::vector<std::vector<std::pair<int, int>>> tagged(m);  // (hole, state)
  ps.state_var.resize(m);
  ps.state_hub.assign(m, -1);
  for (int u = 0; u < m; ++u) ps.state_var[u] = u;
  const double reach_pad = dist.meet_inflation + 3.0 * g.h;
  for (int k = 0; k < nh; ++k) {
    const Disc& d = dist.holes[k];
    for (int u = 0; u < m; ++u) {
      if (!P.var_active[u]) continue;
      if (std::abs(P.node_point(P.var_node[u]) - d.center) > d.radius + reach_pad) continue;
      tagged[u].push_back({k, static_cast<int>(ps.state_var.size())});
      ps.state_var.push_back(u);
      ps.state_hub.push_back(-1);
    }
  }
  const int hub0 = static_cast<int>(ps.state_var.size());
  for (int k = 0; k < nh; ++k) {
    ps.state_var.push_back(-1);
    ps.state_hub.push_back(k);
  }
  const int ns = static_cast<int>(ps.state_var.size());
  auto state_of = [&](int u, int tag) {
    if (tag < 0) return u;
    for (const auto& [k, st] : tagged[u])
      if (k == tag) return st;
    throw internal_error("missing tagged search state");
  };
  auto tag_of = [&](int st) {
    if (st < m || st >= hub0) return st >= hub0 ? st - hub0 : -1;
    for (const auto& [k, x] : tagged[ps.state_var[st]])
      if (x == st) return k;
    return -1;
  };

  ps.dist.assign(ns, kInf);
  ps.pred.assign(ns, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (size_t k = 0; k < P.dirs.size(); ++k) {
    const DirTerm& d = P.dirs[k];
    if (d.g != 0.0 || !P.var_active[d.a]) continue;
    const double c = segment_integral(dist, d.p, P.node_point(P.var_node[d.a]));
    if (c < ps.dist[d.a]) {
      ps.dist[d.a] = c;
      ps.pred[d.a] = -2 - static_cast<int>(k);
    }
  }
  for (int v = 0; v < m; ++v)
    if (ps.dist[v] < kInf) pq.push({ps.dist[v], v});
  const int w = g.nx + 1;
  std::vector<int> met;
  while (!pq.empty()) {
    const auto [du, su] = pq.top();
    pq.pop();
    if (du > ps.dist[su]) continue;
    auto relax = [&](int sv, double cost) {
      const double nd = du + cost;
      if (nd < ps.dist[sv]) {
        ps.dist[sv] = nd;
        ps.pred[sv] = su;
        pq.push({nd, sv});
      }
    };
    const int t = tag_of(su);
    // Hub passages are traced through the disc centre, so they also pay the density on the chord.
    if (su >= hub0) {
      const Complex c = dist.holes[t].center;
      for (int v : hub_nodes[t]) relax(state_of(v, t), segment_integral(dist, c, P.node_point(P.var_node[v])));
      continue;
    }
    const int u = ps.state_var[su];
    const int node = P.var_node[u];
    const int i = node % w, j = node / w;
    const Complex zu = g.node(i, j);
    for (const auto& off : kOffsets16) {
      const int i2 = i + off[0], j2 = j + off[1];
      if (i2 < 0 || j2 < 0 || i2 > g.nx || j2 > g.ny) continue;
      const int node2 = g.node_index(i2, j2);
      const int v = P.state[node2];
      if (v < 0 || !P.var_active[v]) continue;
      if (!P.clear_segment(node, node2)) continue;
      const Complex zv = g.node(i2, j2);
      double cost = segment_integral(dist, zu, zv);
      met.clear();
      const double reach = 0.5 * std::abs(zv - zu) + dist.meet_inflation;
      if (nh > 0 && (P.clearance[node] <= reach || P.clearance[node2] <= reach))
        for (int k = 0; k < nh; ++k)
          if (point_segment_distance(dist.holes[k].center, zu, zv) <= dist.holes[k].radius + dist.meet_inflation)
            met.push_back(k);
      int next = -1;
      for (int k : met) {
        if (k != t) cost += dist.weights[k];
        if (next < 0 || k == t) next = k;
      }
      relax(state_of(v, next), cost);
    }
    for (int k : var_hubs[u])
      relax(hub0 + k, (k == t ? 0.0 : dist.weights[k]) + segment_integral(dist, zu, dist.holes[k].center));
  }
  for (size_t k = 0; k < P.dirs.size(); ++k) {
    const DirTerm& d = P.dirs[k];
    if (d.g != 1.0 || !P.var_active[d.a]) continue;
    double best = ps.dist[d.a];
    int st = d.a;
    for (const auto& [h, x] : tagged[d.a])
      if (ps.dist[x] < best) {
        best = ps.dist[x];
        st = x;
      }
    if (!(best < kInf)) continue;
    const double total = best + segment_integral(dist, P.node_point(P.var_node[d.a]), d.p);
    ps.targets.push_back({total, st, static_cast<int>(k)});
  }
  std::sort(ps.targets.begin(), ps.targets.end(), [](const auto& a, const auto& b) {
    return a.total != b.total ? a.total < b.total : a.dir < b.dir;
  });
  return ps;
}

Polyline trace_path(const Problem& P, const PathSearch& ps, const PathSearch::Target& t,
                    const std::vector<Disc>& holes) {
  std::vector<Complex> pts{P.dirs[t.dir].p};
  int v = t.var;
  int guard = 0;
  while (true) {
    if (++guard > static_cast<int>(ps.pred.size()) + 2) throw internal_error("cycle in shortest-path tree");
    const int hub = ps.state_hub[v];
    pts.push_back(hub >= 0 ? holes[hub].center : P.node_point(P.var_node[ps.state_var[v]]));
    const int p = ps.pred[v];
    if (p <= -2) {
      pts.push_back(P.dirs[-2 - p].p);
      break;
    }
    if (p < 0) throw internal_error("broken shortest-path tree");
    v = p;
  }
  std::reverse(pts.begin(), pts.end());
  std::vector<Complex> clean;
  for (Complex z : pts)
    if (clean.empty() || clean.back() != z) clean.push_back(z);
  if (clean.size() == 1) clean.push_back(clean.front());
  return Polyline(clean, false);
}

CurveFamily extract_family(const Problem& P, const PathSearch& ps, const std::vector<Disc>& holes, int max_paths,
                           double max_total = kInf) {
  CurveFamily fam;
  std::vector<Complex> ends;
  const double spacing = 2.0 * P.grid->h;
  for (const auto& t : ps.targets) {
    if (static_cast<int>(fam.curves.size()) >= max_paths || t.total > max_total) break;
    const Complex q = P.dirs[t.dir].p;
    bool far = true;
    for (Complex e : ends)
      if (std::abs(e - q) < spacing) far = false;
    if (!far) continue;
    ends.push_back(q);
    fam.curves.push_back(trace_path(P, ps, t, holes));
  }
  return fam;
}

std::string mode_tag(HoleMode m) {
  switch (m) {
    case HoleMode::PassThrough: return "pass-through";
    case HoleMode::Obstacle: return "obstacle";
    case HoleMode::Transboundary: return "transboundary";
  }
  return "";
}

ModulusResult certify(const Problem& P, MassDistribution dist, double value, int iterations, const char* method) {
  ModulusResult res;
  res.value = value;
  res.iterations = iterations;
  res.method = method;
  const PathSearch ps = shortest_paths(P, dist);
  res.family = extract_family(P, ps, dist.holes, 48);
  res.family.tag = P.E.spec() + " -> " + P.F.spec() + " (" + mode_tag(P.mode) + ")";
  if (res.family.curves.empty()) {
    res.empty_family = true;
    res.value = 0.0;
    res.distribution = dist.scaled(0.0);
    return res;
  }
  res.raw_slack = admissibility_check(dist, res.family);
  const double f = res.raw_slack > -1.0 ? 1.0 / (1.0 + res.raw_slack) : 0.0;
  res.distribution = dist.scaled(f);
  res.admissibility_slack = admissibility_check(res.distribution, res.family);
  res.upper_bound = res.distribution.mass();
  return res;
}

ModulusResult potential_modulus(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f, int n,
                                HoleMode mode) {
  if (n < 64) throw precondition_error("grid resolution must be at least 64");
  Problem P(s, e, f, n, mode);
  const PotentialSolution sol = solve_potential(P);
  MassDistribution dist = energy_density(P, sol);
  return certify(P, std::move(dist), sol.energy, sol.iterations, "potential");
}

}  // namespace

ModulusResult conformal_modulus(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f,
                                int grid_n, HoleMode mode) {
  return potential_modulus(s, e, f, grid_n, mode);
}

ModulusResult transboundary_modulus(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f,
                                    int grid_n) {
  return potential_modulus(s, e, f, grid_n, HoleMode::Transboundary);
}

// ---------------------------------------------------------------------------
// Cutting-plane route

ModulusResult cutting_plane_modulus(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f,
                                    int grid_n, HoleMode mode, const CuttingPlaneOptions& opt) {
  Problem P(s, e, f, grid_n, mode);
  const ModulusGrid& g = *P.grid;
  const std::vector<Disc> holes = P.hole_discs();
  const int nh = static_cast<int>(holes.size());

  std::vector<int> col_of_cell(g.cells(), -1);
  std::vector<double> wcol;
  std::vector<int> cell_of_col;
  for (int c = 0; c < g.cells(); ++c)
    if (g.area[c] > 0.0) {
      col_of_cell[c] = static_cast<int>(wcol.size());
      cell_of_col.push_back(c);
      wcol.push_back(g.area[c] * g.h * g.h);
    }
  const int ncell_cols = static_cast<int>(wcol.size());
  for (int k = 0; k < nh; ++k) wcol.push_back(1.0);
  const int ncols = static_cast<int>(wcol.size());

  MassDistribution cur;
  cur.grid = P.grid;
  cur.holes = holes;
  cur.meet_inflation = 0.5 * g.h;
  cur.density.assign(g.cells(), 0.0);
  for (int c = 0; c < g.cells(); ++c)
    if (g.area[c] > 0.0) cur.density[c] = 1.0;
  cur.weights.assign(nh, 1.0);

  using Row = std::vector<std::pair<int, double>>;
  std::vector<Row> rows;
  CurveFamily family;
  auto make_row = [&](const Polyline& curve) {
    Row acc;
    for (size_t k = 0; k < curve.segment_count(); ++k)
      walk_cells(g, curve.segment_start(k), curve.segment_end(k), [&](double len, int c, int other) {
        int pickc = c;
        if (other != -2) {
          const double a = c < 0 ? 0.0 : cur.density[c], b = other < 0 ? 0.0 : cur.density[other];
          pickc = (b < a) ? other : c;
        }
        if (pickc >= 0 && col_of_cell[pickc] >= 0) acc.emplace_back(col_of_cell[pickc], len);
      });
    for (int k = 0; k < nh; ++k)
      if (curve_meets(curve, holes[k], cur.meet_inflation)) acc.emplace_back(ncell_cols + k, 1.0);
    std::sort(acc.begin(), acc.end());
    Row r;
    for (const auto& [c, a] : acc) {
      if (!r.empty() && r.back().first == c) r.back().second += a;
      else r.emplace_back(c, a);
    }
    return r;
  };

  std::vector<double> lambda;
  std::vector<double> rho(ncols, 0.0);
  auto rho_of = [&](const std::vector<double>& lam, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (size_t k = 0; k < rows.size(); ++k)
      if (lam[k] != 0.0)
        for (const auto& [c, a] : rows[k]) out[c] += lam[k] * a;
    for (int c = 0; c < ncols; ++c) out[c] /= 2.0 * wcol[c];
  };
  auto lengths = [&](const std::vector<double>& r) {
    std::vector<double> l(rows.size(), 0.0);
    for (size_t k = 0; k < rows.size(); ++k)
      for (const auto& [c, a] : rows[k]) l[k] += a * r[c];
    return l;
  };
  auto mass_of = [&](const std::vector<double>& r) {
    double m = 0.0;
    for (int c = 0; c < ncols; ++c) m += wcol[c] * r[c] * r[c];
    return m;
  };
  auto publish = [&](const std::vector<double>& r, double scale) {
    for (int c = 0; c < ncell_cols; ++c) cur.density[cell_of_col[c]] = r[c] * scale;
    for (int k = 0; k < nh; ++k) cur.weights[k] = r[ncell_cols + k] * scale;
  };

  ModulusResult res;
  res.method = "cutting-plane";
  int total_iterations = 0;
  double dual = 0.0;
  for (int round = 0; round < opt.max_rounds; ++round) {
    const PathSearch ps = shortest_paths(P, cur);
    if (ps.targets.empty()) break;
    const double limit = round == 0 ? kInf : 1.0 - opt.feasibility_tol;
    CurveFamily fresh = extract_family(P, ps, holes, opt.paths_per_round, limit);
    if (fresh.curves.empty()) break;
    for (auto& c : fresh.curves) {
      rows.push_back(make_row(c));
      family.curves.push_back(std::move(c));
      lambda.push_back(0.0);
    }

    // Step size from the largest eigenvalue of A W^-1 A^T / 2 by power iteration.
    std::vector<double> v(rows.size(), 1.0), tmp(ncols);
    double lmax = 1.0;
    for (int it = 0; it < 40; ++it) {
      rho_of(v, tmp);
      const auto l = lengths(tmp);
      double nrm = 0.0;
      for (double x : l) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) break;
      double vn = 0.0;
      for (double x : v) vn += x * x;
      lmax = nrm / std::sqrt(vn);
      for (size_t k = 0; k < v.size(); ++k) v[k] = l[k] / nrm;
    }
    const double step = 1.0 / (1.05 * lmax);

    std::vector<double> y = lambda, prev = lambda, r(ncols);
    double tk = 1.0;
    std::vector<double> history;
    for (int it = 0; it < opt.max_inner_iterations; ++it) {
      rho_of(y, r);
      const auto l = lengths(r);
      std::vector<double> next(rows.size());
      for (size_t k = 0; k < rows.size(); ++k) next[k] = std::max(0.0, y[k] + step * (1.0 - l[k]));
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      double restart = 0.0;
      for (size_t k = 0; k < rows.size(); ++k) restart += (y[k] - next[k]) * (next[k] - lambda[k]);
      prev = lambda;
      lambda = next;
      if (restart > 0.0) {
        tk = 1.0;
        y = lambda;
      } else {
        for (size_t k = 0; k < rows.size(); ++k) y[k] = lambda[k] + ((tk - 1.0) / tn) * (lambda[k] - prev[k]);
        tk = tn;
      }
      ++total_iterations;
      rho_of(lambda, r);
      history.push_back(mass_of(r));
      if (history.size() > 50) {
        const double a = history[history.size() - 51], b = history.back();
        if (std::abs(b - a) <= opt.relative_tol * std::max(b, 1e-300)) break;
      }
    }
    rho_of(lambda, rho);
    dual = std::accumulate(lambda.begin(), lambda.end(), 0.0) - mass_of(rho);
    const auto l = lengths(rho);
    const double lmin = l.empty() ? 0.0 : *std::min_element(l.begin(), l.end());
    publish(rho, lmin > 0.0 ? 1.0 / lmin : 0.0);
  }
  res.iterations = total_iterations;
  res.lower_bound = std::max(0.0, dual);
  family.tag = e.spec() + " -> " + f.spec() + " (" + mode_tag(mode) + ", cutting plane)";
  // Final certificate: the family plus the shortest grid paths under the last density.
  const PathSearch ps = shortest_paths(P, cur);
  CurveFamily probe = extract_family(P, ps, holes, 48);
  for (auto& c : probe.curves) family.curves.push_back(std::move(c));
  if (family.curves.empty()) {
    res.empty_family = true;
    res.distribution = cur.scaled(0.0);
    return res;
  }
  res.family = std::move(family);
  res.raw_slack = admissibility_check(cur, res.family);
  res.distribution = cur.scaled(res.raw_slack > -1.0 ? 1.0 / (1.0 + res.raw_slack) : 0.0);
  res.admissibility_slack = admissibility_check(res.distribution, res.family);
  res.upper_bound = res.distribution.mass();
  res.value = res.upper_bound;
  return res;
}

// ---------------------------------------------------------------------------
// Inequality checkers and probes

double lens_area(const Disc& a, const Disc& b) {
  const double d = std::abs(a.center - b.center);
  const double r1 = a.radius, r2 = b.radius;
  if (d >= r1 + r2) return 0.0;
  if (d <= std::abs(r1 - r2)) return kPi * std::min(r1, r2) * std::min(r1, r2);
  const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
  const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
  const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(0.0, k));
}

DiscSumReport check_disc_sum_inequality(const std::vector<Disc>& discs, const std::vector<double>& a,
                                        double lambda) {
  if (discs.size() != a.size()) throw precondition_error("one coefficient per disc required");
  if (!(lambda >= 1.0)) throw precondition_error("lambda must be at least 1");
  for (double x : a)
    if (!(x >= 0.0) || !std::isfinite(x)) throw precondition_error("coefficients must be non-negative");
  for (size_t i = 0; i < discs.size(); ++i)
    for (size_t j = i + 1; j < discs.size(); ++j)
      if (std::abs(discs[i].center - discs[j].center) < discs[i].radius + discs[j].radius)
        throw precondition_error("discs overlap");
  DiscSumReport rep;
  for (size_t i = 0; i < discs.size(); ++i) {
    const double area = kPi * discs[i].radius * discs[i].radius;
    rep.rhs += a[i] * a[i] * area;
    rep.lhs += a[i] * a[i] * lambda * lambda * area;
  }
  for (size_t i = 0; i < discs.size(); ++i)
    for (size_t j = i + 1; j < discs.size(); ++j) {
      const Disc di(discs[i].center, lambda * discs[i].radius), dj(discs[j].center, lambda * discs[j].radius);
      rep.lhs += 2.0 * a[i] * a[j] * lens_area(di, dj);
    }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  if (lambda == 1.0 && rep.ratio > 1.0 + 1e-6) throw internal_error("disc sum ratio exceeds 1 at lambda = 1");
  return rep;
}

BigDiscs count_big_discs(const Polyline& k, const std::vector<Disc>& discs) {
  for (size_t i = 0; i < discs.size(); ++i)
    for (size_t j = i + 1; j < discs.size(); ++j)
      if (std::abs(discs[i].center - discs[j].center) < discs[i].radius + discs[j].radius)
        throw precondition_error("discs overlap");
  const double dk = k.diameter();
  if (!(dk > 0.0)) throw precondition_error("continuum must have positive diameter");
  BigDiscs out;
  for (size_t i = 0; i < discs.size(); ++i) {
    const Disc& d = discs[i];
    bool meets = false;
    if (k.size() == 1) meets = std::abs(k.front() - d.center) <= d.radius;
    for (size_t s = 0; s < k.segment_count() && !meets; ++s)
      meets = point_segment_distance(d.center, k.segment_start(s), k.segment_end(s)) <= d.radius;
    if (meets && 2.0 * (2.0 * d.radius) >= dk) out.indices.push_back(static_cast<int>(i));
  }
  out.count = static_cast<int>(out.indices.size());
  return out;
}

LoewnerEstimate loewner_estimate(const RelativeSchottkySet& s, double delta, int trials, uint64_t seed, int grid_n) {
  const double diam = s.outer.diameter();
  if (!(delta > 0.0)) throw precondition_error("delta must be positive");
  if (delta > diam) throw precondition_error("delta exceeds diam(Omega)");
  if (trials < 1) throw precondition_error("at least one trial required");
  struct Pair {
    bool ok = false;
    Complex a, b, c, d;
    double size = 0.0;
  };
  const Box box = s.outer.bbox();
  const double gap = 4.0 * diam / grid_n;
  auto inside = [&](Complex p, Complex q) {
    for (int k = 0; k <= 32; ++k)
      if (!s.outer.contains(p + (q - p) * (k / 32.0))) return false;
    return true;
  };
  // The candidate pool depends only on the seed, so runs with larger delta use a subset.
  std::vector<Pair> pool(trials);
  for (int k = 0; k < trials; ++k) {
    Rng rng(seed, "loewner-pairs", static_cast<uint64_t>(k));
    auto point = [&] {
      for (int tries = 0; tries < 1000; ++tries) {
        const Complex z(rng.uniform(box.xmin, box.xmax), rng.uniform(box.ymin, box.ymax));
        if (s.outer.contains(z)) return z;
      }
      throw internal_error("could not sample a point of Omega");
    };
    for (int attempt = 0; attempt < 200 && !pool[k].ok; ++attempt) {
      const Complex a = point(), b = point(), c = point(), d = point();
      if (!inside(a, b) || !inside(c, d)) continue;
      if (segment_segment_distance(a, b, c, d) < gap) continue;
      const double size = std::min(std::abs(b - a), std::abs(d - c));
      if (size < gap) continue;
      pool[k] = {true, a, b, c, d, size};
    }
  }
  LoewnerEstimate est;
  est.m_hat = kInf;
  std::vector<int> used;
  for (int k = 0; k < trials; ++k)
    if (pool[k].ok) {
      ++est.candidates;
      if (pool[k].size >= delta) used.push_back(k);
    }
  // Each segment is cut to length delta from its endpoint farther from the other segment.
  // For a larger delta the cut pieces contain the smaller ones, so by monotonicity of the
  // modulus the estimate cannot decrease as delta grows.
  auto shrink = [&](Complex a, Complex b, Complex c, Complex d) {
    const bool from_a = point_segment_distance(a, c, d) >= point_segment_distance(b, c, d);
    const Complex p = from_a ? a : b, q = from_a ? b : a;
    return ContinuumSet::segment(p, p + (q - p) * (delta / std::abs(q - p)));
  };
  std::vector<double> values(used.size(), kInf);
  parallel_for(used.size(), [&](size_t i) {
    const Pair& p = pool[used[i]];
    values[i] = conformal_modulus(s, shrink(p.a, p.b, p.c, p.d), shrink(p.c, p.d, p.a, p.b), grid_n,
                                  HoleMode::PassThrough)
                    .value;
  });
  est.pairs_used = static_cast<int>(used.size());
  for (double v : values) est.m_hat = std::min(est.m_hat, v);
  return est;
}

ModcompReport modcomp_probe(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f, int grid_n) {
  if (grid_n < 64) throw precondition_error("grid resolution must be at least 64");
  ModcompReport rep;
  Problem pt(s, e, f, grid_n, HoleMode::Transboundary);
  const PotentialSolution st = solve_potential(pt);
  const MassDistribution dt = energy_density(pt, st);
  const ModulusResult rt = certify(pt, dt, st.energy, st.iterations, "potential");
  const ModulusResult rp = conformal_modulus(s, e, f, grid_n, HoleMode::PassThrough);
  rep.mod_a = rt.value;
  rep.mod = rp.value;
  rep.ratio = rp.value > 0.0 ? rt.value / rp.value : 0.0;
  // Share of the weights on the shortest certificate curve that meets a disc.
  double shortest = kInf;
  for (const Polyline& c : rt.family.curves) {
    double wpart = 0.0;
    bool meets = false;
    for (size_t i = 0; i < dt.holes.size(); ++i)
      if (curve_meets(c, dt.holes[i], dt.meet_inflation)) {
        meets = true;
        wpart += dt.weights[i];
      }
    const double total = rho_length(dt, c);
    if (meets && total < shortest && total > 0.0) {
      shortest = total;
      rep.weight_share = wpart / total;
    }
  }

  // Lifted density 2 (rho + sum rho_i / r_i chi_{2 B_i}) on the pass-through grid.
  Problem pp(s, e, f, grid_n, HoleMode::PassThrough);
  const ModulusGrid& g = *pp.grid;
  const ModulusGrid& gt = *pt.grid;
  if (g.nx != gt.nx || g.ny != gt.ny) throw internal_error("grids differ between hole modes");
  std::vector<double> coef;
  for (size_t i = 0; i < dt.holes.size(); ++i) coef.push_back(dt.weights[i] / dt.holes[i].radius);
  MassDistribution lifted;
  lifted.grid = pp.grid;
  lifted.meet_inflation = 0.5 * g.h;
  lifted.density.assign(g.cells(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.cell_index(i, j);
      const Complex z = g.cell_center(i, j);
      double v = dt.density[c];
      for (size_t k = 0; k < dt.holes.size(); ++k)
        if (std::abs(z - dt.holes[k].center) < 2.0 * dt.holes[k].radius) v += coef[k];
      lifted.density[c] = 2.0 * v;
    }
  rep.lifted_mass = lifted.mass();
  rep.disc_sum_constant = dt.holes.empty() ? 0.0 : check_disc_sum_inequality(dt.holes, coef, 2.0).ratio;
  rep.lifted_bound = 8.0 * std::max(1.0, rep.disc_sum_constant * kPi) * dt.mass();
  const PathSearch ps = shortest_paths(pp, lifted);
  rep.lifted_slack = ps.targets.empty() ? kInf : ps.targets.front().total - 1.0;
  return rep;
}

ModulusResult annulus_profile(const RelativeSchottkySet& s, Complex z0, double c, double t, int grid_n) {
  const double tol = 1e-6 * std::max(1.0, s.scale());
  if (s.outer.distance(z0) > tol) throw precondition_error("z0 must lie on the outer boundary");
  if (!(t > 1.0)) throw precondition_error("t must exceed 1");
  if (!(c > 0.0) || !(c < s.outer.diameter())) throw precondition_error("c must lie in (0, diam(Omega))");
  return transboundary_modulus(s, ContinuumSet::ball(z0, c / t), ContinuumSet::outside(z0, c), grid_n);
}

}  // namespace sforge
