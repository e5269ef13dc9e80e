#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "schottky.hpp"

namespace sforge {

/// A set that curves of a family must connect: a boundary piece or an interior continuum.
class ContinuumSet {
 public:
  enum class Kind { Outer, OuterArc, Circle, Ball, Outside, Segment };

  static ContinuumSet outer();
  /// Arc of the outer boundary running counterclockwise from `from` to `to`.
  static ContinuumSet outer_arc(const RelativeSchottkySet& s, Complex from, Complex to);
  static ContinuumSet circle(int disc);
  static ContinuumSet ball(Complex c, double r);
  /// Complement of the open ball B(c, r).
  static ContinuumSet outside(Complex c, double r);
  static ContinuumSet segment(Complex a, Complex b);
  /// Accepts outer, arc:i-j, arcp:x0,y0,x1,y1, circle:k, ball:x,y,r, outside:x,y,r, segment:x0,y0,x1,y1.
  static ContinuumSet parse(const std::string& spec, const RelativeSchottkySet& s);

  Kind kind() const { return kind_; }
  const std::string& spec() const { return spec_; }
  int disc() const { return disc_; }

  /// Closed-set membership in the plane (boundary pieces contain only their own points).
  bool contains(Complex z, const RelativeSchottkySet& s) const;
  /// Parameters in [0,1] where the segment [a,b] meets the boundary of the set.
  std::vector<double> hits(Complex a, Complex b, const RelativeSchottkySet& s) const;
  /// Lower bound on the distance from z to the boundary of the set.
  double boundary_distance(Complex z, const RelativeSchottkySet& s) const;
  /// Sample points of the set's boundary.
  std::vector<Complex> samples(const RelativeSchottkySet& s, int n) const;
  bool arc_contains_param(double t) const;

 private:
  Kind kind_ = Kind::Outer;
  std::string spec_ = "outer";
  Complex c_{}, a_{}, b_{};
  double r_ = 0.0, t0_ = 0.0, t1_ = 0.0;
  int disc_ = -1;
};

/// Regular grid over the bounding box of Omega. Nodes sit at cell corners.
struct ModulusGrid {
  double x0 = 0.0, y0 = 0.0, h = 1.0;
  int nx = 0, ny = 0;        // cells per axis; nodes are (nx+1) x (ny+1)
  std::vector<int> label;    // per cell: -1 outside Omega, 0 inside A, i+1 inside disc i
  std::vector<double> area;  // per cell: fraction inside the region that carries density

  Complex node(int i, int j) const { return Complex(x0 + i * h, y0 + j * h); }
  Complex cell_center(int i, int j) const { return Complex(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h); }
  int cells() const { return nx * ny; }
  int nodes() const { return (nx + 1) * (ny + 1); }
  int cell_index(int i, int j) const { return j * nx + i; }
  int node_index(int i, int j) const { return j * (nx + 1) + i; }
};

/// Cellwise constant density plus one weight per disc.
struct MassDistribution {
  std::shared_ptr<const ModulusGrid> grid;
  std::vector<double> density;  // per cell
  std::vector<Disc> holes;      // components that carry weights
  std::vector<double> weights;  // per hole
  double meet_inflation = 0.0;  // a curve meets hole i if it enters the closed disc inflated by this

  double mass() const;
  double density_at(Complex z) const;
  MassDistribution scaled(double f) const;
};

struct CurveFamily {
  std::vector<Polyline> curves;
  std::string tag;
};

/// rho-length of a curve: integral of the density plus the weights of every hole it meets.
double rho_length(const MassDistribution& dist, const Polyline& curve);
/// Minimum over the family of rho-length minus one (+inf for an empty family).
double admissibility_check(const MassDistribution& dist, const CurveFamily& family);

/// How discs act on the curve family.
enum class HoleMode {
  PassThrough,   // curves cross discs freely; density lives on all of Omega
  Obstacle,      // curves avoid discs
  Transboundary  // curves cross discs and pay the disc weight
};

struct ModulusResult {
  double value = 0.0;             // discrete minimum of the mass
  MassDistribution distribution;  // certificate, rescaled to be admissible on `family`
  double admissibility_slack = 0.0;
  double raw_slack = 0.0;    // slack of the minimizer before rescaling
  double upper_bound = 0.0;  // mass of `distribution`
  double lower_bound = 0.0;  // dual bound when the method provides one, else 0
  bool empty_family = false;
  CurveFamily family;
  int iterations = 0;
  std::string method;
};

/// Conformal modulus of the curves joining E to F; by default curves may cross discs.
ModulusResult conformal_modulus(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f,
                                int grid_n, HoleMode mode = HoleMode::PassThrough);

/// Transboundary modulus of the curves in Omega joining E to F.
ModulusResult transboundary_modulus(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f,
                                    int grid_n);

struct CuttingPlaneOptions {
  int max_rounds = 200;
  int paths_per_round = 24;
  int max_inner_iterations = 20000;
  double relative_tol = 1e-6;  // relative mass change over a 50-iteration window
  double feasibility_tol = 1e-3;
};

/// Same problem solved over sampled grid-path families by projected dual gradient,
/// enriching the family with shortest paths under the current minimizer.
ModulusResult cutting_plane_modulus(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f,
                                    int grid_n, HoleMode mode, const CuttingPlaneOptions& opt = {});

struct DiscSumReport {
  double lhs = 0.0;  // integral of (sum a_i chi_{lambda B_i})^2
  double rhs = 0.0;  // sum a_i^2 |B_i|
  double ratio = 0.0;
};

DiscSumReport check_disc_sum_inequality(const std::vector<Disc>& discs, const std::vector<double>& a,
                                        double lambda);

/// Area of the intersection of two discs.
double lens_area(const Disc& a, const Disc& b);

struct BigDiscs {
  int count = 0;
  std::vector<int> indices;
};

BigDiscs count_big_discs(const Polyline& k, const std::vector<Disc>& discs);

struct LoewnerEstimate {
  double m_hat = 0.0;  // +inf when no candidate pair qualifies
  int pairs_used = 0;
  int candidates = 0;
};

/// Minimum modulus over a seeded pool of segment pairs, each segment cut to diameter delta.
LoewnerEstimate loewner_estimate(const RelativeSchottkySet& s, double delta, int trials, uint64_t seed,
                                 int grid_n = 64);

struct ModcompReport {
  double mod_a = 0.0;  // transboundary
  double mod = 0.0;    // pass-through conformal
  double ratio = 0.0;
  double weight_share = 0.0;  // weight share on the shortest certificate curve meeting a disc
  double disc_sum_constant = 0.0;
  double lifted_mass = 0.0;
  double lifted_bound = 0.0;  // 8 max(1, C' pi) mod_a
  double lifted_slack = 0.0;  // admissibility of the lifted density for the pass-through family
};

ModcompReport modcomp_probe(const RelativeSchottkySet& s, const ContinuumSet& e, const ContinuumSet& f, int grid_n);

/// Transboundary modulus of the curves crossing the annulus c/t < |z - z0| < c.
ModulusResult annulus_profile(const RelativeSchottkySet& s, Complex z0, double c, double t, int grid_n);

}  // namespace sforge
