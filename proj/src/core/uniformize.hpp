#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "schottky.hpp"

namespace sforge {

/// Geodesic zipper: maps the region bounded by a closed sample curve onto a half plane.
/// Interior and exterior land on opposite half planes.
class ZipperMap {
 public:
  /// Samples in boundary order; consecutive samples must be distinct.
  static ZipperMap build(const std::vector<Complex>& pts);

  Complex apply(Complex z) const;
  Complex derivative(Complex z) const;
  /// Inverse from the closed upper or lower half plane.
  Complex inverse(Complex w) const;
  size_t size() const { return geo_.size() + 2; }
  /// Interior-side images of the build samples on the real line; the first sample goes to infinity.
  const std::vector<Complex>& sample_images() const { return samples_; }

 private:
  Complex z0_, z1_;
  std::vector<std::pair<double, double>> geo_;  // (Re a / |a|^2, |a|^2 / Im a) per zipped point
  double zeta0_inv_ = 0.0;                      // 1 / image of the first sample
  double sigma_ = -1.0;                         // side of the real line holding the interior
  std::vector<Complex> samples_;
};

/// phi(z) = c + (z - c) exp(sum_{k>=1} b_k ((z - c)/r)^-k): exterior of a near-circle onto the
/// exterior of the circle |w - c| = rho, with phi(z) = z + O(1) at infinity.
struct ExteriorSeriesMap {
  Complex c;
  double r = 1.0;
  double rho = 1.0;
  std::vector<Complex> b;  // b[0] is the coefficient of ((z - c)/r)^-1

  Complex apply(Complex z) const;
  Complex derivative(Complex z) const;
  Complex inverse(Complex w) const;
};

/// phi(z) = z exp(sum_{k>=0} a_k z^k) with a_0 real: interior of a near-unit-circle onto the unit disc.
struct InteriorSeriesMap {
  std::vector<Complex> a;

  Complex apply(Complex z) const;
  Complex derivative(Complex z) const;
  Complex inverse(Complex w) const;
};

using MapStep = std::variant<MobiusMap, ZipperMap, ExteriorSeriesMap, InteriorSeriesMap>;

/// Sampled boundary map of one component: source parameter to image angle.
struct BoundaryCorrespondence {
  int component = -1;          // -1 for the outer boundary, else the disc index
  std::vector<double> source;  // outer: boundary parameter in [0,1); disc: angle in [0, 2 pi)
  std::vector<double> image;   // unwrapped angle about the image circle's centre
};

/// Composition chain of elementary conformal maps, applied first to last.
class DiscreteConformalMap {
 public:
  RelativeSchottkySet source;
  RelativeSchottkySet target;
  std::vector<BoundaryCorrespondence> correspondences;
  double residual = 0.0;

  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;
  Complex inverse(Complex w) const;

  void push(MapStep s) { steps_.push_back(std::move(s)); }
  const std::vector<MapStep>& steps() const { return steps_; }
  /// Number of elementary maps in the chain.
  size_t elementary_count() const;

 private:
  std::vector<MapStep> steps_;
};

struct RiemannOptions {
  int polygon_samples = 2048;
  int circle_samples = 512;
};

/// Conformal map of the Jordan domain onto the unit disc sending p1, p2, p3 to 1, i, -1.
DiscreteConformalMap riemann_map(const JordanBoundary& domain, Complex p1, Complex p2, Complex p3,
                                 const RiemannOptions& opt = {});

/// Largest deviation of | map(b) | from 1 over n boundary points equally spaced in arc length.
double boundary_residual(const DiscreteConformalMap& map, const JordanBoundary& domain, int n = 512);

struct UniformizeReport {
  double circle_residual = 0.0;
  double normalization_residual = 0.0;
  double boundary_residual = 0.0;  // outer image off the unit circle, between samples
  int sweeps = 0;
  std::vector<double> history;  // circle residual after each sweep
  bool converged = false;
};

struct KoebeOptions {
  double tol = 1e-6;
  int max_sweeps = 500;
  int disc_samples = 256;
  RiemannOptions riemann;
};

struct KoebeResult {
  DiscreteConformalMap map;
  RelativeSchottkySet target;
  UniformizeReport report;
};

/// Cyclic Koebe iteration onto a relative circle domain in the unit disc with marks at 1, i, -1.
KoebeResult koebe_uniformize(const RelativeSchottkySet& s, const KoebeOptions& opt = {});

/// Radial extension of a circle homeomorphism to the closed disc B -> B~.
class RadialExtension {
 public:
  RadialExtension(const Disc& from, const Disc& to, std::vector<double> theta, std::vector<double> image);

  Complex operator()(Complex z) const;
  Complex inverse(Complex w) const;
  double image_angle(double theta) const;

 private:
  static double interpolate(const std::vector<double>& x, const std::vector<double>& y, double t);
  Disc from_, to_;
  std::vector<double> theta_, image_;
};

/// Samples boundary(theta) = to.center + to.radius e^{i image(theta)} on n angles.
RadialExtension radial_extension(const std::function<Complex(Complex)>& boundary_map, const Disc& from,
                                 const Disc& to, int n = 1024);
RadialExtension radial_extension(const DiscreteConformalMap& map, int disc);

struct SequenceResult {
  std::vector<int> n_list;
  std::vector<KoebeResult> runs;
  std::vector<double> hausdorff_deltas;  // between consecutive image scenes
  std::vector<double> sup_deltas;        // between consecutive maps on the probe set
  std::vector<Complex> probe;
  bool truncated = false;
};

/// Uniformizes the prefixes A_n (first n discs) of the scene.
SequenceResult uniformize_sequence(const RelativeSchottkySet& s, const std::vector<int>& n_list,
                                   const KoebeOptions& opt = {}, double margin = 0.1, int probe_points = 400,
                                   uint64_t seed = 0);

struct DerivativeEstimate {
  Complex value;
  bool converged = false;
  std::vector<Complex> per_scale;
  std::vector<double> scales;
};

/// Difference-quotient limit at p using points q of S with |q - p| in h_list.
DerivativeEstimate estimate_derivative(const std::function<Complex(Complex)>& f, const RelativeSchottkySet& s,
                                       Complex p, std::vector<double> h_list = {});

}  // namespace sforge
