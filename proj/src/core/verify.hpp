#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schottky.hpp"

namespace sforge {

using Evaluator = std::function<Complex(Complex)>;

/// One checked inequality.
struct BoundReport {
  std::string name;
  std::string constant;  // symbolic form of the bound
  std::string kind;      // "explicit" for a closed-form constant, "envelope" for a measured one
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // signed slack; the check passes iff margin >= 0
  int samples = 0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> details;
};

/// max over r of L_F(p, r) / l_F(p, r) from n samples per circle; +inf when an image circle degenerates
/// (l_F below 1e-12 L_F).
double dilatation(const Evaluator& f, Complex p, const std::vector<double>& r_list, int samples = 256);

/// Affine frames z = centre + scale u on the source side and u' = (w - image_centre) / image_scale
/// on the image side, under which the source contains the unit disc and the image lies in it.
struct SchwarzPickFrame {
  Complex centre;
  double scale = 1.0;
  Complex image_centre;
  double image_scale = 1.0;
};

/// Frame about an interior point c: the source ball B(c, dist(c, boundary)) and the image
/// ball B(g(c), diam of the image domain).
SchwarzPickFrame rescaling_frame(const Evaluator& g, const RelativeSchottkySet& source,
                                 const RelativeSchottkySet& image, Complex c);

/// Hyperbolic contraction d(g(p), g(q)) <= d(p, q) + tol on sampled pairs of closure(A) in the
/// unit disc. Without a frame the scenes must already satisfy image outer <= unit disc <= source outer.
BoundReport schwarz_pick_check(const Evaluator& g, const RelativeSchottkySet& source,
                               const RelativeSchottkySet& image, int pairs, uint64_t seed,
                               const std::optional<SchwarzPickFrame>& frame = std::nullopt, double tol = 1e-3);

/// sup |g(p) - g(q)| / |p - q| over pairs in closure(B(p0, r/4) intersect A) against pi 2 sigma / r.
BoundReport lipschitz_profile(const Evaluator& g, const RelativeSchottkySet& s, Complex p0, double r, double sigma,
                              int pairs, uint64_t seed);

struct PropernessRow {
  double d = 0.0;
  double clearance = 0.0;          // min dist(g(K_d), image boundary)
  double inverse_clearance = 0.0;  // min dist(g^-1(K~_d), source boundary); NaN when not computed
  int samples = 0;
  int inverse_samples = 0;
};

/// Image clearance of K_d = {p in closure(A): dist(p, source boundary) >= d} for each d; rows with an
/// empty K_d are skipped. The inverse table is filled when `inverse` is given.
std::vector<PropernessRow> properness_profile(const Evaluator& g, const RelativeSchottkySet& source,
                                              const RelativeSchottkySet& image, const std::vector<double>& d_list,
                                              int samples, uint64_t seed, const Evaluator& inverse = {});

/// Winding number about 0 of v along the closed polyline.
int winding_index(const Polyline& curve, const Evaluator& v);

struct JetCheck {
  MobiusMap m;
  double min_distance = 0.0;  // between the image outer boundary and m(source outer boundary)
  double resolution = 0.0;    // largest spacing of the sampled m(source outer boundary)
  bool pass = false;
};

/// Value and first two derivatives by fourth-order central differences with Richardson extrapolation.
Jet2 estimate_jet(const Evaluator& g, Complex p, double h);

/// Compares m(source outer) with the image outer boundary for m matched to the given jet.
JetCheck jet_distance(const Jet2& jet, const JordanBoundary& source_outer, const JordanBoundary& image_outer,
                      int samples = 2048);
JetCheck jet_intersection_check(const Evaluator& g, const RelativeSchottkySet& source,
                                const RelativeSchottkySet& image, Complex p, int samples = 2048);

struct RigidityResult {
  MobiusMap fit;
  double residual = 0.0;  // sup |f - fit| over the samples
};

/// Least-squares Moebius fit of values f_k at points z_k.
RigidityResult rigidity_probe(const std::vector<Complex>& z, const std::vector<Complex>& f);

}  // namespace sforge
