#pragma once

#include <vector>

#include "polyline.hpp"
#include "schottky.hpp"

namespace sforge {

struct RerouteStep {
  int disc = -1;
  double subcurve_length = 0.0;  // replaced piece of the current curve
  double arc_length = 0.0;       // discretised arc put in its place
  double chord = 0.0;            // distance between the first and last hit points
};

struct RerouteResult {
  Polyline curve;
  std::vector<RerouteStep> steps;
  double original_length = 0.0;
  double ratio = 1.0;  // length(l') / length(l), 1 for zero-length input
  int passes = 0;
};

/// Discs that meet the open disc closer than this are considered crossed.
double reroute_tolerance(const RelativeSchottkySet& s);

/// Replace every excursion into a disc by the shorter boundary arc, largest disc first.
RerouteResult reroute(const RelativeSchottkySet& s, const Polyline& l);

/// Reroute the segment [p,q] inside B(p, 2r).
RerouteResult reroute_in_ball(const RelativeSchottkySet& s, Complex p, Complex q, double r);

/// Deepest intrusion of the curve into any open disc (0 when none).
double max_penetration(const RelativeSchottkySet& s, const Polyline& l);

/// True iff the shorter arc of inner's circle between the two crossing points lies outside outer.
bool shorter_arc_side_check(const Disc& outer, const Disc& inner);

/// True iff the closed curve lies within Hausdorff distance tol of some peripheral circle.
bool is_peripheral(const RelativeSchottkySet& s, const Polyline& c, double tol = 1e-4);

/// Hausdorff distance between a closed polyline and a circle.
double hausdorff_to_circle(const Polyline& c, const Disc& d, int circle_samples = 512);

}  // namespace sforge
