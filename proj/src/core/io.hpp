#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schottky.hpp"

namespace sforge::io {

/// Scene document: {"outer": {"circle": {"c": [x, y], "r": r}} | {"polyline": [[x, y], ...]},
/// "discs": [{"c": [x, y], "r": r}, ...], "marks": [[x, y] x 3] (optional), "meta": any}.
RelativeSchottkySet parse_scene(const std::string& text);
RelativeSchottkySet load_scene(const std::string& path);
std::string scene_to_json(const RelativeSchottkySet& s);

/// Curve document: {"polyline": [[x, y], ...], "closed": bool (optional, default false)}.
Polyline parse_polyline(const std::string& text);
std::string polyline_to_json(const Polyline& p);

struct RunConfig {
  int grid_n = 256;
  double tol = 1e-6;
  int max_sweeps = 500;
  uint64_t seed = 0;
  int samples = 10000;
  std::string output = ".";
};

/// Overrides the fields present in the JSON object; unknown keys are parse errors.
RunConfig parse_config(const std::string& text, RunConfig base = {});
std::string config_to_json(const RunConfig& c);

std::string read_file(const std::string& path);
/// Writes the file, creating parent directories.
void write_file(const std::string& path, const std::string& content);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

/// SVG drawing in scene coordinates with the y axis pointing up.
class SvgCanvas {
 public:
  SvgCanvas(const Box& view, int width_px = 800);

  void circle(const Disc& d, const std::string& stroke, const std::string& fill = "none", double width = 1.0);
  void polyline(const Polyline& p, const std::string& stroke, double width = 1.0, const std::string& fill = "none");
  void rect(const Box& b, const std::string& fill);
  void dot(Complex z, double radius_px, const std::string& fill);
  void scene(const RelativeSchottkySet& s, const std::string& stroke, const std::string& disc_fill = "none");
  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;
  Box view_;
  double scale_;
  int width_, height_;
  std::string body_;
};

/// Hex colour for t in [0, 1] on a white-to-dark-blue ramp.
std::string heat_colour(double t);

}  // namespace sforge::io
