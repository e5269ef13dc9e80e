#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace sforge::io {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw parse_error(what + ": malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw parse_error(where + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw parse_error(where + " must be finite");
  return x;
}

Complex point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw parse_error(where + " must be [x, y]");
  return Complex(number(j[0], where + "[0]"), number(j[1], where + "[1]"));
}

std::vector<Complex> point_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw parse_error(where + " must be an array of points");
  std::vector<Complex> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Disc disc(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("c") || !j.contains("r")) throw parse_error(where + " must be {\"c\": [x, y], \"r\": r}");
  for (const auto& [key, value] : j.items())
    if (key != "c" && key != "r") throw parse_error(where + " has unknown key '" + key + "'");
  const Complex c = point(j["c"], where + ".c");
  const double r = number(j["r"], where + ".r");
  if (!(r > 0.0)) throw parse_error(where + ".r must be positive");
  return Disc(c, r);
}

json point_json(Complex z) { return json::array({z.real(), z.imag()}); }

json disc_json(const Disc& d) { return json{{"c", point_json(d.center)}, {"r", d.radius}}; }

}  // namespace

RelativeSchottkySet parse_scene(const std::string& text) {
  const json j = parse_json(text, "scene");
  if (!j.is_object()) throw parse_error("scene must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "outer" && key != "discs" && key != "marks" && key != "meta")
      throw parse_error("scene has unknown key '" + key + "'");
  if (!j.contains("outer")) throw parse_error("scene needs an 'outer' boundary");

  RelativeSchottkySet s;
  const json& outer = j["outer"];
  if (!outer.is_object() || outer.size() != 1) throw parse_error("outer must hold exactly one of 'circle', 'polyline'");
  if (outer.contains("circle")) {
    s.outer = JordanBoundary(disc(outer["circle"], "outer.circle"));
  } else if (outer.contains("polyline")) {
    const std::vector<Complex> v = point_list(outer["polyline"], "outer.polyline");
    if (v.size() < 3) throw parse_error("outer.polyline needs at least 3 vertices");
    s.outer = JordanBoundary(Polyline(v, true));
  } else {
    throw parse_error("outer must hold exactly one of 'circle', 'polyline'");
  }

  if (j.contains("discs")) {
    const json& discs = j["discs"];
    if (!discs.is_array()) throw parse_error("discs must be an array");
    for (size_t i = 0; i < discs.size(); ++i) s.discs.push_back(disc(discs[i], "discs[" + std::to_string(i) + "]"));
  }
  if (j.contains("marks")) {
    s.marks = point_list(j["marks"], "marks");
    if (s.marks.size() != 3) throw parse_error("marks must hold exactly three points");
  }
  if (j.contains("meta")) s.meta = j["meta"].dump();
  return s;
}

RelativeSchottkySet load_scene(const std::string& path) { return parse_scene(read_file(path)); }

std::string scene_to_json(const RelativeSchottkySet& s) {
  json j;
  if (s.outer.is_circle()) {
    j["outer"] = json{{"circle", disc_json(s.outer.circle())}};
  } else {
    json v = json::array();
    for (Complex z : s.outer.polygon().vertices()) v.push_back(point_json(z));
    j["outer"] = json{{"polyline", v}};
  }
  j["discs"] = json::array();
  for (const Disc& d : s.discs) j["discs"].push_back(disc_json(d));
  if (!s.marks.empty()) {
    j["marks"] = json::array();
    for (Complex z : s.marks) j["marks"].push_back(point_json(z));
  }
  j["meta"] = parse_json(s.meta, "scene meta");
  return j.dump(2) + "\n";
}

Polyline parse_polyline(const std::string& text) {
  const json j = parse_json(text, "curve");
  if (!j.is_object() || !j.contains("polyline")) throw parse_error("curve must be {\"polyline\": [[x, y], ...]}");
  for (const auto& [key, value] : j.items())
    if (key != "polyline" && key != "closed") throw parse_error("curve has unknown key '" + key + "'");
  bool closed = false;
  if (j.contains("closed")) {
    if (!j["closed"].is_boolean()) throw parse_error("curve.closed must be a boolean");
    closed = j["closed"].get<bool>();
  }
  const std::vector<Complex> v = point_list(j["polyline"], "curve.polyline");
  if (v.empty()) throw parse_error("curve.polyline needs at least one vertex");
  return Polyline(v, closed);
}

std::string polyline_to_json(const Polyline& p) {
  json v = json::array();
  for (Complex z : p.vertices()) v.push_back(point_json(z));
  json j{{"polyline", v}, {"closed", p.closed()}};
  return j.dump(2) + "\n";
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  const json j = parse_json(text, "config");
  if (!j.is_object()) throw parse_error("config must be a JSON object");
  const auto positive_int = [](const json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) throw parse_error("config." + key + " must be a positive integer");
    return v.get<long long>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "grid_n") {
      base.grid_n = static_cast<int>(positive_int(value, key));
    } else if (key == "tol") {
      base.tol = number(value, "config.tol");
      if (!(base.tol > 0.0)) throw parse_error("config.tol must be positive");
    } else if (key == "max_sweeps") {
      base.max_sweeps = static_cast<int>(positive_int(value, key));
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw parse_error("config.seed must be a non-negative integer");
      base.seed = value.get<uint64_t>();
    } else if (key == "samples") {
      base.samples = static_cast<int>(positive_int(value, key));
    } else if (key == "output") {
      if (!value.is_string()) throw parse_error("config.output must be a string");
      base.output = value.get<std::string>();
    } else {
      throw parse_error("config has unknown key '" + key + "'");
    }
  }
  return base;
}

std::string config_to_json(const RunConfig& c) {
  const json j{{"grid_n", c.grid_n}, {"tol", c.tol},         {"max_sweeps", c.max_sweeps},
               {"seed", c.seed},     {"samples", c.samples}, {"output", c.output}};
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw precondition_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw precondition_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw precondition_error("write failed for '" + path + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

SvgCanvas::SvgCanvas(const Box& view, int width_px) : view_(view), width_(width_px) {
  const double pad = 0.05 * std::max(view.width(), view.height());
  view_ = {view.xmin - pad, view.ymin - pad, view.xmax + pad, view.ymax + pad};
  scale_ = width_px / view_.width();
  height_ = static_cast<int>(std::ceil(view_.height() * scale_));
}

double SvgCanvas::px(double x) const { return (x - view_.xmin) * scale_; }
double SvgCanvas::py(double y) const { return (view_.ymax - y) * scale_; }

namespace {
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}
}  // namespace

void SvgCanvas::circle(const Disc& d, const std::string& stroke, const std::string& fill, double width) {
  body_ += "<circle cx=\"" + num(px(d.center.real())) + "\" cy=\"" + num(py(d.center.imag())) + "\" r=\"" +
           num(d.radius * scale_) + "\" stroke=\"" + stroke + "\" fill=\"" + fill + "\" stroke-width=\"" + num(width) +
           "\"/>\n";
}

void SvgCanvas::polyline(const Polyline& p, const std::string& stroke, double width, const std::string& fill) {
  std::string pts;
  for (Complex z : p.vertices()) pts += num(px(z.real())) + "," + num(py(z.imag())) + " ";
  if (!pts.empty()) pts.pop_back();
  body_ += std::string(p.closed() ? "<polygon" : "<polyline") + " points=\"" + pts + "\" stroke=\"" + stroke +
           "\" fill=\"" + fill + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgCanvas::rect(const Box& b, const std::string& fill) {
  body_ += "<rect x=\"" + num(px(b.xmin)) + "\" y=\"" + num(py(b.ymax)) + "\" width=\"" + num(b.width() * scale_) +
           "\" height=\"" + num(b.height() * scale_) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::dot(Complex z, double radius_px, const std::string& fill) {
  body_ += "<circle cx=\"" + num(px(z.real())) + "\" cy=\"" + num(py(z.imag())) + "\" r=\"" + num(radius_px) +
           "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::scene(const RelativeSchottkySet& s, const std::string& stroke, const std::string& disc_fill) {
  if (s.outer.is_circle())
    circle(s.outer.circle(), stroke);
  else
    polyline(s.outer.polygon(), stroke);
  for (const Disc& d : s.discs) circle(d, stroke, disc_fill);
  for (Complex m : s.marks) dot(m, 3.0, stroke);
}

std::string SvgCanvas::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) + "\" height=\"" +
         std::to_string(height_) + "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

std::string heat_colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 - t * (255 - 8)));
  const int g = static_cast<int>(std::lround(255 - t * (255 - 48)));
  const int b = static_cast<int>(std::lround(255 - t * (255 - 107)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace sforge::io
