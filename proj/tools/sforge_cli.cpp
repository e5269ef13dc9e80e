// sforge: command-line front end over the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sforge/sforge.h"

namespace {

struct SceneDeleter {
  void operator()(sforge_scene* s) const { sforge_scene_free(s); }
};
struct ConfigDeleter {
  void operator()(sforge_config* c) const { sforge_config_free(c); }
};
struct ResultDeleter {
  void operator()(sforge_result* r) const { sforge_result_free(r); }
};
using ScenePtr = std::unique_ptr<sforge_scene, SceneDeleter>;
using ConfigPtr = std::unique_ptr<sforge_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<sforge_result, ResultDeleter>;

int fail(sforge_status st, const std::string& context) {
  std::cerr << "sforge: " << context << ": " << sforge_last_error() << "\n";
  return sforge_exit_code(st);
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

struct Overrides {
  std::string config_path, output;
  int grid_n = 0, max_sweeps = 0, samples = 0;
  double tol = 0.0;
  long long seed = -1;

  std::string json() const {
    std::string j = "{";
    const auto add = [&j](const std::string& key, const std::string& value) {
      if (j.size() > 1) j += ",";
      j += json_string(key) + ":" + value;
    };
    if (!output.empty()) add("output", json_string(output));
    if (grid_n > 0) add("grid_n", std::to_string(grid_n));
    if (max_sweeps > 0) add("max_sweeps", std::to_string(max_sweeps));
    if (samples > 0) add("samples", std::to_string(samples));
    if (tol > 0.0) {
      std::ostringstream ss;
      ss.precision(17);
      ss << tol;
      add("tol", ss.str());
    }
    if (seed >= 0) add("seed", std::to_string(seed));
    return j + "}";
  }
};

template <class Run>
int report(Run&& run, bool as_json, const std::string& context) {
  sforge_result* raw = nullptr;
  const sforge_status st = run(&raw);
  if (st != SFORGE_OK) return fail(st, context);
  const ResultPtr r(raw);
  std::cout << (as_json ? sforge_result_report(r.get()) : sforge_result_summary(r.get()));
  for (size_t i = 0; i < sforge_result_file_count(r.get()); ++i)
    std::cerr << "wrote " << sforge_result_file(r.get(), i) << "\n";
  return sforge_result_exit_code(r.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sforge: relative Schottky sets, transboundary modulus and circle-domain uniformization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sforge_version()));

  Overrides ov;
  bool as_json = false;
  app.add_option("--config", ov.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", ov.output, "output directory");
  app.add_option("--grid", ov.grid_n, "modulus grid cells per axis")->check(CLI::PositiveNumber);
  app.add_option("--tol", ov.tol, "Koebe circle residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-sweeps", ov.max_sweeps, "Koebe sweep limit")->check(CLI::PositiveNumber);
  app.add_option("--seed", ov.seed, "random seed")->check(CLI::NonNegativeNumber);
  app.add_option("--samples", ov.samples, "sample pairs for verification")->check(CLI::PositiveNumber);
  app.add_flag("--json", as_json, "print the JSON report instead of the summary");
  app.fallthrough();

  std::string scene_path, curve_path, e_spec, f_spec, fault = "none";
  bool svg = false, transboundary = false;
  std::vector<int> sequence;

  CLI::App* validate = app.add_subcommand("validate", "check a scene file");
  validate->add_option("scene", scene_path, "scene JSON")->required();

  CLI::App* reroute = app.add_subcommand("reroute", "reroute a curve around the peripheral discs");
  reroute->add_option("scene", scene_path, "scene JSON")->required();
  reroute->add_option("curve", curve_path, "curve JSON")->required()->check(CLI::ExistingFile);
  reroute->add_flag("--svg", svg, "write an SVG overlay");

  CLI::App* modulus = app.add_subcommand("modulus", "modulus of the curves joining E to F");
  modulus->add_option("scene", scene_path, "scene JSON")->required();
  modulus->add_option("--e", e_spec, "set E: outer, arc:i-j, circle:k, ball:x,y,r, ...")->required();
  modulus->add_option("--f", f_spec, "set F, same forms as --e")->required();
  modulus->add_flag("--transboundary", transboundary, "transboundary modulus instead of conformal");

  CLI::App* uniformize = app.add_subcommand("uniformize", "map onto a circle domain in the unit disc");
  uniformize->add_option("scene", scene_path, "scene JSON")->required();
  uniformize->add_option("--sequence", sequence, "disc prefix sizes, e.g. 1,2,4,8")->delimiter(',');

  CLI::App* verify = app.add_subcommand("verify", "run the bound checks on a fresh uniformization");
  verify->add_option("scene", scene_path, "scene JSON")->required();
  verify->add_option("--inject-fault", fault, "corrupt the map before checking")
      ->check(CLI::IsMember({"none", "expand"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  sforge_config* cfg_raw = nullptr;
  sforge_status st = sforge_config_new(&cfg_raw);
  if (st != SFORGE_OK) return fail(st, "config");
  const ConfigPtr cfg(cfg_raw);
  if (!ov.config_path.empty() && (st = sforge_config_load(cfg.get(), ov.config_path.c_str())) != SFORGE_OK)
    return fail(st, ov.config_path);
  if ((st = sforge_config_merge_json(cfg.get(), ov.json().c_str())) != SFORGE_OK) return fail(st, "options");

  sforge_scene* scene_raw = nullptr;
  if ((st = sforge_scene_load(scene_path.c_str(), &scene_raw)) != SFORGE_OK) return fail(st, scene_path);
  const ScenePtr scene(scene_raw);

  sforge_scene* sc = scene.get();
  if (validate->parsed()) return report([&](sforge_result** r) { return sforge_cmd_validate(sc, r); }, as_json, "validate");
  if (reroute->parsed()) {
    std::ifstream in(curve_path);
    std::stringstream curve;
    curve << in.rdbuf();
    const std::string text = curve.str();
    return report([&](sforge_result** r) { return sforge_cmd_reroute(sc, text.c_str(), cfg.get(), svg ? 1 : 0, r); },
                  as_json, "reroute");
  }
  if (modulus->parsed()) {
    return report(
        [&](sforge_result** r) {
          return sforge_cmd_modulus(sc, e_spec.c_str(), f_spec.c_str(), transboundary ? 1 : 0, cfg.get(), r);
        },
        as_json, "modulus");
  }
  if (uniformize->parsed()) {
    return report(
        [&](sforge_result** r) { return sforge_cmd_uniformize(sc, sequence.data(), sequence.size(), cfg.get(), r); },
        as_json, "uniformize");
  }
  return report([&](sforge_result** r) { return sforge_cmd_verify(sc, cfg.get(), fault.c_str(), r); }, as_json,
                "verify");
}
