#include "sforge/sforge.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "commands.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "uniformize.hpp"

struct sforge_scene {
  sforge::RelativeSchottkySet s;
};

struct sforge_config {
  sforge::io::RunConfig c;
};

struct sforge_map {
  sforge::KoebeResult k;
};

struct sforge_result {
  sforge::app::CommandResult r;
};

namespace {

thread_local std::string last_error;

sforge_status status_for(const sforge::Error& e) {
  switch (e.kind()) {
    case sforge::ErrorKind::Precondition:
      return SFORGE_ERR_PRECONDITION;
    case sforge::ErrorKind::Parse:
      return SFORGE_ERR_PARSE;
    case sforge::ErrorKind::NonConvergence:
      return SFORGE_ERR_NONCONVERGENCE;
    case sforge::ErrorKind::Verification:
      return SFORGE_ERR_VERIFICATION;
    case sforge::ErrorKind::Domain:
      return SFORGE_ERR_DOMAIN;
    case sforge::ErrorKind::Internal:
      return SFORGE_ERR_INTERNAL;
  }
  return SFORGE_ERR_INTERNAL;
}

/// Runs body, translating exceptions into status codes and the thread's last error.
template <class F>
sforge_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return SFORGE_OK;
  } catch (const sforge::Error& e) {
    last_error = e.what();
    return status_for(e);
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SFORGE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SFORGE_ERR_INTERNAL;
  }
}

sforge_status invalid(const char* what) {
  last_error = what;
  return SFORGE_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const sforge::io::RunConfig& config_or_default(const sforge_config* cfg) {
  static const sforge::io::RunConfig defaults;
  return cfg ? cfg->c : defaults;
}

template <class F>
sforge_status run_command(sforge_result** out, F&& body) {
  if (!out) return invalid("result pointer is null");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<sforge_result>();
    r->r = body();
    *out = r.release();
  });
}

}  // namespace

extern "C" {

const char* sforge_version(void) { return "0.1.0"; }

const char* sforge_last_error(void) { return last_error.c_str(); }

int sforge_exit_code(sforge_status status) {
  return (status >= SFORGE_OK && status <= SFORGE_ERR_VERIFICATION) ? static_cast<int>(status) : 1;
}

void sforge_string_free(char* s) { std::free(s); }

sforge_status sforge_scene_parse(const char* json, sforge_scene** out) {
  if (!json || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new sforge_scene{sforge::io::parse_scene(json)}; });
}

sforge_status sforge_scene_load(const char* path, sforge_scene** out) {
  if (!path || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new sforge_scene{sforge::io::load_scene(path)}; });
}

sforge_status sforge_scene_to_json(const sforge_scene* scene, char** out) {
  if (!scene || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = copy_string(sforge::io::scene_to_json(scene->s)); });
}

sforge_status sforge_scene_disc_count(const sforge_scene* scene, size_t* out) {
  if (!scene || !out) return invalid("null argument");
  *out = scene->s.discs.size();
  return SFORGE_OK;
}

sforge_status sforge_scene_validate(const sforge_scene* scene, int* ok) {
  if (!scene || !ok) return invalid("null argument");
  return guarded([&] { *ok = sforge::validate(scene->s).ok ? 1 : 0; });
}

void sforge_scene_free(sforge_scene* scene) { delete scene; }

sforge_status sforge_config_new(sforge_config** out) {
  if (!out) return invalid("null argument");
  return guarded([&] { *out = new sforge_config{}; });
}

sforge_status sforge_config_merge_json(sforge_config* cfg, const char* json) {
  if (!cfg || !json) return invalid("null argument");
  return guarded([&] { cfg->c = sforge::io::parse_config(json, cfg->c); });
}

sforge_status sforge_config_load(sforge_config* cfg, const char* path) {
  if (!cfg || !path) return invalid("null argument");
  return guarded([&] { cfg->c = sforge::io::parse_config(sforge::io::read_file(path), cfg->c); });
}

sforge_status sforge_config_to_json(const sforge_config* cfg, char** out) {
  if (!cfg || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = copy_string(sforge::io::config_to_json(cfg->c)); });
}

void sforge_config_free(sforge_config* cfg) { delete cfg; }

sforge_status sforge_uniformize(const sforge_scene* scene, const sforge_config* cfg, sforge_map** out) {
  if (!scene || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    const sforge::io::RunConfig& c = config_or_default(cfg);
    sforge::KoebeOptions opt;
    opt.tol = c.tol;
    opt.max_sweeps = c.max_sweeps;
    *out = new sforge_map{sforge::koebe_uniformize(scene->s, opt)};
  });
}

sforge_status sforge_map_converged(const sforge_map* map, int* converged) {
  if (!map || !converged) return invalid("null argument");
  *converged = map->k.report.converged ? 1 : 0;
  return SFORGE_OK;
}

sforge_status sforge_map_eval(const sforge_map* map, double x, double y, double* u, double* v) {
  if (!map || !u || !v) return invalid("null argument");
  return guarded([&] {
    const sforge::Complex w = map->k.map(sforge::Complex(x, y));
    *u = w.real();
    *v = w.imag();
  });
}

sforge_status sforge_map_inverse(const sforge_map* map, double u, double v, double* x, double* y) {
  if (!map || !x || !y) return invalid("null argument");
  return guarded([&] {
    const sforge::Complex z = map->k.map.inverse(sforge::Complex(u, v));
    *x = z.real();
    *y = z.imag();
  });
}

sforge_status sforge_map_target(const sforge_map* map, sforge_scene** out) {
  if (!map || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new sforge_scene{map->k.target}; });
}

void sforge_map_free(sforge_map* map) { delete map; }

sforge_status sforge_cmd_validate(const sforge_scene* scene, sforge_result** out) {
  if (!scene) return invalid("null scene");
  return run_command(out, [&] { return sforge::app::cmd_validate(scene->s); });
}

sforge_status sforge_cmd_reroute(const sforge_scene* scene, const char* curve_json, const sforge_config* cfg,
                                 int write_svg, sforge_result** out) {
  if (!scene || !curve_json) return invalid("null argument");
  return run_command(out, [&] {
    return sforge::app::cmd_reroute(scene->s, sforge::io::parse_polyline(curve_json), config_or_default(cfg),
                                    write_svg != 0);
  });
}

sforge_status sforge_cmd_modulus(const sforge_scene* scene, const char* e_spec, const char* f_spec,
                                 int transboundary, const sforge_config* cfg, sforge_result** out) {
  if (!scene || !e_spec || !f_spec) return invalid("null argument");
  return run_command(out, [&] {
    return sforge::app::cmd_modulus(scene->s, e_spec, f_spec, transboundary != 0, config_or_default(cfg));
  });
}

sforge_status sforge_cmd_uniformize(const sforge_scene* scene, const int* sequence, size_t count,
                                    const sforge_config* cfg, sforge_result** out) {
  if (!scene || (count > 0 && !sequence)) return invalid("null argument");
  return run_command(out, [&] {
    const std::vector<int> seq(sequence, sequence + count);
    return sforge::app::cmd_uniformize(scene->s, seq, config_or_default(cfg));
  });
}

sforge_status sforge_cmd_verify(const sforge_scene* scene, const sforge_config* cfg, const char* fault,
                                sforge_result** out) {
  if (!scene) return invalid("null scene");
  return run_command(out, [&] {
    return sforge::app::cmd_verify(scene->s, config_or_default(cfg), sforge::app::parse_fault(fault ? fault : ""));
  });
}

int sforge_result_exit_code(const sforge_result* result) { return result ? result->r.exit_code : 1; }

const char* sforge_result_report(const sforge_result* result) { return result ? result->r.report.c_str() : ""; }

const char* sforge_result_summary(const sforge_result* result) { return result ? result->r.summary.c_str() : ""; }

size_t sforge_result_file_count(const sforge_result* result) { return result ? result->r.files.size() : 0; }

const char* sforge_result_file(const sforge_result* result, size_t index) {
  if (!result || index >= result->r.files.size()) return nullptr;
  return result->r.files[index].c_str();
}

void sforge_result_free(sforge_result* result) { delete result; }

}  // extern "C"
