#ifndef SFORGE_SFORGE_H
#define SFORGE_SFORGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(SFORGE_BUILDING_LIBRARY)
#define SFORGE_API __attribute__((visibility("default")))
#else
#define SFORGE_API
#endif

/* Status codes. Values 0-4 double as process exit codes. */
typedef enum sforge_status {
  SFORGE_OK = 0,
  SFORGE_ERR_PRECONDITION = 1,
  SFORGE_ERR_PARSE = 2,
  SFORGE_ERR_NONCONVERGENCE = 3,
  SFORGE_ERR_VERIFICATION = 4,
  SFORGE_ERR_DOMAIN = 5,
  SFORGE_ERR_INTERNAL = 6,
  SFORGE_ERR_INVALID_ARGUMENT = 7
} sforge_status;

typedef struct sforge_scene sforge_scene;
typedef struct sforge_config sforge_config;
typedef struct sforge_map sforge_map;
typedef struct sforge_result sforge_result;

SFORGE_API const char* sforge_version(void);
/* Message of the last failed call on this thread; empty when none. */
SFORGE_API const char* sforge_last_error(void);
/* Process exit code for a status: 0-4, with domain, internal and argument errors mapped to 1. */
SFORGE_API int sforge_exit_code(sforge_status status);
SFORGE_API void sforge_string_free(char* s);

/* Scenes. */
SFORGE_API sforge_status sforge_scene_parse(const char* json, sforge_scene** out);
SFORGE_API sforge_status sforge_scene_load(const char* path, sforge_scene** out);
SFORGE_API sforge_status sforge_scene_to_json(const sforge_scene* scene, char** out);
SFORGE_API sforge_status sforge_scene_disc_count(const sforge_scene* scene, size_t* out);
SFORGE_API sforge_status sforge_scene_validate(const sforge_scene* scene, int* ok);
SFORGE_API void sforge_scene_free(sforge_scene* scene);

/* Run configuration: grid_n, tol, max_sweeps, seed, samples, output. */
SFORGE_API sforge_status sforge_config_new(sforge_config** out);
/* Applies the keys of a JSON object on top of the current values. */
SFORGE_API sforge_status sforge_config_merge_json(sforge_config* cfg, const char* json);
SFORGE_API sforge_status sforge_config_load(sforge_config* cfg, const char* path);
SFORGE_API sforge_status sforge_config_to_json(const sforge_config* cfg, char** out);
SFORGE_API void sforge_config_free(sforge_config* cfg);

/* Circle-domain maps. The map keeps its own copy of the source scene. */
SFORGE_API sforge_status sforge_uniformize(const sforge_scene* scene, const sforge_config* cfg, sforge_map** out);
SFORGE_API sforge_status sforge_map_converged(const sforge_map* map, int* converged);
SFORGE_API sforge_status sforge_map_eval(const sforge_map* map, double x, double y, double* u, double* v);
SFORGE_API sforge_status sforge_map_inverse(const sforge_map* map, double u, double v, double* x, double* y);
/* Target circle domain as a new scene handle. */
SFORGE_API sforge_status sforge_map_target(const sforge_map* map, sforge_scene** out);
SFORGE_API void sforge_map_free(sforge_map* map);

/* Commands. On success *out holds a result even when the command reports a nonzero exit code;
   on a raised error *out is NULL and the status carries the error class. */
SFORGE_API sforge_status sforge_cmd_validate(const sforge_scene* scene, sforge_result** out);
SFORGE_API sforge_status sforge_cmd_reroute(const sforge_scene* scene, const char* curve_json,
                                            const sforge_config* cfg, int write_svg, sforge_result** out);
SFORGE_API sforge_status sforge_cmd_modulus(const sforge_scene* scene, const char* e_spec, const char* f_spec,
                                            int transboundary, const sforge_config* cfg, sforge_result** out);
/* sequence may be NULL when count is 0. */
SFORGE_API sforge_status sforge_cmd_uniformize(const sforge_scene* scene, const int* sequence, size_t count,
                                               const sforge_config* cfg, sforge_result** out);
/* fault: NULL, "none" or "expand". */
SFORGE_API sforge_status sforge_cmd_verify(const sforge_scene* scene, const sforge_config* cfg, const char* fault,
                                           sforge_result** out);

SFORGE_API int sforge_result_exit_code(const sforge_result* result);
/* Borrowed strings, valid until the result is freed. */
SFORGE_API const char* sforge_result_report(const sforge_result* result);
SFORGE_API const char* sforge_result_summary(const sforge_result* result);
SFORGE_API size_t sforge_result_file_count(const sforge_result* result);
SFORGE_API const char* sforge_result_file(const sforge_result* result, size_t index);
SFORGE_API void sforge_result_free(sforge_result* result);

#ifdef __cplusplus
}
#endif

#endif
