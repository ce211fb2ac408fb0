// Copyright 2026 The splineot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLINEOT_SPLINEOT_H_
#define SPLINEOT_SPLINEOT_H_

/* C interface to the splineot solvers. Every handle is opaque and owned by
 * the caller once returned; release it with the matching _destroy function.
 * Functions return SOT_OK or an error status, in which case
 * sot_last_error() describes the failure on the calling thread. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SOT_API __declspec(dllexport)
#else
#define SOT_API __attribute__((visibility("default")))
#endif

typedef enum sot_status {
  SOT_OK = 0,
  SOT_ERR_INVALID_ARGUMENT = 1,
  SOT_ERR_PARSE = 2,
  SOT_ERR_INDEX_OUT_OF_RANGE = 3,
  SOT_ERR_DUPLICATE_VERTEX = 4,
  SOT_ERR_DEGENERATE_TRIANGLE = 5,
  SOT_ERR_NON_MANIFOLD = 6,
  SOT_ERR_DANGLING_VERTEX = 7,
  SOT_ERR_CENTER_OUTSIDE = 8,
  SOT_ERR_NOT_STAR_SHAPED = 9,
  SOT_ERR_NO_INTERSECTION = 10,
  SOT_ERR_OUT_OF_DOMAIN = 11,
  SOT_ERR_DENSITY_RANGE = 12,
  SOT_ERR_INFEASIBLE = 13,
  SOT_ERR_NON_FINITE = 14,
  SOT_ERR_BLOW_UP = 15,
  SOT_ERR_MAP_QUALITY = 16,
  SOT_ERR_IO = 17,
  SOT_ERR_MESH_MISMATCH = 18,
  SOT_ERR_INTERNAL = 100
} sot_status;

typedef struct sot_options sot_options;
typedef struct sot_report sot_report;
typedef struct sot_mesh sot_mesh;
typedef struct sot_bform sot_bform;
typedef struct sot_image sot_image;

SOT_API const char* sot_version(void);
SOT_API const char* sot_last_error(void);
/* Stable snake_case name such as "density_range". */
SOT_API const char* sot_status_name(sot_status status);
/* Caps worker threads used by the linear algebra; n <= 0 restores the default. */
SOT_API sot_status sot_set_threads(int n);

/* Run options. Keys are the CLI flag names without dashes, e.g. "degree",
 * "target-domain", "outer-iters". Unknown keys are rejected. */
SOT_API sot_status sot_options_create(sot_options** out);
SOT_API void sot_options_destroy(sot_options* opts);
SOT_API sot_status sot_options_set(sot_options* opts, const char* key, const char* value);

/* command: "poisson", "mae", "ot", "warp", or "bench:table1" .. "bench:table4". */
SOT_API sot_status sot_run(const char* command, const sot_options* opts, sot_report** out);
SOT_API void sot_report_destroy(sot_report* report);
SOT_API const char* sot_report_json(const sot_report* report);
/* Empty unless the command produced a table. */
SOT_API const char* sot_report_csv(const sot_report* report);
SOT_API int sot_report_passed(const sot_report* report);

/* Mesh spec as accepted by --mesh (builtin name or .node path). */
SOT_API sot_status sot_mesh_open(const char* spec, sot_mesh** out);
SOT_API void sot_mesh_destroy(sot_mesh* mesh);
SOT_API sot_status sot_mesh_counts(const sot_mesh* mesh, int* vertices, int* triangles, int* edges);

SOT_API sot_status sot_bform_read(const char* json_path, const sot_mesh* mesh, sot_bform** out);
SOT_API sot_status sot_bform_interpolate(const sot_mesh* mesh, int degree, int smoothness, const char* field,
                                         sot_bform** out);
SOT_API void sot_bform_destroy(sot_bform* bform);
/* out receives value, d/dx, d/dy, d2/dx2, d2/dxdy, d2/dy2. */
SOT_API sot_status sot_bform_eval(const sot_bform* bform, double x, double y, double out[6]);

SOT_API sot_status sot_image_read(const char* path, sot_image** out);
SOT_API sot_status sot_image_write(const sot_image* image, const char* path, int ascii);
SOT_API void sot_image_destroy(sot_image* image);
SOT_API sot_status sot_image_size(const sot_image* image, int* width, int* height, int* channels);
SOT_API sot_status sot_image_psnr(const sot_image* a, const sot_image* b, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SPLINEOT_SPLINEOT_H_ */
