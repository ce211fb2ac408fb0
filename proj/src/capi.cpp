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

#include "splineot/splineot.h"

#include <Eigen/Core>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <new>
#include <sstream>
#include <string>

#include "splineot/bbspline.hpp"
#include "splineot/densities.hpp"
#include "splineot/error.hpp"
#include "splineot/imaging.hpp"
#include "splineot/pipeline.hpp"

using namespace splineot;

struct sot_options {
  RunOptions opt;
};
struct sot_report {
  RunReport report;
};
struct sot_mesh {
  MeshPtr mesh;
};
struct sot_bform {
  BForm u;
};
struct sot_image {
  RasterImage img;
};

namespace {

thread_local std::string g_last_error;

sot_status fail(sot_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs `body`, translating exceptions into status codes.
sot_status guarded(const std::function<void()>& body) {
  try {
    body();
    g_last_error.clear();
    return SOT_OK;
  } catch (const Error& e) {
    return fail(static_cast<sot_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SOT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SOT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SOT_ERR_INTERNAL, "unknown failure");
  }
}

int to_int(const std::string& key, std::string_view v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw Error(ErrorCode::kParse, "option '" + key + "' expects an integer, got '" + std::string(v) + "'");
  return out;
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw Error(ErrorCode::kParse, "option '" + key + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kParse, "option '" + key + "' expects a boolean, got '" + std::string(v) + "'");
}

void set_option(RunOptions& o, const std::string& key, const std::string& v) {
  static const std::map<std::string, std::string RunOptions::*> strings = {
      {"mesh", &RunOptions::mesh},   {"domain", &RunOptions::domain}, {"target-domain", &RunOptions::target_domain},
      {"f", &RunOptions::f},         {"g", &RunOptions::g},           {"bc", &RunOptions::bc},
      {"exact", &RunOptions::exact}, {"out", &RunOptions::out},       {"trace", &RunOptions::trace},
      {"image", &RunOptions::image}, {"potential", &RunOptions::potential}, {"base-dir", &RunOptions::base_dir}};
  static const std::map<std::string, int RunOptions::*> ints = {
      {"degree", &RunOptions::degree},   {"smoothness", &RunOptions::smoothness},
      {"colloc-degree", &RunOptions::colloc_degree}, {"iters", &RunOptions::iters},
      {"stages", &RunOptions::stages},   {"outer-iters", &RunOptions::outer_iters},
      {"width", &RunOptions::width},     {"height", &RunOptions::height}};
  if (auto it = strings.find(key); it != strings.end()) {
    o.*(it->second) = v;
  } else if (auto jt = ints.find(key); jt != ints.end()) {
    o.*(jt->second) = to_int(key, v);
  } else if (key == "tol") {
    o.tol = to_double(key, v);
  } else if (key == "floor") {
    o.floor = to_double(key, v);
  } else if (key == "force") {
    o.force = to_bool(key, v);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown option '" + key + "'");
  }
}

std::string read_text(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, std::string("cannot open '") + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

extern "C" {

const char* sot_version(void) { return "0.1.0"; }

const char* sot_last_error(void) { return g_last_error.c_str(); }

const char* sot_status_name(sot_status status) {
  if (status == SOT_OK) return "ok";
  if (status == SOT_ERR_INTERNAL) return "internal";
  if (status >= SOT_ERR_INVALID_ARGUMENT && status <= SOT_ERR_MESH_MISMATCH)
    return error_code_name(static_cast<ErrorCode>(status));
  return "unknown";
}

sot_status sot_set_threads(int n) {
  return guarded([n] { Eigen::setNbThreads(n > 0 ? n : 0); });
}

sot_status sot_options_create(sot_options** out) {
  if (!out) return fail(SOT_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([out] { *out = new sot_options{}; });
}

void sot_options_destroy(sot_options* opts) { delete opts; }

sot_status sot_options_set(sot_options* opts, const char* key, const char* value) {
  if (!opts || !key || !value) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { set_option(opts->opt, key, value); });
}

sot_status sot_run(const char* command, const sot_options* opts, sot_report** out) {
  if (!command || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const RunOptions o = opts ? opts->opt : RunOptions{};
    *out = new sot_report{run_command(command, o)};
  });
}

void sot_report_destroy(sot_report* report) { delete report; }
const char* sot_report_json(const sot_report* report) { return report ? report->report.json.c_str() : ""; }
const char* sot_report_csv(const sot_report* report) { return report ? report->report.csv.c_str() : ""; }
int sot_report_passed(const sot_report* report) { return report && report->report.passed ? 1 : 0; }

sot_status sot_mesh_open(const char* spec, sot_mesh** out) {
  if (!spec || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new sot_mesh{resolve_mesh(spec)}; });
}

void sot_mesh_destroy(sot_mesh* mesh) { delete mesh; }

sot_status sot_mesh_counts(const sot_mesh* mesh, int* vertices, int* triangles, int* edges) {
  if (!mesh) return fail(SOT_ERR_INVALID_ARGUMENT, "null mesh");
  if (vertices) *vertices = static_cast<int>(mesh->mesh->vertices().size());
  if (triangles) *triangles = static_cast<int>(mesh->mesh->triangles().size());
  if (edges) *edges = static_cast<int>(mesh->mesh->edges().size());
  return SOT_OK;
}

sot_status sot_bform_read(const char* json_path, const sot_mesh* mesh, sot_bform** out) {
  if (!json_path || !mesh || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new sot_bform{bform_from_json(read_text(json_path), mesh->mesh)}; });
}

sot_status sot_bform_interpolate(const sot_mesh* mesh, int degree, int smoothness, const char* field,
                                 sot_bform** out) {
  if (!mesh || !field || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto space = std::make_shared<const SplineSpace>(mesh->mesh, degree, smoothness);
    *out = new sot_bform{interpolate(space, parse_field(field))};
  });
}

void sot_bform_destroy(sot_bform* bform) { delete bform; }

sot_status sot_bform_eval(const sot_bform* bform, double x, double y, double out[6]) {
  if (!bform || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto loc = bform->u.space().mesh().locate({x, y}, 1e-9);
    if (!loc) throw Error(ErrorCode::kOutOfDomain, "point lies outside the mesh");
    static constexpr int orders[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    for (int i = 0; i < 6; ++i) out[i] = eval_bform_at(bform->u, *loc, orders[i][0], orders[i][1]);
  });
}

sot_status sot_image_read(const char* path, sot_image** out) {
  if (!path || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new sot_image{read_pnm_file(path)}; });
}

sot_status sot_image_write(const sot_image* image, const char* path, int ascii) {
  if (!image || !path) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { write_pnm_file(image->img, path, ascii != 0); });
}

void sot_image_destroy(sot_image* image) { delete image; }

sot_status sot_image_size(const sot_image* image, int* width, int* height, int* channels) {
  if (!image) return fail(SOT_ERR_INVALID_ARGUMENT, "null image");
  if (width) *width = image->img.width;
  if (height) *height = image->img.height;
  if (channels) *channels = image->img.channels;
  return SOT_OK;
}

sot_status sot_image_psnr(const sot_image* a, const sot_image* b, double* out) {
  if (!a || !b || !out) return fail(SOT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = psnr(a->img, b->img); });
}

}  // extern "C"
