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

// Command-line front end. Talks to the solvers only through the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "splineot/splineot.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitAcceptance = 3;

int emit_error(const std::string& code, int status, const std::string& message) {
  const nlohmann::json j = {{"error", {{"code", code}, {"status", status}, {"message", message}}}};
  std::fprintf(stdout, "%s\n", j.dump(2).c_str());
  return kExitError;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key = value lines; [sections], blank lines and # comments are skipped and
// quoted values are unquoted.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos && line.find('"') > hash) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    for (char& c : key)
      if (c == '_') c = '-';
    out[key] = value;
  }
  return out;
}

struct Flag {
  const char* name;
  const char* help;
};

constexpr Flag kFlags[] = {
    {"mesh", "mesh: builtin spec (square[:n], unit-square[:n], lshape[:n], moon[:l], disk[:l], rect:...) or .node path"},
    {"domain", "source domain boundary (default: the mesh boundary)"},
    {"target-domain", "target domain W (default: the source domain)"},
    {"degree", "spline degree D"},
    {"smoothness", "smoothness r"},
    {"colloc-degree", "interior collocation degree D' (default D-2)"},
    {"f", "source density or right-hand side descriptor"},
    {"g", "target density descriptor (ot default: uniform of equal mass)"},
    {"bc", "Dirichlet boundary field descriptor"},
    {"exact", "exact solution field for error reports"},
    {"iters", "linear solves per stage"},
    {"stages", "stages of the subharmonic iteration"},
    {"outer-iters", "center matching outer iterations"},
    {"tol", "stopping tolerance"},
    {"out", "output file"},
    {"trace", "iteration trace CSV output"},
    {"image", "input PGM/PPM image (warp)"},
    {"potential", "stored potential JSON, or 'identity' (warp)"},
    {"width", "output raster width (warp)"},
    {"height", "output raster height (warp)"},
    {"floor", "density floor for image densities"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spline collocation solver for the Monge-Ampere equation and optimal transport", "splineot"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const Flag& f : kFlags) options[f.name] = app.add_option(std::string("--") + f.name, values[f.name], f.help);
  bool force = false;
  auto* force_opt = app.add_flag("--force", force, "allow degree/smoothness pairs below D >= 3r + 2");
  std::string config;
  app.add_option("--config", config, "TOML-style key = value file; flags override it");

  std::string table;
  app.add_subcommand("poisson", "solve -Lap u = f with Dirichlet data; writes the potential JSON");
  app.add_subcommand("mae", "Monge-Ampere with Dirichlet data by subharmonic iteration");
  app.add_subcommand("ot", "optimal transport by center matching");
  app.add_subcommand("warp", "push an image through a gradient map");
  auto* bench = app.add_subcommand("bench", "rerun a reference table and print CSV");
  bench->add_option("table", table, "table1, table2, table3 or table4")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "table3", "table4"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("usage", SOT_ERR_INVALID_ARGUMENT, e.what());
  }

  if (const char* env = std::getenv("SPLINE_OT_THREADS")) {
    if (sot_set_threads(std::atoi(env)) != SOT_OK)
      return emit_error(sot_status_name(SOT_ERR_INVALID_ARGUMENT), SOT_ERR_INVALID_ARGUMENT, sot_last_error());
  }

  std::map<std::string, std::string> merged;
  try {
    if (!config.empty()) merged = read_config(config);
  } catch (const std::exception& e) {
    return emit_error("io_error", SOT_ERR_IO, e.what());
  }
  for (const auto& [name, opt] : options)
    if (opt->count() > 0) merged[name] = values[name];
  if (force_opt->count() > 0) merged["force"] = force ? "true" : "false";

  sot_options* opts = nullptr;
  if (sot_options_create(&opts) != SOT_OK) return emit_error("internal", SOT_ERR_INTERNAL, sot_last_error());
  for (const auto& [key, value] : merged) {
    const sot_status s = sot_options_set(opts, key.c_str(), value.c_str());
    if (s != SOT_OK) {
      const int rc = emit_error(sot_status_name(s), s, sot_last_error());
      sot_options_destroy(opts);
      return rc;
    }
  }

  const std::string command = bench->parsed() ? "bench:" + table : app.get_subcommands().front()->get_name();
  sot_report* report = nullptr;
  const sot_status s = sot_run(command.c_str(), opts, &report);
  sot_options_destroy(opts);
  if (s != SOT_OK) return emit_error(sot_status_name(s), s, sot_last_error());

  const std::string csv = sot_report_csv(report);
  std::fputs(csv.empty() ? sot_report_json(report) : csv.c_str(), stdout);
  if (csv.empty()) std::fputc('\n', stdout);
  const bool passed = sot_report_passed(report) != 0;
  sot_report_destroy(report);
  return passed ? 0 : kExitAcceptance;
}
