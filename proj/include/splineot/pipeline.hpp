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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "splineot/mesh.hpp"

namespace splineot {

// Everything a subcommand can consume. Empty strings and non-positive numbers
// select the per-command defaults.
struct RunOptions {
  std::string mesh;
  std::string domain;
  std::string target_domain;
  int degree = 0;
  int smoothness = -1;
  int colloc_degree = 0;
  std::string f;
  std::string g;
  std::string bc;
  std::string exact;
  int iters = 0;
  int stages = 0;
  int outer_iters = 0;
  double tol = 0.0;
  bool force = false;
  std::string out;
  std::string trace;
  std::string image;
  std::string potential;
  int width = 0;
  int height = 0;
  double floor = 0.0;
  std::string base_dir;
};

struct RunReport {
  std::string json;  // machine-readable summary
  std::string csv;   // bench tables only
  bool passed = true;
};

// Mesh specs: square[:n], unit-square[:n], half-square[:n],
// rect:x0,y0,x1,y1[,nx,ny], lshape[:n], moon[:levels], disk[:levels], or a
// path to a .node file with its .ele sibling.
MeshPtr resolve_mesh(std::string_view spec, const std::string& base_dir = {});

// Domain specs: the shape names above, rect:x0,y0,x1,y1, oval[:a,b],
// polygon:n[,r], or a polyline file path.
StarDomain resolve_domain(std::string_view spec, const std::string& base_dir = {});

RunReport run_poisson(const RunOptions& opt);
RunReport run_mae(const RunOptions& opt);
RunReport run_ot(const RunOptions& opt);
RunReport run_warp(const RunOptions& opt);

struct BenchRow {
  std::vector<std::string> cells;
  bool pass = true;
};

struct BenchTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<BenchRow> rows;

  bool passed() const;
  std::string to_csv() const;
};

// Reruns one of the four reference experiments ("table1" .. "table4"). Only
// degree and mesh overrides are honoured.
BenchTable run_bench_table(std::string_view table, const RunOptions& opt = {});
RunReport run_bench(std::string_view table, const RunOptions& opt);

RunReport run_command(std::string_view command, const RunOptions& opt);

std::string format_g17(double v);

}  // namespace splineot
