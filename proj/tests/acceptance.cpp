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

// Runs the acceptance checks and prints one PASS/FAIL line per criterion.
// Usage: splineot_acceptance [--only N[,N...]] [--extended]
// --extended runs the four-Gaussian problem at degree 12 instead of 8.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "poly.hpp"
#include "splineot/densities.hpp"
#include "splineot/error.hpp"
#include "splineot/imaging.hpp"
#include "splineot/pipeline.hpp"
#include "splineot/transport.hpp"

using namespace splineot;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Criteria whose failure is documented and expected; they are still printed
// as FAIL but do not change the exit status.
const std::set<std::string> kKnownFailures = {"7b"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int column(const BenchTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return static_cast<int>(i);
  throw Error(ErrorCode::kInvalidArgument, "bench table " + t.name + " has no column " + name);
}

bool all_true(const BenchTable& t, const std::string& name) {
  const int c = column(t, name);
  for (const auto& r : t.rows)
    if (r.cells[c] != "true") return false;
  return true;
}

// Shared state: later criteria reuse the solves of earlier ones.
struct Runs {
  std::vector<BenchTable> mae_tables;   // table1, table2
  std::optional<BenchTable> table3, table4;
  std::vector<bool> oracle_diag, oracle_brenier;
  std::optional<bool> fisheye_brenier;
  bool extended = false;
};

bool brenier(const TransportCertificates& c, const StarDomain& W) {
  return c.convexity_min_eig >= -1e-4 && c.boundary_match_error <= 1e-2 * W.diameter() && c.coverage >= 0.99 &&
         c.residual_rmse <= 1e-2;
}

Outcome criterion1(Runs&) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOptions o;
  o.mesh = "unit-square:8";
  o.degree = 8;
  o.smoothness = 2;
  const RunReport r = run_poisson(o);
  // Independent check on a 101^2 grid.
  const json j = json::parse(r.json);
  const auto sp = std::make_shared<const SplineSpace>(resolve_mesh("unit-square:8"), 8, 2);
  constexpr double pi = std::numbers::pi;
  const PoissonResult pr = poisson_solve(
      sp, [](Point2 p) { return 2 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y); }, [](Point2) { return 0.0; });
  double s2 = 0.0;
  int n = 0;
  for (int a = 0; a <= 100; ++a)
    for (int b = 0; b <= 100; ++b) {
      const Point2 p{a / 100.0, b / 100.0};
      const double e = eval_bform(pr.u, p, 0, 0) - std::sin(pi * p.x) * std::sin(pi * p.y);
      s2 += e * e;
      ++n;
    }
  const double rmse = std::sqrt(s2 / n);
  const double t = seconds_since(t0);
  const int tris = sp->mesh().triangle_count();
  return {rmse <= 1e-7 && t <= 30.0 && pr.report.conditioning == Conditioning::kOk,
          "rmse " + fmt("%.3e", rmse) + " on 101^2, " + std::to_string(tris) + " triangles, " + fmt("%.1f s", t)};
}

Outcome criterion2(Runs& runs) {
  std::string detail;
  bool ok = true;
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  BenchTable t = run_bench_table("table1");
  const double per_domain = seconds_since(t0) / static_cast<double>(t.rows.size());
  const int rc = column(t, "rmse"), dc = column(t, "domain");
  bool nonconvex = false;
  for (const auto& r : t.rows) {
    ok = ok && r.pass;
    worst = std::max(worst, std::stod(r.cells[rc]));
    if (r.cells[dc] == "lshape" || r.cells[dc] == "moon") nonconvex = nonconvex || r.pass;
  }
  ok = ok && nonconvex && per_domain <= 120.0;
  detail = std::to_string(t.rows.size()) + " domains, worst rmse " + fmt("%.3e", worst) + ", " +
           fmt("%.1f s", per_domain) + " per domain";
  runs.mae_tables.push_back(std::move(t));
  return {ok, detail};
}

Outcome criterion3(Runs& runs) {
  BenchTable t = run_bench_table("table2");
  const double rmse = std::stod(t.rows.at(0).cells[column(t, "rmse")]);
  const bool ok = t.passed() && rmse <= 1e-3;
  runs.mae_tables.push_back(std::move(t));
  return {ok, "rmse " + fmt("%.3e", rmse) + " (reference 3.54e-05)"};
}

Outcome criterion4(Runs& runs) {
  const auto t0 = std::chrono::steady_clock::now();
  runs.table3 = run_bench_table("table3");
  const double t = seconds_since(t0);
  const BenchTable& tb = *runs.table3;
  std::string detail;
  bool ok = t <= 600.0;
  const int dc = column(tb, "degree"), mc = column(tb, "max_error"), lc = column(tb, "l2_error"),
            sc = column(tb, "residual_sup");
  for (const auto& r : tb.rows) {
    const int D = std::stoi(r.cells[dc]);
    const double mx = std::stod(r.cells[mc]), l2 = std::stod(r.cells[lc]), sup = std::stod(r.cells[sc]);
    ok = ok && (D < 8 ? (mx <= 1e-2 && sup <= 0.5) : (mx <= 1e-3 && l2 <= 1e-4));
    detail += "D=" + r.cells[dc] + " max " + fmt("%.2e", mx) + " l2 " + fmt("%.2e", l2) + " sup " + fmt("%.2e", sup) + "; ";
  }
  return {ok, detail + fmt("%.0f s", t)};
}

Outcome criterion5(Runs& runs) {
  struct Oracle {
    const char* name;
    Point2 wlo, whi;
    double f;
    std::function<Point2(Point2)> map;
    double cost;
  };
  const Point2 c{0.5, 0.5};
  const std::vector<Oracle> oracles = {
      {"translation", {1, 0}, {2, 1}, 1.0, [](Point2 p) { return p + Point2{1, 0}; }, 1.0},
      {"scaling", {-0.5, -0.5}, {1.5, 1.5}, 4.0, [c](Point2 p) { return c + 2.0 * (p - c); }, 2.0 / 3.0}};
  bool ok = true;
  std::string detail;
  for (const Oracle& o : oracles) {
    TransportProblem p;
    p.mesh = resolve_mesh("unit-square:4");
    p.V = make_star_domain(shapes::rectangle({0, 0}, {1, 1}));
    p.W = make_star_domain(shapes::rectangle(o.wlo, o.whi));
    p.densities = {Density::constant(o.f), Density::constant(1.0)};
    const TransportSolution s = solve_transport_problem(p, TransportConfig{});
    const double err = map_error_sup(s.u, o.map, 51);
    const double rel = std::abs(s.certificates.cost - o.cost) / o.cost;
    ok = ok && err <= 1e-3 && rel <= 1e-4;
    runs.oracle_diag.push_back(iteration_diagnostics(s.trace, p.densities).ok());
    runs.oracle_brenier.push_back(brenier(s.certificates, p.W));
    if (!detail.empty()) detail += "; ";
    detail += std::string(o.name) + " map " + fmt("%.2e", err) + " cost rel " + fmt("%.2e", rel);
  }
  return {ok, detail};
}

Outcome criterion6(Runs& runs) {
  int solves = 0, good = 0;
  for (const auto& t : runs.mae_tables) {
    const int c = column(t, "diagnostics_ok");
    for (const auto& r : t.rows) {
      ++solves;
      good += r.cells[c] == "true";
    }
  }
  if (runs.table3) {
    const int c = column(*runs.table3, "diagnostics_ok");
    for (const auto& r : runs.table3->rows) {
      ++solves;
      good += r.cells[c] == "true";
    }
  }
  for (bool d : runs.oracle_diag) {
    ++solves;
    good += d;
  }
  return {solves > 0 && good == solves,
          std::to_string(good) + "/" + std::to_string(solves) + " iterative solves satisfy all three bounds"};
}

void run_table4(Runs& runs) {
  if (runs.table4) return;
  RunOptions o;
  if (runs.extended) {
    o.degree = 12;
    o.mesh = "square:8";
  }
  runs.table4 = run_bench_table("table4", o);
}

Outcome criterion7a(Runs& runs) {
  run_table4(runs);
  int solves = 0, good = 0;
  std::string failed;
  auto count = [&](bool b, const std::string& what) {
    ++solves;
    good += b;
    if (!b) failed += " " + what;
  };
  if (runs.table3) {
    const int c = column(*runs.table3, "brenier_ok"), dc = column(*runs.table3, "degree");
    for (const auto& r : runs.table3->rows) count(r.cells[c] == "true", "table3/D" + r.cells[dc]);
  }
  for (std::size_t i = 0; i < runs.oracle_brenier.size(); ++i) count(runs.oracle_brenier[i], "oracle" + std::to_string(i));
  const BenchTable& t4 = *runs.table4;
  count(all_true(t4, "brenier_ok"), "table4");
  if (runs.fisheye_brenier) count(*runs.fisheye_brenier, "fisheye");
  const auto& r4 = t4.rows.at(0).cells;
  return {good == solves, std::to_string(good) + "/" + std::to_string(solves) +
                              " OT solves certified; table4 rmse " + r4[column(t4, "residual_rmse")] + " eig " +
                              r4[column(t4, "convexity_min_eig")] + " coverage " + r4[column(t4, "coverage")] +
                              (failed.empty() ? "" : "; failed:" + failed)};
}

Outcome criterion7b(Runs& runs) {
  run_table4(runs);
  const BenchTable& t4 = *runs.table4;
  const auto& r = t4.rows.at(0).cells;
  return {r[column(t4, "table_match")] == "true",
          "D=" + r[column(t4, "degree")] + " " + r[column(t4, "mesh")] + ": cost " + r[column(t4, "cost")] +
              " (reference 1.3115550), residual " + r[column(t4, "residual_rmse")] + " (reference 6.07e-03)"};
}

Outcome criterion8(Runs&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(8);
  bool ok = true;
  std::string detail;

  // H annihilates globally polynomial splines.
  const auto sp = std::make_shared<const SplineSpace>(resolve_mesh("square:3"), 8, 2);
  const SparseMatrix H = smoothness_matrix(*sp);
  double hk = 0.0;
  for (int i = 0; i < 100; ++i)
    hk = std::max(hk, (H * interpolate(sp, testing::random_poly(8, rng)).coeffs()).cwiseAbs().maxCoeff());
  ok = ok && hk <= 1e-10;
  detail += "H kernel " + fmt("%.1e", hk);

  // Derivatives against central differences of the spline itself.
  const BForm u = interpolate(sp, [](Point2 p) { return std::exp(0.5 * dot(p, p)) + std::sin(2 * p.x - p.y); });
  double fd = 0.0;
  std::uniform_real_distribution<double> U(-0.9, 0.9);
  for (int i = 0; i < 50; ++i) {
    const Point2 p{U(rng), U(rng)};
    const double h = 1e-6;
    const double dx = (eval_bform(u, p + Point2{h, 0}, 0, 0) - eval_bform(u, p - Point2{h, 0}, 0, 0)) / (2 * h);
    const double dy = (eval_bform(u, p + Point2{0, h}, 0, 0) - eval_bform(u, p - Point2{0, h}, 0, 0)) / (2 * h);
    const double ax = eval_bform(u, p, 1, 0), ay = eval_bform(u, p, 0, 1);
    fd = std::max({fd, std::abs(dx - ax) / std::max(1.0, std::abs(ax)), std::abs(dy - ay) / std::max(1.0, std::abs(ay))});
  }
  ok = ok && fd <= 1e-6;
  detail += ", FD " + fmt("%.1e", fd);

  // Polynomials of degree <= D integrate exactly.
  double ie = 0.0;
  for (int d = 0; d <= 8; ++d) {
    const auto poly = testing::random_poly(d, rng);
    const double exact = poly.box_integral({-1, -1}, {1, 1});
    ie = std::max(ie, std::abs(integral_bform(interpolate(sp, poly)) - exact) / std::max(1.0, std::abs(exact)));
  }
  ok = ok && ie <= 1e-10;
  detail += ", integration " + fmt("%.1e", ie);

  // Ray exits lie on the boundary; domain point counts match V + (D-1)E + C(D-1,2)T.
  const StarDomain L = make_star_domain(shapes::l_shape(), Point2{-0.5, -0.5});
  double ray = 0.0;
  for (int k = 0; k < 720; ++k) ray = std::max(ray, L.boundary_distance(ray_exit_point(L, 2 * std::numbers::pi * k / 720)));
  ok = ok && ray <= 1e-12;
  const Triangulation& m = sp->mesh();
  bool counts = true;
  for (int D : {1, 2, 5, 8}) {
    const std::size_t want = m.vertex_count() + (D - 1) * m.edges().size() + (D - 1) * (D - 2) / 2 * m.triangle_count();
    counts = counts && domain_points(m, D).points.size() == want;
  }
  ok = ok && counts;
  detail += ", ray " + fmt("%.1e", ray) + ", lattice counts " + (counts ? "ok" : "wrong");

  const double t = seconds_since(t0);
  ok = ok && t <= 60.0;
  return {ok, detail + ", " + fmt("%.1f s", t)};
}

void write_checkerboard(const std::string& path, int n) {
  RasterImage img(n, n, 1, {{-1, -1}, {1, 1}});
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) img.at(c, r) = ((c / 16 + r / 16) % 2) ? 0.9 : 0.15;
  write_pnm_file(img, path);
}

Outcome criterion9(Runs& runs) {
  const std::string src = "acceptance_checker.pgm";
  write_checkerboard(src, 256);

  RunOptions id;
  id.mesh = "square:4";
  id.image = src;
  id.potential = "identity";
  id.out = "acceptance_identity.pgm";
  const json ji = json::parse(run_warp(id).json);
  const double p = ji["psnr"].is_string() ? INFINITY : ji["psnr"].get<double>();

  RunOptions fe;
  fe.mesh = "disk:2";
  fe.target_domain = "square";
  fe.image = src;
  fe.f = "const:1";
  fe.width = 128;
  fe.height = 128;
  fe.out = "acceptance_fisheye.pgm";
  const json jf = json::parse(run_warp(fe).json);
  const double cov = jf["prefill_coverage"].get<double>();
  if (jf.contains("certificates")) runs.fisheye_brenier = jf["certificates"]["brenier_ok"].get<bool>();
  bool pgm = false;
  try {
    const RasterImage out = read_pnm_file(fe.out);
    pgm = out.width == 128 && out.height == 128 && out.channels == 1;
  } catch (const Error&) {
  }
  return {p >= 40.0 && cov >= 0.99 && pgm, "identity PSNR " + (std::isinf(p) ? std::string("inf") : fmt("%.1f dB", p)) +
                                                ", fisheye prefill coverage " + fmt("%.4f", cov) +
                                                (pgm ? ", PGM ok" : ", PGM invalid")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only;
  Runs runs;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--extended") == 0) {
      runs.extended = true;
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::string list = argv[++i];
      for (std::size_t a = 0, b; a < list.size(); a = b + 1) {
        b = list.find(',', a);
        if (b == std::string::npos) b = list.size();
        only.insert(list.substr(a, b - a));
      }
    } else {
      std::fprintf(stderr, "usage: %s [--only N[,N...]] [--extended]\n", argv[0]);
      return 2;
    }
  }
  // Order matters: 6 and 7a summarize the solves of 2-5 and 9.
  const std::vector<std::pair<std::string, std::function<Outcome(Runs&)>>> criteria = {
      {"1", criterion1}, {"2", criterion2}, {"3", criterion3}, {"4", criterion4}, {"5", criterion5},
      {"8", criterion8}, {"9", criterion9}, {"6", criterion6}, {"7a", criterion7a}, {"7b", criterion7b}};
  int unexpected = 0;
  for (const auto& [id, fn] : criteria) {
    const std::string base = id.substr(0, 1);
    if (!only.empty() && !only.count(id) && !only.count(base)) continue;
    Outcome o;
    try {
      o = fn(runs);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool known = kKnownFailures.count(id) > 0;
    std::printf("criterion %-3s %s  %s\n", id.c_str(), o.pass ? "PASS" : (known ? "FAIL (known)" : "FAIL"),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
