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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "splineot/transport.hpp"

using namespace splineot;
using doctest::Approx;

namespace {

StarDomain box(Point2 lo, Point2 hi) { return make_star_domain(shapes::rectangle(lo, hi)); }

MeshPtr box_mesh(Point2 lo, Point2 hi, int n) {
  return std::make_shared<const Triangulation>(shapes::rectangle_mesh(lo, hi, n, n));
}

TransportConfig fast_config() {
  TransportConfig cfg;
  cfg.degree = 5;
  cfg.smoothness = 1;
  cfg.residual_grid = 101;
  return cfg;
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("pretranslate") {
    const Pretranslation same = pretranslate(box({0, 0}, {1, 1}), box({0, 0}, {1, 1}));
    CHECK(same.shift.x == 0.0);
    CHECK(same.shift.y == 0.0);
    CHECK(same.linear_cost == 0.0);

    const Pretranslation a = pretranslate(box({-0.5, -0.5}, {0.5, 0.5}), box({0, -1}, {2, 1}));
    CHECK(a.moved_source);
    CHECK(a.shift.x == Approx(1.0));
    CHECK(a.shift.y == Approx(0.0).epsilon(1e-12));
    CHECK(a.linear_cost == Approx(1.0));

    const Pretranslation b = pretranslate(box({-1.5, -1.5}, {1.5, 1.5}), box({-0.5, 1.5}, {0.5, 2.5}));
    CHECK_FALSE(b.moved_source);
    CHECK(b.shift.x == Approx(0.0).epsilon(1e-12));
    CHECK(b.shift.y == Approx(-2.0));
    CHECK(b.linear_cost == Approx(4.0));
  }

  TEST_CASE("center matching targets") {
    const StarDomain disk = make_star_domain(shapes::regular_polygon(4096, 2.0));
    const auto t = center_match_targets(disk, {{{1, 0}, {0.5, 0}}});
    CHECK(t[0].x == Approx(2.0));
    CHECK(std::abs(t[0].y) < 1e-12);

    const auto fb = center_match_targets(disk, {{{0, 1}, {0, 0}}});
    const Point2 up = ray_exit_point(disk, std::numbers::pi / 2);
    CHECK(distance(fb[0], up) < 1e-12);

    const StarDomain sq = box({-1, -1}, {1, 1});
    const auto c = center_match_targets(sq, {{{0.2, 0.2}, {3, 3}}});
    CHECK(c[0].x == Approx(1.0));
    CHECK(c[0].y == Approx(1.0));
    CHECK(sq.boundary_distance(c[0]) < 1e-12);
  }

  TEST_CASE("constant target density") {
    const auto m = shapes::rectangle_mesh({0, 0}, {1, 1}, 2, 2);
    CHECK(constant_target_density(Density::constant(1.0), m, box({0, 0}, {2, 2})) == Approx(0.25));
    CHECK(constant_target_density(Density::constant(2.0), m, box({0, 0}, {1, 1})) == Approx(2.0));
  }

  TEST_CASE("transport cost") {
    const auto sp = std::make_shared<const SplineSpace>(box_mesh({0, 0}, {1, 1}, 2), 5, 1);
    const Density one = Density::constant(1.0);
    CHECK(std::abs(transport_cost(interpolate(sp, [](Point2 p) { return 0.5 * dot(p, p); }), one)) < 1e-14);
    CHECK(transport_cost(interpolate(sp, [](Point2 p) { return 0.5 * dot(p, p) + p.x; }), one) == Approx(1.0));
  }

  TEST_CASE("translation oracle") {
    TransportProblem P;
    P.mesh = box_mesh({0, 0}, {1, 1}, 4);
    P.V = box({0, 0}, {1, 1});
    P.W = box({1, 0}, {2, 1});
    P.densities = {Density::constant(1.0), Density::constant(1.0)};
    const TransportSolution s = solve_transport_problem(P, fast_config());
    CHECK(map_error_sup(s.u, [](Point2 p) { return p + Point2{1, 0}; }) <= 1e-3);
    CHECK(std::abs(s.certificates.mean_value) <= 1e-8);
    CHECK(s.certificates.cost == Approx(1.0).epsilon(1e-6));
    // The shifted problem is the identity, so the whole cost is the linear term.
    CHECK(transport_cost(s.u, P.densities.f) == Approx(s.shift.linear_cost).epsilon(1e-6));
    CHECK(s.certificates.coverage >= 0.99);
    CHECK(s.certificates.convexity_min_eig >= -1e-4);
  }

  TEST_CASE("scaling oracle") {
    TransportProblem P;
    P.mesh = box_mesh({0, 0}, {1, 1}, 4);
    P.V = box({0, 0}, {1, 1});
    P.W = box({-0.5, -0.5}, {1.5, 1.5});
    P.densities = {Density::constant(4.0), Density::constant(1.0)};
    const TransportSolution s = solve_transport_problem(P, fast_config());
    const Point2 c{0.5, 0.5};
    CHECK(map_error_sup(s.u, [&](Point2 p) { return c + 2.0 * (p - c); }) <= 1e-3);
    CHECK(s.certificates.residual_rmse <= 1e-6);
    CHECK(s.certificates.boundary_match_error <= 1e-2 * P.W.diameter());
  }

  TEST_CASE("mass imbalance is balanced by scaling g") {
    TransportProblem P;
    P.mesh = box_mesh({0, 0}, {1, 1}, 4);
    P.V = box({0, 0}, {1, 1});
    P.W = box({0, 0}, {1, 1});
    P.densities = {Density::constant(1.0), Density::constant(2.0)};
    const TransportSolution s = solve_transport_problem(P, fast_config());
    CHECK(s.mass_ratio == Approx(0.5));
    CHECK(map_error_sup(s.u, [](Point2 p) { return p; }) <= 1e-6);
  }
}
