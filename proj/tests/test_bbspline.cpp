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
#include <random>

#include "doctest.h"
#include "poly.hpp"
#include "splineot/assembly.hpp"
#include "splineot/bbspline.hpp"
#include "splineot/error.hpp"
#include "splineot/quadrature.hpp"

using namespace splineot;
using doctest::Approx;
using splineot::testing::random_poly;

namespace {

MeshPtr square_mesh(Point2 lo, Point2 hi, int n) {
  return std::make_shared<const Triangulation>(shapes::rectangle_mesh(lo, hi, n, n));
}

MeshPtr two_triangles() {
  return std::make_shared<const Triangulation>(
      Triangulation({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{{0, 1, 2}}, {{0, 2, 3}}}));
}

constexpr std::pair<int, int> kOrders[] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};

SpacePtr space_of(MeshPtr m, int D, int r, bool force = false) {
  return std::make_shared<const SplineSpace>(std::move(m), D, r, force);
}

}  // namespace

TEST_SUITE("bbspline") {
  TEST_CASE("lattice ordering and counts") {
    for (int n = 0; n <= 14; ++n) {
      const auto lat = lattice(n);
      REQUIRE(static_cast<int>(lat.size()) == lattice_size(n));
      for (int idx = 0; idx < lattice_size(n); ++idx) {
        CHECK(lat[idx].i + lat[idx].j + lat[idx].k == n);
        CHECK(lattice_index(n, lat[idx].i, lat[idx].j) == idx);
      }
    }
    CHECK(lattice(2)[0].i == 2);
  }

  TEST_CASE("degree and smoothness constraint") {
    CHECK_THROWS_AS(SplineSpace(two_triangles(), 7, 2), Error);
    CHECK_NOTHROW(SplineSpace(two_triangles(), 7, 2, true));
    CHECK_NOTHROW(SplineSpace(two_triangles(), 8, 2));
    CHECK_THROWS_AS(SplineSpace(two_triangles(), 4, -1), Error);
  }

  TEST_CASE("domain point counts") {
    const auto one = std::make_shared<const Triangulation>(Triangulation({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}}));
    CHECK(domain_points(*one, 2).points.size() == 6);
    CHECK(domain_points(*two_triangles(), 1).points.size() == 4);
    CHECK(domain_points(*two_triangles(), 3).points.size() == 16);
    const auto sq = shapes::rectangle_mesh({0, 0}, {1, 1}, 4, 4);
    for (int d = 1; d <= 6; ++d) {
      // V + (d-1) E + C(d-1, 2) T distinct points.
      const auto pts = domain_points(sq, d);
      const std::size_t expect = sq.vertex_count() + (d - 1) * sq.edge_count() + (d - 1) * (d - 2) / 2 * sq.triangle_count();
      CHECK(pts.points.size() == expect);
      CHECK(pts.interior.size() + pts.boundary.size() == expect);
    }
  }

  TEST_CASE("polynomial evaluation examples") {
    const auto sp = space_of(square_mesh({0, 0}, {1, 1}, 3), 4, 1, true);
    const BForm s = interpolate(sp, [](Point2 p) { return p.x * p.x + p.y * p.y; });
    CHECK(eval_bform(s, {0.3, 0.4}, 0, 0) == Approx(0.25).epsilon(1e-12));
    CHECK(eval_bform(s, {0.3, 0.4}, 2, 0) == Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(eval_bform(s, {0.3, 0.4}, 1, 1)) < 1e-11);
    CHECK_THROWS_AS(eval_bform(s, {2.0, 0.4}, 0, 0), Error);

    const BForm c = interpolate(sp, [](Point2 p) { return p.x * p.x * p.x * p.y; });
    CHECK(eval_bform(c, {0.5, 0.2}, 1, 1) == Approx(0.75).epsilon(1e-11));
  }

  TEST_CASE("linear coefficients are vertex values") {
    const auto sp = space_of(two_triangles(), 1, 0, true);
    Eigen::VectorXd c(6);
    c << 1, 2, 3, 4, 5, 6;
    const BForm s(sp, c);
    for (int t = 0; t < 2; ++t)
      for (int v = 0; v < 3; ++v) {
        const auto loc = Location{t, {v == 0 ? 1.0 : 0.0, v == 1 ? 1.0 : 0.0, v == 2 ? 1.0 : 0.0}};
        const int slot = sp->local_index(v == 0 ? 1 : 0, v == 1 ? 1 : 0, v == 2 ? 1 : 0);
        CHECK(eval_bform_at(s, loc, 0, 0) == Approx(c[t * 3 + slot]));
      }
  }

  TEST_CASE("Hessian summaries") {
    const auto sp = space_of(square_mesh({-1, -1}, {1, 1}, 4), 8, 2);
    const BForm q = interpolate(sp, [](Point2 p) { return 0.5 * dot(p, p); });
    const HessianInfo h = hessian_det_lap(q, {0.2, -0.7});
    CHECK(h.det == Approx(1.0));
    CHECK(h.lap == Approx(2.0));
    CHECK(h.grad.x == Approx(0.2));
    CHECK(h.grad.y == Approx(-0.7));
    const BForm saddle = interpolate(sp, [](Point2 p) { return p.x * p.x - p.y * p.y; });
    CHECK(hessian_det_lap(saddle, {0.1, 0.3}).det == Approx(-4.0));
    CHECK(std::abs(hessian_det_lap(saddle, {0.1, 0.3}).lap) < 1e-10);
    CHECK(min_eigenvalue(2, 0, -2) == Approx(-2.0));

    const BForm e = interpolate(sp, [](Point2 p) { return std::exp(0.5 * dot(p, p)); });
    for (Point2 p : {Point2{0.1, 0.2}, Point2{-0.6, 0.45}, Point2{0.77, -0.3}}) {
      const double r = dot(p, p);
      CHECK(std::abs(hessian_det_lap(e, p).det - (1 + r) * std::exp(r)) < 1e-6);
    }
  }

  TEST_CASE("basis rows") {
    const auto sp = space_of(square_mesh({0, 0}, {1, 1}, 2), 5, 1);
    const SparseRow v = basis_derivative_row(*sp, {0.5, 0.5}, 0, 0);
    int ones = 0, zeros = 0;
    for (double x : v.values) {
      ones += std::abs(x - 1.0) < 1e-14;
      zeros += std::abs(x) < 1e-14;
    }
    CHECK(ones == 1);
    CHECK(ones + zeros == static_cast<int>(v.values.size()));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 50; ++i) {
      const SparseRow r = basis_derivative_row(*sp, {u(rng), u(rng)}, 0, 0);
      double sum = 0.0;
      for (double x : r.values) sum += x;
      CHECK(sum == Approx(1.0).epsilon(1e-13));
    }
    const BForm q = interpolate(sp, [](Point2 p) { return p.x * p.x + p.y * p.y; });
    CHECK(basis_derivative_row(*sp, {0.3, 0.6}, 2, 0).dot(q.coeffs()) == Approx(2.0));
    const BForm aff = interpolate(sp, [](Point2 p) { return 3 * p.x - 2 * p.y + 1; });
    const double lap = basis_derivative_row(*sp, {0.3, 0.6}, 2, 0).dot(aff.coeffs()) +
                       basis_derivative_row(*sp, {0.3, 0.6}, 0, 2).dot(aff.coeffs());
    CHECK(std::abs(lap) < 1e-11);
  }

  TEST_CASE("integration") {
    const auto m = square_mesh({0, 0}, {1, 1}, 1);
    const auto sp = space_of(m, 4, 1, true);
    CHECK(integral_bform(BForm(sp, Eigen::VectorXd::Ones(sp->dimension()))) == Approx(1.0));
    CHECK(integral_bform(interpolate(sp, [](Point2 p) { return p.x; })) == Approx(0.5));
    CHECK(integral_bform(interpolate(sp, [](Point2 p) { return p.x * p.x * p.y * p.y; })) == Approx(1.0 / 9.0));
    const auto l = std::make_shared<const Triangulation>(shapes::l_shape_mesh(2));
    CHECK(integral_bform(BForm(space_of(l, 3, 0), Eigen::VectorXd::Ones(space_of(l, 3, 0)->dimension()))) ==
          Approx(3.0));
  }

  TEST_CASE("polynomial reproduction, derivatives and integrals") {
    std::mt19937 rng(2026);
    const Point2 lo{-1, -0.5}, hi{1, 1.5};
    const auto m = square_mesh(lo, hi, 3);
    for (int D : {2, 5, 8, 11}) {
      const auto sp = space_of(m, D, 0);
      for (int trial = 0; trial < 5; ++trial) {
        const auto p = random_poly(D, rng);
        const BForm s = interpolate(sp, p);
        const double ref = p.box_integral(lo, hi);
        CHECK(std::abs(integral_bform(s) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
        for (Point2 x : {Point2{0.13, 0.29}, Point2{-0.71, 1.2}, Point2{0.95, -0.4}})
          for (const auto& [dx, dy] : kOrders) {
            const double e = p.eval(x, dx, dy);
            CHECK(std::abs(eval_bform(s, x, dx, dy) - e) <= 1e-10 * std::max(1.0, std::abs(e)) * (1 + D * D));
          }
      }
    }
  }

  TEST_CASE("derivatives agree with finite differences") {
    std::mt19937 rng(11);
    const auto sp = space_of(square_mesh({0, 0}, {1, 1}, 3), 8, 2);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Eigen::VectorXd c(sp->dimension());
    for (auto& v : c) v = coef(rng);
    const BForm s(sp, c);
    const double h = 1e-4;
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 40; ++i) {
      // Stay inside one triangle so the piecewise data is smooth near x.
      const Point2 x{u(rng), u(rng)};
      const auto loc = sp->mesh().locate(x);
      const auto b = loc->bary;
      if (std::min({b[0], b[1], b[2]}) < 1e-2) continue;
      auto f = [&](Point2 p, int dx, int dy) { return eval_bform(s, p, dx, dy); };
      // Fourth-order central differences along a direction.
      auto diff = [&](Point2 dir, int dx, int dy) {
        return (-f(x + 2 * h * dir, dx, dy) + 8 * f(x + h * dir, dx, dy) - 8 * f(x - h * dir, dx, dy) +
                f(x - 2 * h * dir, dx, dy)) /
               (12 * h);
      };
      const double fx = diff({1, 0}, 0, 0);
      const double fxy = diff({0, 1}, 1, 0);
      const double fyy = diff({0, 1}, 0, 1);
      CHECK(std::abs(fx - f(x, 1, 0)) <= 1e-6 * std::max(1.0, std::abs(fx)));
      CHECK(std::abs(fxy - f(x, 1, 1)) <= 1e-6 * std::max(1.0, std::abs(fxy)));
      CHECK(std::abs(fyy - f(x, 0, 2)) <= 1e-6 * std::max(1.0, std::abs(fyy)));
    }
  }

  TEST_CASE("JSON round trip") {
    const auto m = square_mesh({0, 0}, {1, 1}, 2);
    const auto sp = space_of(m, 5, 1);
    const BForm s(sp, Eigen::VectorXd::Random(sp->dimension()));
    const BForm back = bform_from_json(bform_to_json(s), m);
    CHECK((back.coeffs() - s.coeffs()).norm() == 0.0);
    CHECK(back.space().degree() == 5);
    CHECK_THROWS_AS(bform_from_json(bform_to_json(s), square_mesh({0, 0}, {1, 1}, 3)), Error);
    CHECK_THROWS_AS(bform_from_json("{\"degree\": 5", m), Error);
  }
}

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre exactness") {
    for (int n = 1; n <= 12; ++n) {
      const GaussRule g = gauss_legendre(n);
      for (int k = 0; k <= 2 * n - 1; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
        CHECK(s == Approx(1.0 / (k + 1)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("triangle rule integrates polynomials over meshes") {
    std::mt19937 rng(3);
    const Point2 lo{0, 0}, hi{2, 1};
    const auto m = shapes::rectangle_mesh(lo, hi, 3, 2);
    for (int n = 1; n <= 8; ++n) {
      const auto p = random_poly(2 * n - 2, rng);
      const double q = integrate_mesh(m, [&](int, const Barycentric&, Point2 x) { return p(x); }, triangle_rule(n));
      CHECK(q == Approx(p.box_integral(lo, hi)).epsilon(1e-12));
    }
  }

  TEST_CASE("star polygon fan integration") {
    const auto sq = shapes::rectangle({-1, -1}, {1, 1});
    CHECK(integrate_star_polygon(sq, {0, 0}, [](Point2 p) { return p.x * p.x; }) == Approx(4.0 / 3.0));
  }
}
