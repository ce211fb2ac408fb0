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
#include <optional>
#include <string>

#include "doctest.h"
#include "splineot/densities.hpp"
#include "splineot/error.hpp"
#include "splineot/imaging.hpp"

using namespace splineot;
using doctest::Approx;

namespace {

RasterImage test_pattern(int w, int h, BoundingBox box) {
  RasterImage img(w, h, 1, box);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const Point2 p = img.frame.pixel_center(c, r);
      img.at(c, r) = 0.5 + 0.25 * std::sin(3 * p.x) * std::cos(2 * p.y);
    }
  return img;
}

SpacePtr space_on(Point2 lo, Point2 hi, int n) {
  return std::make_shared<const SplineSpace>(
      std::make_shared<const Triangulation>(shapes::rectangle_mesh(lo, hi, n, n)), 5, 1, true);
}

}  // namespace

TEST_SUITE("imaging") {
  TEST_CASE("P2 values") {
    const RasterImage img = read_pnm("P2\n# comment\n2 2\n255\n0 85\n170 255\n");
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 2);
    CHECK(img.at(0, 0) == 0.0);
    CHECK(img.at(1, 0) == Approx(1.0 / 3));
    CHECK(img.at(0, 1) == Approx(2.0 / 3));
    CHECK(img.at(1, 1) == 1.0);
  }

  TEST_CASE("round trips") {
    RasterImage img(5, 3, 3);
    for (std::size_t i = 0; i < img.samples.size(); ++i) img.samples[i] = static_cast<double>((i * 37) % 256) / 255.0;
    for (bool ascii : {false, true}) {
      const RasterImage back = read_pnm(write_pnm(img, ascii));
      CHECK(back.channels == 3);
      CHECK(back.samples == img.samples);
    }
    RasterImage deep(2, 1, 1);
    deep.maxval = 65535;
    deep.samples = {1234.0 / 65535, 1.0};
    CHECK(read_pnm(write_pnm(deep)).samples == deep.samples);
  }

  TEST_CASE("malformed input") {
    auto code_of = [](const std::string& s) {
      try {
        read_pnm(s);
      } catch (const Error& e) {
        return std::optional<ErrorCode>(e.code());
      }
      return std::optional<ErrorCode>{};
    };
    CHECK(code_of(std::string("P5\n2 2\n255\n") + std::string(3, '\x01')) == std::optional(ErrorCode::kParse));
    CHECK(code_of("P2\n2 2\n255\n0 1 2\n") == std::optional(ErrorCode::kParse));
    CHECK(code_of("P2\n1 1\n10\n11\n") == std::optional(ErrorCode::kParse));
    CHECK(code_of("P7\n1 1\n255\n0\n") == std::optional(ErrorCode::kParse));
    CHECK_THROWS_AS(read_pnm_file("/nonexistent/x.pgm"), Error);
  }

  TEST_CASE("geo frame") {
    GeoFrame f{{{-1, -2}, {3, 2}}, 8, 4};
    const Point2 p = f.pixel_center(0, 0);
    CHECK(p.x == Approx(-0.75));
    CHECK(p.y == Approx(1.5));
    for (Point2 q : {Point2{0.3, -1.1}, Point2{2.9, 1.9}}) {
      const Point2 px = f.to_pixel(q);
      CHECK(distance(f.to_domain(px.x, px.y), q) < 1e-12);
    }
  }

  TEST_CASE("luminance and bilinear sampling") {
    RasterImage rgb(1, 1, 3);
    rgb.samples = {1.0, 0.0, 0.0};
    CHECK(luminance(rgb).samples[0] == Approx(0.299));
    RasterImage img(2, 1, 1);
    img.samples = {0.0, 1.0};
    CHECK(sample_bilinear(img, {0.5, 0.5}) == Approx(0.5));
    CHECK(sample_bilinear(img, {0.0, 0.5}) == Approx(0.0));
    CHECK(sample_bilinear(img, {0.75, 0.5}) == Approx(1.0));
  }

  TEST_CASE("density from image") {
    RasterImage black(4, 4, 1);
    const Density f = density_from_image(black, 0.1);
    CHECK(f({0.3, 0.7}) == Approx(0.1));
    RasterImage white(4, 4, 1);
    std::fill(white.samples.begin(), white.samples.end(), 1.0);
    CHECK(density_from_image(white, 0.1)({0.6, 0.2}) == Approx(1.0));
    RasterImage pat = test_pattern(6, 5, {{0, 0}, {1, 1}});
    const Density g = density_from_image(pat, 0.05);
    CHECK(g(pat.frame.pixel_center(2, 3)) == Approx(std::max(0.05, pat.at(2, 3))));
    CHECK_THROWS_AS(density_from_image(pat, 0.0), Error);
    const StarDomain mask = make_star_domain(shapes::rectangle({0, 0}, {0.5, 0.5}));
    CHECK(density_from_image(white, 0.2, &mask)({0.9, 0.9}) == Approx(0.2));
  }

  TEST_CASE("identity warp") {
    const BoundingBox box{{-1, -1}, {1, 1}};
    const RasterImage src = test_pattern(64, 64, box);
    const BForm u = interpolate(space_on({-1, -1}, {1, 1}, 4), [](Point2 p) { return 0.5 * dot(p, p); });
    const StarDomain W = make_star_domain(shapes::rectangle({-1, -1}, {1, 1}));
    const WarpResult w = forward_warp(src, u, W, 64, 64);
    CHECK(psnr(w.image, src) >= 40.0);
    CHECK(w.prefill_coverage >= 0.99);
    CHECK(w.outside_fraction == 0.0);
    double in = 0.0, out = 0.0;
    for (double v : src.samples) in += v;
    for (double v : w.image.samples) out += v;
    CHECK(std::abs(out - in) <= 0.01 * in);
    CHECK(w.splatted_mass == Approx(in));
  }

  TEST_CASE("translation warp shifts the picture") {
    const RasterImage src = test_pattern(32, 32, {{0, 0}, {1, 1}});
    const BForm u = interpolate(space_on({0, 0}, {1, 1}, 2), [](Point2 p) { return 0.5 * dot(p, p) + p.x; });
    const StarDomain W = make_star_domain(shapes::rectangle({1, 0}, {2, 1}));
    const WarpResult w = forward_warp(src, u, W, 32, 32);
    CHECK(w.image.frame.box.lo.x == Approx(1.0));
    double worst = 0.0;
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c) worst = std::max(worst, std::abs(w.image.at(c, r) - src.at(c, r)));
    CHECK(worst < 1e-12);
  }

  TEST_CASE("bad maps are rejected") {
    const RasterImage src = test_pattern(16, 16, {{0, 0}, {1, 1}});
    const BForm u = interpolate(space_on({0, 0}, {1, 1}, 2), [](Point2 p) { return dot(p, p); });
    const StarDomain W = make_star_domain(shapes::rectangle({0, 0}, {1, 1}));
    try {
      forward_warp(src, u, W, 16, 16);
      FAIL("expected a map quality error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMapQuality);
    }
  }

  TEST_CASE("identical images have infinite PSNR") {
    const RasterImage a = test_pattern(8, 8, {{0, 0}, {1, 1}});
    CHECK(std::isinf(psnr(a, a)));
  }
}

TEST_SUITE("densities") {
  TEST_CASE("gaussian density") {
    const BoundingBox box{{-2, -2}, {2, 2}};
    CHECK(gaussian_density(0, 0, 0, 0, box)({0.3, -1.2}) == Approx(1.0));
    const Density g = gaussian_density(-1, -1, 0, 0, box);
    CHECK(g({0, 0}) == Approx(1.0));
    CHECK(g({1, 0}) == Approx(0.367879).epsilon(1e-6));
    CHECK(g.upper() == Approx(1.0));
    CHECK(g.lower() == Approx(std::exp(-8.0)));
  }

  TEST_CASE("oscillatory profile") {
    constexpr double pi = std::numbers::pi;
    CHECK(bfo_q(0) == Approx(1 / (256 * pi * pi * pi) + 1 / (32 * pi)));
    CHECK(bfo_q(0) == Approx(1.00731e-2).epsilon(1e-5));
    const Point2 g0 = bfo_exact_map({0, 0});
    CHECK(std::abs(g0.x) < 1e-15);
    CHECK(std::abs(g0.y) < 1e-15);
    const double h = 1e-5;
    for (double z : {-0.4, 0.1, 0.33}) {
      CHECK(bfo_q(z, 1) == Approx((bfo_q(z + h) - bfo_q(z - h)) / (2 * h)).epsilon(1e-6));
      CHECK(bfo_q(z, 2) == Approx((bfo_q(z + h, 1) - bfo_q(z - h, 1)) / (2 * h)).epsilon(1e-6));
    }
    const Density f = bfo_density();
    CHECK(f.lower() > 0.0);
    CHECK(f({0.2, -0.3}) <= f.upper());
  }

  TEST_CASE("descriptor parsing") {
    const DescriptorContext ctx{{{0, 0}, {1, 1}}, ""};
    CHECK(parse_density("const:2.5", ctx)({0.5, 0.5}) == 2.5);
    CHECK(parse_density("builtin:center-gaussian", ctx)({0, 0}) == Approx(27.0));
    CHECK(parse_density("builtin:corner-gaussians", ctx)({1, 1}) == Approx(27.0));
    CHECK(parse_field("quad:2,1,-1")({1, 2}) == Approx(2.0 * 5 / 2 + 1 - 2));
    CHECK(parse_field("builtin:half-norm2")({3, 4}) == Approx(12.5));
    auto code_of = [&](const char* s) {
      try {
        parse_density(s, ctx);
      } catch (const Error& e) {
        return std::optional<ErrorCode>(e.code());
      }
      return std::optional<ErrorCode>{};
    };
    CHECK(code_of("const:abc").has_value());
    CHECK(code_of("builtin:nope").has_value());
    CHECK(code_of("image:/nonexistent.pgm,0.1") == std::optional(ErrorCode::kIo));
    CHECK_THROWS_AS(parse_field("wat:1"), Error);
  }
}
