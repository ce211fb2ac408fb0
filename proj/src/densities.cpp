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

#include "splineot/densities.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <vector>

#include "splineot/error.hpp"
#include "splineot/imaging.hpp"

namespace splineot {

namespace {

constexpr double kPi = std::numbers::pi;

double parse_number(std::string_view s, std::string_view what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error(ErrorCode::kParse, "bad number '" + std::string(s) + "' in " + std::string(what));
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

// Range of a (x - t)^2 over [lo, hi].
std::pair<double, double> quadratic_range(double a, double t, double lo, double hi) {
  const double ends[2] = {a * (lo - t) * (lo - t), a * (hi - t) * (hi - t)};
  double mn = std::min(ends[0], ends[1]), mx = std::max(ends[0], ends[1]);
  if (t > lo && t < hi) {
    mn = std::min(mn, 0.0);
    mx = std::max(mx, 0.0);
  }
  return {mn, mx};
}

double box_max_norm2(const BoundingBox& b) {
  const double x = std::max(std::abs(b.lo.x), std::abs(b.hi.x));
  const double y = std::max(std::abs(b.lo.y), std::abs(b.hi.y));
  return x * x + y * y;
}

}  // namespace

Density gaussian_density(double a, double b, double t, double s, const BoundingBox& box) {
  const auto [x0, x1] = quadratic_range(a, t, box.lo.x, box.hi.x);
  const auto [y0, y1] = quadratic_range(b, s, box.lo.y, box.hi.y);
  char buf[160];
  std::snprintf(buf, sizeof buf, "gauss:%.17g,%.17g,%.17g,%.17g", a, b, t, s);
  return Density([a, b, t, s](Point2 p) { return std::exp(a * (p.x - t) * (p.x - t) + b * (p.y - s) * (p.y - s)); },
                 std::exp(x0 + y0), std::exp(x1 + y1), buf);
}

double bfo_q(double z, int derivative) {
  const double k = 8.0 * kPi;
  const double c0 = 1.0 / (256.0 * kPi * kPi * kPi) + 1.0 / (32.0 * kPi);
  const double A = -z * z / (8.0 * kPi) + c0, A1 = -z / (4.0 * kPi), A2 = -1.0 / (4.0 * kPi);
  const double B = z / (32.0 * kPi * kPi), B1 = 1.0 / (32.0 * kPi * kPi);
  const double c = std::cos(k * z), s = std::sin(k * z);
  switch (derivative) {
    case 0: return A * c + B * s;
    case 1: return A1 * c - A * k * s + B1 * s + B * k * c;
    case 2: return A2 * c - 2.0 * A1 * k * s - A * k * k * c + 2.0 * B1 * k * c - B * k * k * s;
    default: throw Error(ErrorCode::kInvalidArgument, "q derivative order must be 0, 1 or 2");
  }
}

Density bfo_density() {
  auto f = [](Point2 p) {
    const double qa = bfo_q(p.x), qb = bfo_q(p.y);
    const double q1a = bfo_q(p.x, 1), q1b = bfo_q(p.y, 1);
    const double q2a = bfo_q(p.x, 2), q2b = bfo_q(p.y, 2);
    return 1.0 + 4.0 * (q2a * qb + qa * q2b) + 16.0 * (qa * qb * q2a * q2b - q1a * q1a * q1b * q1b);
  };
  // Bounds from a dense sample of the square with a 2% margin.
  static const std::pair<double, double> range = [&] {
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j <= 800; ++j)
      for (int i = 0; i <= 800; ++i) {
        const double v = f({-0.5 + i / 800.0, -0.5 + j / 800.0});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    return std::make_pair(lo, hi);
  }();
  return Density(f, 0.98 * range.first, 1.02 * range.second, "builtin:bfo-q");
}

Point2 bfo_exact_map(Point2 x) {
  return {x.x + 4.0 * bfo_q(x.x, 1) * bfo_q(x.y), x.y + 4.0 * bfo_q(x.x) * bfo_q(x.y, 1)};
}

Density corner_gaussians() {
  return Density(
      [](Point2 p) {
        const Point2 c{p.x < 0.0 ? -1.0 : 1.0, p.y < 0.0 ? -1.0 : 1.0};
        const Point2 d = p - c;
        return 2.0 + 25.0 * std::exp(-0.5 * dot(d, d) / 0.04);
      },
      2.0, 27.0, "builtin:corner-gaussians");
}

Density center_gaussian() {
  return Density([](Point2 p) { return 2.0 + 25.0 * std::exp(-0.5 * dot(p, p) / 0.04); }, 2.0, 27.0,
                 "builtin:center-gaussian");
}

Density parse_density(std::string_view text, const DescriptorContext& ctx) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorCode::kParse, "density descriptor needs kind:args, got '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon), args = text.substr(colon + 1);
  if (kind == "const") return Density::constant(parse_number(args, "const density"));
  if (kind == "gauss") {
    const auto p = split(args, ',');
    if (p.size() != 4) throw Error(ErrorCode::kParse, "gauss density needs a,b,t,s");
    return gaussian_density(parse_number(p[0], "gauss"), parse_number(p[1], "gauss"), parse_number(p[2], "gauss"),
                            parse_number(p[3], "gauss"), ctx.domain_box);
  }
  if (kind == "image") {
    const auto comma = args.rfind(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::kParse, "image density needs path,floor");
    std::filesystem::path path(std::string(args.substr(0, comma)));
    if (path.is_relative() && !ctx.base_dir.empty()) path = std::filesystem::path(ctx.base_dir) / path;
    const double floor = parse_number(args.substr(comma + 1), "image floor");
    RasterImage img = luminance(read_pnm_file(path.string()));
    img.frame.box = ctx.domain_box;
    Density d = density_from_image(img, floor);
    return Density([d](Point2 p) { return d(p); }, d.lower(), d.upper(), std::string(text));
  }
  if (kind == "builtin") {
    if (args == "bfo-q") return bfo_density();
    if (args == "corner-gaussians") return corner_gaussians();
    if (args == "center-gaussian") return center_gaussian();
    if (args == "exp-radial-source") {
      const double r2 = box_max_norm2(ctx.domain_box);
      return Density([](Point2 p) { const double r = dot(p, p); return (1.0 + r) * std::exp(r); }, 1.0,
                     (1.0 + r2) * std::exp(r2), "builtin:exp-radial-source");
    }
    if (args == "cone-source")
      return Density(
          [](Point2 p) {
            const double r = distance(p, {0.5, 0.5});
            return r <= 0.2 ? 0.0 : 1.0 - 0.2 / r;
          },
          0.0, 1.0, "builtin:cone-source");
    throw Error(ErrorCode::kParse, "unknown builtin density '" + std::string(args) + "'");
  }
  throw Error(ErrorCode::kParse, "unknown density kind '" + std::string(kind) + "'");
}

Field parse_field(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorCode::kParse, "field descriptor needs kind:args, got '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon), args = text.substr(colon + 1);
  if (kind == "const") {
    const double v = parse_number(args, "const field");
    return [v](Point2) { return v; };
  }
  if (kind == "quad") {
    const auto p = split(args, ',');
    if (p.size() != 3) throw Error(ErrorCode::kParse, "quad field needs a,bx,by");
    const double a = parse_number(p[0], "quad"), bx = parse_number(p[1], "quad"), by = parse_number(p[2], "quad");
    return [a, bx, by](Point2 x) { return 0.5 * a * dot(x, x) + bx * x.x + by * x.y; };
  }
  if (kind != "builtin") throw Error(ErrorCode::kParse, "unknown field kind '" + std::string(kind) + "'");
  if (args == "zero") return [](Point2) { return 0.0; };
  if (args == "half-norm2") return [](Point2 p) { return 0.5 * dot(p, p); };
  if (args == "exp-radial") return [](Point2 p) { return std::exp(0.5 * dot(p, p)); };
  if (args == "cone")
    return [](Point2 p) {
      const double m = std::max(0.0, distance(p, {0.5, 0.5}) - 0.2);
      return 0.5 * m * m;
    };
  if (args == "sin-sin") return [](Point2 p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); };
  if (args == "sin-sin-source")
    return [](Point2 p) { return 2.0 * kPi * kPi * std::sin(kPi * p.x) * std::sin(kPi * p.y); };
  if (args == "affine-sum") return [](Point2 p) { return p.x + p.y; };
  throw Error(ErrorCode::kParse, "unknown builtin field '" + std::string(args) + "'");
}

}  // namespace splineot
