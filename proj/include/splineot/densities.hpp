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

#include <functional>
#include <string>
#include <string_view>

#include "splineot/assembly.hpp"

namespace splineot {

// exp(a (x - t)^2 + b (y - s)^2). Bounds are taken over `box`.
Density gaussian_density(double a, double b, double t, double s, const BoundingBox& box);

// The oscillatory test profile q(z) of the square-to-square benchmark and
// its first two derivatives.
double bfo_q(double z, int derivative = 0);
Density bfo_density();
Point2 bfo_exact_map(Point2 x);

// 2 + 25 exp(-|x - c|^2 / 0.08) with c the nearest corner of [-1,1]^2, and
// the same bump centred at the origin.
Density corner_gaussians();
Density center_gaussian();

using Field = std::function<double(Point2)>;

struct DescriptorContext {
  BoundingBox domain_box;  // used for gaussian bounds and image geo-frames
  std::string base_dir;    // relative image paths resolve against this
};

/// Density mini-language: const:v | gauss:a,b,t,s | image:path,floor |
/// builtin:<name>. Builtins: bfo-q, corner-gaussians, center-gaussian,
/// exp-radial-source, cone-source.
Density parse_density(std::string_view text, const DescriptorContext& ctx);

/// Scalar fields for boundary data and exact solutions: const:v |
/// quad:a,bx,by (a|x|^2/2 + bx x + by y) | builtin:<name>. Builtins: zero, half-norm2, exp-radial, cone, sin-sin,
/// sin-sin-source, affine-sum.
Field parse_field(std::string_view text);

}  // namespace splineot
