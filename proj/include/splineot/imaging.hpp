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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "splineot/assembly.hpp"

namespace splineot {

/// Pixel <-> domain map. Pixel (col, row) has its centre at
/// (col + 0.5, row + 0.5) in pixel units; rows run downwards (decreasing y).
struct GeoFrame {
  BoundingBox box{{0.0, 0.0}, {1.0, 1.0}};
  int width = 1;
  int height = 1;

  Point2 to_domain(double col, double row) const;  // continuous pixel coordinates
  Point2 to_pixel(Point2 p) const;                 // inverse, returns (col, row)
  Point2 pixel_center(int col, int row) const { return to_domain(col + 0.5, row + 0.5); }
};

struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  int maxval = 255;             // kept for lossless re-encoding
  std::vector<double> samples;  // row-major, interleaved, in [0, 1]
  GeoFrame frame;

  RasterImage() = default;
  RasterImage(int w, int h, int c, BoundingBox box = {{0.0, 0.0}, {1.0, 1.0}});

  double& at(int col, int row, int ch = 0) { return samples[(static_cast<std::size_t>(row) * width + col) * channels + ch]; }
  double at(int col, int row, int ch = 0) const {
    return samples[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
};

RasterImage read_pnm(std::string_view bytes);
RasterImage read_pnm_file(const std::string& path);
// Binary P5/P6 unless `ascii`; samples are rounded to the image's maxval.
std::string write_pnm(const RasterImage& img, bool ascii = false);
void write_pnm_file(const RasterImage& img, const std::string& path, bool ascii = false);

RasterImage luminance(const RasterImage& img);

// Bilinear sample of channel `ch` at a domain point (edge-clamped).
double sample_bilinear(const RasterImage& img, Point2 p, int ch = 0);

/// Density max(floor, luminance) with bilinear interpolation; points outside
/// `mask` (when given) read as the floor.
Density density_from_image(const RasterImage& img, double floor, const StarDomain* mask = nullptr);

struct WarpResult {
  RasterImage image;
  double prefill_coverage = 0.0;  // in-W target pixels hit by a splat
  double final_coverage = 0.0;
  int fill_passes = 0;
  double outside_fraction = 0.0;  // source pixels landing outside W's box
  double splatted_mass = 0.0;     // sum of splatted luminance before averaging
};

/// Pushes every source pixel centre x in the mesh of u to grad u(x) in an
/// out_width x out_height raster over W's bounding box, averaging collisions,
/// then fills holes inside W by 3x3 averaging.
WarpResult forward_warp(const RasterImage& src, const BForm& u, const StarDomain& W, int out_width, int out_height);

double psnr(const RasterImage& a, const RasterImage& b, const StarDomain* mask = nullptr);

}  // namespace splineot
