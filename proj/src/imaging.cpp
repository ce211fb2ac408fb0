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

#include "splineot/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "splineot/error.hpp"

namespace splineot {

Point2 GeoFrame::to_domain(double col, double row) const {
  return {box.lo.x + col * box.width() / width, box.hi.y - row * box.height() / height};
}

Point2 GeoFrame::to_pixel(Point2 p) const {
  return {(p.x - box.lo.x) * width / box.width(), (box.hi.y - p.y) * height / box.height()};
}

RasterImage::RasterImage(int w, int h, int c, BoundingBox box)
    : width(w), height(h), channels(c), samples(static_cast<std::size_t>(w) * h * c, 0.0), frame{box, w, h} {
  if (w <= 0 || h <= 0 || (c != 1 && c != 3))
    throw Error(ErrorCode::kInvalidArgument, "image needs positive size and 1 or 3 channels");
}

namespace {

class PnmReader {
 public:
  explicit PnmReader(std::string_view bytes) : s_(bytes) {}

  void skip_space() {
    while (pos_ < s_.size()) {
      if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long integer(const char* what) {
    skip_space();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_++] - '0');
      if (v > 1L << 30) throw Error(ErrorCode::kParse, std::string("PNM ") + what + " too large");
      ++digits;
    }
    if (digits == 0) {
      if (pos_ >= s_.size()) throw Error(ErrorCode::kParse, std::string("PNM truncated reading ") + what);
      throw Error(ErrorCode::kParse, std::string("PNM malformed ") + what);
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from binary data.
  void header_end() {
    if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_])))
      throw Error(ErrorCode::kParse, "PNM header not terminated by whitespace");
    ++pos_;
  }

  std::size_t remaining() const { return s_.size() - pos_; }
  unsigned char byte() { return static_cast<unsigned char>(s_[pos_++]); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RasterImage read_pnm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::kParse, "not a PNM image");
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
    throw Error(ErrorCode::kParse, std::string("unsupported PNM variant P") + kind);
  PnmReader r(bytes.substr(2));
  const long w = r.integer("width"), h = r.integer("height"), maxval = r.integer("maxval");
  if (w <= 0 || h <= 0) throw Error(ErrorCode::kParse, "PNM size must be positive");
  if (maxval <= 0 || maxval > 65535) throw Error(ErrorCode::kParse, "PNM maxval must be in [1, 65535]");
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  RasterImage img(static_cast<int>(w), static_cast<int>(h), channels);
  img.maxval = static_cast<int>(maxval);
  const std::size_t count = img.samples.size();
  const double denom = static_cast<double>(maxval);
  if (kind == '2' || kind == '3') {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = r.integer("sample");
      if (v > maxval) throw Error(ErrorCode::kParse, "PNM sample exceeds maxval");
      img.samples[i] = static_cast<double>(v) / denom;
    }
    return img;
  }
  r.header_end();
  const std::size_t width_bytes = maxval > 255 ? 2 : 1;
  if (r.remaining() < count * width_bytes)
    throw Error(ErrorCode::kParse, "PNM payload truncated: expected " + std::to_string(count * width_bytes) +
                                       " bytes, found " + std::to_string(r.remaining()));
  for (std::size_t i = 0; i < count; ++i) {
    long v = r.byte();
    if (width_bytes == 2) v = (v << 8) | r.byte();
    if (v > maxval) throw Error(ErrorCode::kParse, "PNM sample exceeds maxval");
    img.samples[i] = static_cast<double>(v) / denom;
  }
  return img;
}

RasterImage read_pnm_file(const std::string& path) { return read_pnm(read_all(path)); }

std::string write_pnm(const RasterImage& img, bool ascii) {
  if (img.maxval <= 0 || img.maxval > 65535) throw Error(ErrorCode::kInvalidArgument, "maxval must be in [1, 65535]");
  const bool color = img.channels == 3;
  std::string out = std::string("P") + (ascii ? (color ? '3' : '2') : (color ? '6' : '5')) + "\n" +
                    std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                    std::to_string(img.maxval) + "\n";
  const auto quantize = [&](double s) {
    const double v = std::round(std::clamp(std::isfinite(s) ? s : 0.0, 0.0, 1.0) * img.maxval);
    return static_cast<long>(v);
  };
  const std::size_t per_row = static_cast<std::size_t>(img.width) * img.channels;
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    const long v = quantize(img.samples[i]);
    if (ascii) {
      out += std::to_string(v);
      out += ((i + 1) % per_row == 0) ? '\n' : ' ';
    } else if (img.maxval > 255) {
      out += static_cast<char>((v >> 8) & 0xff);
      out += static_cast<char>(v & 0xff);
    } else {
      out += static_cast<char>(v);
    }
  }
  return out;
}

void write_pnm_file(const RasterImage& img, const std::string& path, bool ascii) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  const std::string bytes = write_pnm(img, ascii);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

RasterImage luminance(const RasterImage& img) {
  if (img.channels == 1) return img;
  RasterImage out(img.width, img.height, 1, img.frame.box);
  out.maxval = img.maxval;
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      out.at(c, r) = 0.299 * img.at(c, r, 0) + 0.587 * img.at(c, r, 1) + 0.114 * img.at(c, r, 2);
  return out;
}

double sample_bilinear(const RasterImage& img, Point2 p, int ch) {
  const Point2 q = img.frame.to_pixel(p);
  const double x = std::clamp(q.x - 0.5, 0.0, img.width - 1.0);
  const double y = std::clamp(q.y - 0.5, 0.0, img.height - 1.0);
  const int c0 = std::min(static_cast<int>(x), img.width - 1), r0 = std::min(static_cast<int>(y), img.height - 1);
  const int c1 = std::min(c0 + 1, img.width - 1), r1 = std::min(r0 + 1, img.height - 1);
  const double tx = x - c0, ty = y - r0;
  const double top = (1.0 - tx) * img.at(c0, r0, ch) + tx * img.at(c1, r0, ch);
  const double bottom = (1.0 - tx) * img.at(c0, r1, ch) + tx * img.at(c1, r1, ch);
  return (1.0 - ty) * top + ty * bottom;
}

Density density_from_image(const RasterImage& img, double floor, const StarDomain* mask) {
  if (!(floor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "image density floor must be positive");
  auto gray = std::make_shared<const RasterImage>(luminance(img));
  std::optional<StarDomain> dom;
  if (mask) dom = *mask;
  double hi = floor;
  for (double s : gray->samples) hi = std::max(hi, s);
  return Density(
      [gray, floor, dom](Point2 p) {
        if (dom && !dom->contains(p)) return floor;
        return std::max(floor, sample_bilinear(*gray, p));
      },
      floor, hi, "image");
}

WarpResult forward_warp(const RasterImage& src, const BForm& u, const StarDomain& W, int out_width,
                        int out_height) {
  const Triangulation& mesh = u.space().mesh();
  WarpResult res;
  res.image = RasterImage(out_width, out_height, src.channels, W.bbox());
  RasterImage& dst = res.image;
  const std::size_t npix = static_cast<std::size_t>(out_width) * out_height;
  std::vector<double> acc(npix * src.channels, 0.0);
  std::vector<int> hits(npix, 0);

  long mapped = 0, outside = 0;
  for (int r = 0; r < src.height; ++r)
    for (int c = 0; c < src.width; ++c) {
      const Point2 x = src.frame.pixel_center(c, r);
      const auto loc = mesh.locate(x, 1e-9);
      if (!loc) continue;
      ++mapped;
      const Point2 y{eval_bform_at(u, *loc, 1, 0), eval_bform_at(u, *loc, 0, 1)};
      const Point2 q = dst.frame.to_pixel(y);
      if (!(q.x >= 0.0 && q.y >= 0.0 && q.x < out_width && q.y < out_height)) {
        ++outside;
        continue;
      }
      const std::size_t k = static_cast<std::size_t>(q.y) * out_width + static_cast<std::size_t>(q.x);
      ++hits[k];
      for (int ch = 0; ch < src.channels; ++ch) {
        acc[k * src.channels + ch] += src.at(c, r, ch);
        res.splatted_mass += src.at(c, r, ch) / src.channels;
      }
    }
  if (mapped == 0) throw Error(ErrorCode::kMapQuality, "no source pixel lies in the potential's mesh");
  res.outside_fraction = static_cast<double>(outside) / mapped;
  if (res.outside_fraction > 0.05)
    throw Error(ErrorCode::kMapQuality, "gradient map sends " + std::to_string(100.0 * res.outside_fraction) +
                                            "% of pixels outside the target box");

  std::vector<char> inside(npix, 0), filled(npix, 0);
  long in_count = 0, hit_count = 0;
  for (int r = 0; r < out_height; ++r)
    for (int c = 0; c < out_width; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * out_width + c;
      inside[k] = W.contains(dst.frame.pixel_center(c, r));
      if (!inside[k]) continue;
      ++in_count;
      if (hits[k] > 0) {
        ++hit_count;
        filled[k] = 1;
        for (int ch = 0; ch < src.channels; ++ch) dst.at(c, r, ch) = acc[k * src.channels + ch] / hits[k];
      }
    }
  res.prefill_coverage = in_count ? static_cast<double>(hit_count) / in_count : 0.0;

  long holes = in_count - hit_count;
  while (in_count > 0 && static_cast<double>(holes) / in_count >= 1e-3 && res.fill_passes < 20) {
    ++res.fill_passes;
    std::vector<char> next = filled;
    RasterImage prev = dst;
    for (int r = 0; r < out_height; ++r)
      for (int c = 0; c < out_width; ++c) {
        const std::size_t k = static_cast<std::size_t>(r) * out_width + c;
        if (!inside[k] || filled[k]) continue;
        int n = 0;
        double sum[3] = {0.0, 0.0, 0.0};
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr < 0 || cc < 0 || rr >= out_height || cc >= out_width) continue;
            if (!filled[static_cast<std::size_t>(rr) * out_width + cc]) continue;
            ++n;
            for (int ch = 0; ch < src.channels; ++ch) sum[ch] += prev.at(cc, rr, ch);
          }
        if (n == 0) continue;
        for (int ch = 0; ch < src.channels; ++ch) dst.at(c, r, ch) = sum[ch] / n;
        next[k] = 1;
        --holes;
      }
    filled.swap(next);
  }
  res.final_coverage = in_count ? 1.0 - static_cast<double>(holes) / in_count : 0.0;
  return res;
}

double psnr(const RasterImage& a, const RasterImage& b, const StarDomain* mask) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw Error(ErrorCode::kInvalidArgument, "psnr needs images of equal shape");
  double se = 0.0;
  long n = 0;
  for (int r = 0; r < a.height; ++r)
    for (int c = 0; c < a.width; ++c) {
      if (mask && !mask->contains(a.frame.pixel_center(c, r))) continue;
      for (int ch = 0; ch < a.channels; ++ch) {
        const double d = a.at(c, r, ch) - b.at(c, r, ch);
        se += d * d;
        ++n;
      }
    }
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "psnr mask selects no pixels");
  const double mse = se / n;
  return mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(1.0 / mse);
}

}  // namespace splineot
