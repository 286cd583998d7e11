// Copyright 2026 The LayerMix Authors
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

#include "layermix/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "layermix/image_io.hpp"

namespace layermix {

namespace {

constexpr std::array<TransformDescriptor, kTransformKindCount> kTable{{
    {TransformKind::Equalize, "equalize", false, 0.0, 0.0, 0.0, false},
    {TransformKind::Grayscale, "grayscale", false, 0.0, 0.0, 0.0, false},
    {TransformKind::AutoContrast, "autocontrast", false, 0.0, 0.0, 0.0, false},
    {TransformKind::Brightness, "brightness", true, 0.1, 1.9, 0.9, true},
    {TransformKind::Posterize, "posterize", true, 0.0, 4.0, 4.0, false},
    {TransformKind::Solarize, "solarize", true, 0.0, 1.0, 1.0, false},
    {TransformKind::Rotate, "rotate", true, -30.0, 30.0, 30.0, true},
    {TransformKind::ShearX, "shear_x", true, -0.3, 0.3, 0.3, true},
    {TransformKind::ShearY, "shear_y", true, -0.3, 0.3, 0.3, true},
    {TransformKind::TranslateX, "translate_x", true, 0.0, 0.33, 0.33, true},
    {TransformKind::TranslateY, "translate_y", true, 0.0, 0.33, 0.33, true},
}};

// Inverse-mapped bilinear warp; samples outside the canvas read as 0.
template <typename InverseMap>
Image warp(const Image& img, InverseMap&& source_of) {
  Image out(img.shape());
  const int h = img.height();
  const int w = img.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto [sx, sy] = source_of(static_cast<double>(x), static_cast<double>(y));
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const double wx = sx - fx0;
      const double wy = sy - fy0;
      if (fx0 < -1.0 || fy0 < -1.0 || fx0 > w || fy0 > h) continue;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      const double weights[4] = {(1 - wx) * (1 - wy), wx * (1 - wy), (1 - wx) * wy, wx * wy};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int c = 0; c < img.channels(); ++c) {
        double acc = 0.0;
        for (int t = 0; t < 4; ++t) {
          if (weights[t] == 0.0) continue;
          if (xs[t] < 0 || xs[t] >= w || ys[t] < 0 || ys[t] >= h) continue;
          acc += weights[t] * img.at(ys[t], xs[t], c);
        }
        out.at(y, x, c) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
    }
  }
  return out;
}

}  // namespace

std::span<const TransformDescriptor, kTransformKindCount> transform_table() { return kTable; }

const TransformDescriptor& descriptor(TransformKind kind) {
  return kTable[static_cast<std::size_t>(kind)];
}

std::string_view to_string(TransformKind kind) { return descriptor(kind).name; }

std::optional<TransformKind> transform_kind_from_string(std::string_view name) {
  for (const auto& d : kTable)
    if (d.name == name) return d.kind;
  return std::nullopt;
}

const TransformDescriptor& sample_transform(RngStream& rng) {
  return kTable[rng.uniform_index(kTransformKindCount)];
}

const TransformDescriptor& sample_transform(RngStream& rng, std::span<const TransformKind> kinds) {
  if (kinds.empty()) return sample_transform(rng);
  return descriptor(kinds[rng.uniform_index(kinds.size())]);
}

double sample_level(const TransformDescriptor& desc, int magnitude, RngStream& rng) {
  if (magnitude < 0 || magnitude > kMaxMagnitude) {
    throw ParameterError("magnitude must be in [0, 10], got " + std::to_string(magnitude));
  }
  if (!desc.parameterized) return 0.0;
  double level = rng.uniform() * desc.max_level * magnitude / kMaxMagnitude;
  if (desc.is_signed && rng.bernoulli(0.5)) level = -level;
  return level;
}

Image equalize(const Image& img) {
  Image out = img;
  const std::size_t n = static_cast<std::size_t>(img.height()) * img.width();
  for (int c = 0; c < img.channels(); ++c) {
    std::array<std::size_t, 256> hist{};
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) ++hist[quantize_u8(img.at(y, x, c))];
    std::array<std::size_t, 256> cdf{};
    std::size_t running = 0;
    std::size_t cdf_min = 0;
    for (int v = 0; v < 256; ++v) {
      running += hist[v];
      cdf[v] = running;
      if (cdf_min == 0) cdf_min = running;
    }
    if (cdf_min == n) continue;  // constant channel
    std::array<float, 256> lut{};
    for (int v = 0; v < 256; ++v) {
      const double level = cdf[v] < cdf_min ? 0.0
                                            : static_cast<double>(cdf[v] - cdf_min) * 255.0 /
                                                  static_cast<double>(n - cdf_min);
      lut[v] = static_cast<float>(std::round(level) / 255.0);
    }
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) out.at(y, x, c) = lut[quantize_u8(img.at(y, x, c))];
  }
  return out;
}

Image autocontrast(const Image& img) {
  Image out = img;
  for (int c = 0; c < img.channels(); ++c) {
    float lo = 1.0f;
    float hi = 0.0f;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        lo = std::min(lo, img.at(y, x, c));
        hi = std::max(hi, img.at(y, x, c));
      }
    }
    if (!(hi > lo)) continue;
    const double scale = 1.0 / (static_cast<double>(hi) - lo);
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        out.at(y, x, c) = static_cast<float>(
            std::clamp((img.at(y, x, c) - static_cast<double>(lo)) * scale, 0.0, 1.0));
  }
  return out;
}

Image adjust_brightness(const Image& img, double factor) {
  if (factor == 1.0) return img;
  Image out = img;
  for (float& v : out.data()) v = static_cast<float>(v * factor);
  clip_unit(out);
  return out;
}

Image posterize(const Image& img, int bits_removed) {
  if (bits_removed < 0 || bits_removed > 8) throw ParameterError("posterize bits out of range");
  if (bits_removed == 0) return img;
  const unsigned mask = (0xFFu << bits_removed) & 0xFFu;
  Image out = img;
  for (float& v : out.data()) v = static_cast<float>((quantize_u8(v) & mask) / 255.0);
  return out;
}

Image solarize(const Image& img, double threshold) {
  Image out = img;
  for (float& v : out.data())
    if (v >= threshold) v = 1.0f - v;
  clip_unit(out);
  return out;
}

Image rotate(const Image& img, double degrees) {
  if (degrees == 0.0) return img;
  const double theta = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  // Positive angles turn the content counter-clockwise on screen (y down).
  return warp(img, [&](double x, double y) {
    const double dx = x - cx;
    const double dy = y - cy;
    return std::pair{cs * dx - sn * dy + cx, sn * dx + cs * dy + cy};
  });
}

Image shear_x(const Image& img, double shear) {
  if (shear == 0.0) return img;
  const double cy = (img.height() - 1) / 2.0;
  return warp(img, [&](double x, double y) { return std::pair{x + shear * (y - cy), y}; });
}

Image shear_y(const Image& img, double shear) {
  if (shear == 0.0) return img;
  const double cx = (img.width() - 1) / 2.0;
  return warp(img, [&](double x, double y) { return std::pair{x, y + shear * (x - cx)}; });
}

Image translate(const Image& img, double dx_pixels, double dy_pixels) {
  if (dx_pixels == 0.0 && dy_pixels == 0.0) return img;
  return warp(img, [&](double x, double y) { return std::pair{x - dx_pixels, y - dy_pixels}; });
}

Image apply_transform_at_level(const Image& img, TransformKind kind, double level) {
  Image out;
  switch (kind) {
    case TransformKind::Equalize:
      out = equalize(img);
      break;
    case TransformKind::Grayscale:
      out = to_grayscale(img);
      break;
    case TransformKind::AutoContrast:
      out = autocontrast(img);
      break;
    case TransformKind::Brightness:
      out = adjust_brightness(img, 1.0 + level);
      break;
    case TransformKind::Posterize:
      out = posterize(img, static_cast<int>(std::lround(std::abs(level))));
      break;
    case TransformKind::Solarize:
      // Threshold 1 would still flip pure white, so level 0 is special-cased.
      out = level == 0.0 ? img : solarize(img, 1.0 - std::abs(level));
      break;
    case TransformKind::Rotate:
      out = rotate(img, level);
      break;
    case TransformKind::ShearX:
      out = shear_x(img, level);
      break;
    case TransformKind::ShearY:
      out = shear_y(img, level);
      break;
    case TransformKind::TranslateX:
      out = translate(img, level * img.width(), 0.0);
      break;
    case TransformKind::TranslateY:
      out = translate(img, 0.0, level * img.height());
      break;
  }
  clip_unit(out);
  return out;
}

Image apply_transform(const Image& img, const TransformDescriptor& desc, int magnitude,
                      RngStream& rng) {
  if (img.empty()) throw ShapeError("apply_transform: empty image");
  const double level = sample_level(desc, magnitude, rng);
  return apply_transform_at_level(img, desc.kind, level);
}

}  // namespace layermix
