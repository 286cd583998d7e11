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

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "layermix/image.hpp"
#include "layermix/sampling.hpp"

namespace layermix {

enum class TransformKind {
  Equalize,
  Grayscale,
  AutoContrast,
  Brightness,
  Posterize,
  Solarize,
  Rotate,
  ShearX,
  ShearY,
  TranslateX,
  TranslateY,
};
inline constexpr std::size_t kTransformKindCount = 11;

/// One row of the transformation table.
///
/// `range_min`/`range_max` are the table's printed range for the operation
/// (degrees for rotate, factor for brightness, bits for posterize, fraction of
/// the image side for translate). `max_level` is the largest level magnitude
/// reachable at magnitude 10; the level actually used is drawn uniformly from
/// [0, max_level * m / 10] and negated with probability 1/2 when `is_signed`.
struct TransformDescriptor {
  TransformKind kind;
  std::string_view name;
  bool parameterized;
  double range_min;
  double range_max;
  double max_level;
  bool is_signed;
};

std::span<const TransformDescriptor, kTransformKindCount> transform_table();
const TransformDescriptor& descriptor(TransformKind kind);
std::string_view to_string(TransformKind kind);
std::optional<TransformKind> transform_kind_from_string(std::string_view name);

inline constexpr int kMaxMagnitude = 10;

/// Uniform over the eleven kinds.
const TransformDescriptor& sample_transform(RngStream& rng);
/// Uniform over `kinds`; an empty span means all eleven.
const TransformDescriptor& sample_transform(RngStream& rng, std::span<const TransformKind> kinds);

/// Signed level for one application. Parameter-free kinds consume no
/// randomness and return 0.
double sample_level(const TransformDescriptor& desc, int magnitude, RngStream& rng);

/// Deterministic application at a given (signed) level. Output is clipped to
/// [0, 1]; a level of exactly 0 returns the input unchanged for every
/// parameterized kind.
Image apply_transform_at_level(const Image& img, TransformKind kind, double level);

/// sample_level followed by apply_transform_at_level.
Image apply_transform(const Image& img, const TransformDescriptor& desc, int magnitude,
                      RngStream& rng);

// Individual operations, usable on their own.
Image equalize(const Image& img);
Image autocontrast(const Image& img);
Image adjust_brightness(const Image& img, double factor);
Image posterize(const Image& img, int bits_removed);
Image solarize(const Image& img, double threshold);
Image rotate(const Image& img, double degrees);
Image shear_x(const Image& img, double shear);
Image shear_y(const Image& img, double shear);
Image translate(const Image& img, double dx_pixels, double dy_pixels);

}  // namespace layermix
