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

#include <cstdint>
#include <optional>
#include <vector>

#include "layermix/image.hpp"
#include "layermix/sampling.hpp"

namespace layermix {

enum class MaskGranularity { PerPixel, PerElement };

/// Boolean selection mask. PerPixel masks hold one bit per (y, x) shared by
/// every channel; PerElement masks hold one bit per (y, x, c).
struct BlendMask {
  MaskGranularity granularity = MaskGranularity::PerPixel;
  ImageShape shape{};
  std::vector<std::uint8_t> bits;

  bool at(int y, int x, int c) const;
};

BlendMask make_mask(ImageShape shape, MaskGranularity granularity, bool fill);

inline constexpr double kDefaultGeometricEps = 1e-5;

/// a * z0 + b * z1, clipped.
Image blend_arithmetic(const Image& z0, const Image& z1, const ConicWeights& w);

/// 2^(a+b-1) * (z0 + eps)^a * (z1 + eps)^b, clipped.
Image blend_geometric(const Image& z0, const Image& z1, const ConicWeights& w,
                      double eps = kDefaultGeometricEps);

/// Takes z0 where the mask is set and z1 elsewhere.
Image blend_masked(const Image& z0, const Image& z1, const BlendMask& mask);

/// Mixing rate drawn Uniform(0, 1) unless `fixed_rate` is given, then each
/// cell is an independent Bernoulli(rate).
BlendMask sample_mask(RngStream& rng, ImageShape shape, MaskGranularity granularity,
                      std::optional<double> fixed_rate = std::nullopt);

struct BlendOptions {
  double beta = 3.0;
  double eps = kDefaultGeometricEps;
  std::optional<double> mask_rate;
};

/// Dispatch to one method, sampling its random parameters from `rng`.
Image blend(const Image& z0, const Image& z1, BlendMethod method, RngStream& rng,
            const BlendOptions& options = {});

}  // namespace layermix
