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

#include "layermix/blending.hpp"

#include <cmath>

namespace layermix {

bool BlendMask::at(int y, int x, int c) const {
  const std::size_t pixel = static_cast<std::size_t>(y) * shape.width + x;
  if (granularity == MaskGranularity::PerPixel) return bits[pixel] != 0;
  return bits[pixel * shape.channels + c] != 0;
}

BlendMask make_mask(ImageShape shape, MaskGranularity granularity, bool fill) {
  BlendMask mask{granularity, shape, {}};
  const std::size_t cells = granularity == MaskGranularity::PerPixel
                                ? static_cast<std::size_t>(shape.height) * shape.width
                                : shape.size();
  mask.bits.assign(cells, fill ? 1 : 0);
  return mask;
}

Image blend_arithmetic(const Image& z0, const Image& z1, const ConicWeights& w) {
  require_same_shape(z0, z1, "blend_arithmetic");
  Image out(z0.shape());
  auto a = z0.data();
  auto b = z1.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = static_cast<float>(w.a * a[i] + w.b * b[i]);
  }
  clip_unit(out);
  return out;
}

Image blend_geometric(const Image& z0, const Image& z1, const ConicWeights& w, double eps) {
  require_same_shape(z0, z1, "blend_geometric");
  if (!(eps >= 0.0)) throw ParameterError("geometric eps must be non-negative");
  Image out(z0.shape());
  const double scale = std::exp2(w.a + w.b - 1.0);
  auto a = z0.data();
  auto b = z1.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = static_cast<float>(scale * std::pow(a[i] + eps, w.a) * std::pow(b[i] + eps, w.b));
  }
  clip_unit(out);
  return out;
}

Image blend_masked(const Image& z0, const Image& z1, const BlendMask& mask) {
  require_same_shape(z0, z1, "blend_masked");
  if (mask.shape.height != z0.height() || mask.shape.width != z0.width() ||
      (mask.granularity == MaskGranularity::PerElement && mask.shape.channels != z0.channels())) {
    throw ShapeError("blend_masked: mask shape " + to_string(mask.shape) +
                     " incompatible with image " + to_string(z0.shape()));
  }
  Image out(z0.shape());
  for (int y = 0; y < z0.height(); ++y)
    for (int x = 0; x < z0.width(); ++x)
      for (int c = 0; c < z0.channels(); ++c)
        out.at(y, x, c) = mask.at(y, x, c) ? z0.at(y, x, c) : z1.at(y, x, c);
  return out;
}

BlendMask sample_mask(RngStream& rng, ImageShape shape, MaskGranularity granularity,
                      std::optional<double> fixed_rate) {
  if (fixed_rate && !(*fixed_rate >= 0.0 && *fixed_rate <= 1.0)) {
    throw ParameterError("mask rate must be in [0, 1]");
  }
  const double rate = fixed_rate ? *fixed_rate : rng.uniform();
  BlendMask mask = make_mask(shape, granularity, false);
  for (auto& bit : mask.bits) bit = rng.bernoulli(rate) ? 1 : 0;
  return mask;
}

Image blend(const Image& z0, const Image& z1, BlendMethod method, RngStream& rng,
            const BlendOptions& options) {
  require_same_shape(z0, z1, "blend");
  Image out;
  switch (method) {
    case BlendMethod::Arithmetic:
      out = blend_arithmetic(z0, z1, sample_conic_weights(rng, options.beta));
      break;
    case BlendMethod::Geometric:
      out = blend_geometric(z0, z1, sample_conic_weights(rng, options.beta), options.eps);
      break;
    case BlendMethod::PixelMix:
      out = blend_masked(
          z0, z1, sample_mask(rng, z0.shape(), MaskGranularity::PerPixel, options.mask_rate));
      break;
    case BlendMethod::ElementMix:
      out = blend_masked(
          z0, z1, sample_mask(rng, z0.shape(), MaskGranularity::PerElement, options.mask_rate));
      break;
  }
  clip_unit(out);
  return out;
}

}  // namespace layermix
