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

#include "layermix/sampling.hpp"

#include <cmath>
#include <string>

namespace layermix {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t block = counter_ >> 1;
  const unsigned lane = static_cast<unsigned>(counter_ & 1u);
  ++counter_;
  if (block != cached_block_) {
    cache_ = philox4x32(
        {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
         static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    cached_block_ = block;
  }
  return static_cast<std::uint64_t>(cache_[2 * lane]) |
         (static_cast<std::uint64_t>(cache_[2 * lane + 1]) << 32);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw ParameterError("uniform_index: n must be positive");
  // 2^64 mod n; values below it would over-represent small residues.
  const std::uint64_t threshold = (std::uint64_t{0} - n) % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x < threshold);
  return x % n;
}

std::pair<double, double> RngStream::standard_normal_pair() {
  // Marsaglia polar method: no trigonometry, about 1.27 attempts per pair.
  double u, v, q;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  return {u * f, v * f};
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(index)));
}

double beta_unit_shape_from_uniform(double u, double shape, BetaSide side) {
  if (!(shape > 0.0)) throw ParameterError("beta shape must be positive");
  if (shape == 1.0) return u;
  if (side == BetaSide::BetaIsOne) return std::pow(u, 1.0 / shape);
  return 1.0 - std::pow(1.0 - u, 1.0 / shape);
}

double beta_unit_shape(RngStream& rng, double shape, BetaSide side) {
  if (!(shape > 0.0)) throw ParameterError("beta shape must be positive");
  return beta_unit_shape_from_uniform(rng.uniform(), shape, side);
}

ConicWeights sample_conic_weights(RngStream& rng, double beta) {
  if (!(beta > 0.0)) throw ParameterError("blending ratio must be positive");
  ConicWeights w;
  if (rng.bernoulli(0.5)) {
    w.a = 1.0 + beta_unit_shape(rng, beta, BetaSide::AlphaIsOne);
  } else {
    w.a = beta_unit_shape(rng, beta, BetaSide::BetaIsOne);
  }
  const bool negate = rng.bernoulli(0.5);
  const double magnitude = beta_unit_shape(rng, beta, BetaSide::AlphaIsOne);
  w.b = negate ? -magnitude : magnitude;
  return w;
}

std::string_view to_string(BlendMethod method) {
  switch (method) {
    case BlendMethod::Arithmetic:
      return "arithmetic";
    case BlendMethod::Geometric:
      return "geometric";
    case BlendMethod::PixelMix:
      return "pixel";
    case BlendMethod::ElementMix:
      return "element";
  }
  return "unknown";
}

std::array<BlendMethodId, kBlendMethodCount> default_blend_weights() {
  return {{{BlendMethod::Arithmetic, 1.0 / 3.0},
           {BlendMethod::Geometric, 1.0 / 3.0},
           {BlendMethod::PixelMix, 1.0 / 6.0},
           {BlendMethod::ElementMix, 1.0 / 6.0}}};
}

void validate_blend_weights(std::span<const BlendMethodId> weights) {
  if (weights.empty()) throw ParameterError("blend weight list is empty");
  double total = 0.0;
  for (const auto& w : weights) {
    if (!(w.probability >= 0.0)) throw ParameterError("blend probabilities must be non-negative");
    total += w.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ParameterError("blend probabilities must sum to 1 (got " + std::to_string(total) + ")");
  }
}

BlendMethodId choose_blend_method(RngStream& rng, std::span<const BlendMethodId> weights) {
  validate_blend_weights(weights);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (const auto& w : weights) {
    cumulative += w.probability;
    if (u < cumulative) return w;
  }
  // u landed in the rounding gap above the final cumulative sum.
  for (auto it = weights.rbegin(); it != weights.rend(); ++it) {
    if (it->probability > 0.0) return *it;
  }
  return weights.back();
}

int choose_layer_exit(RngStream& rng) { return static_cast<int>(rng.uniform_index(3)); }

}  // namespace layermix
