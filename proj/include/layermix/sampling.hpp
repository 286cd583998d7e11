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
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace layermix {

/// Raised when a caller passes an argument outside an operation's domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Philox4x32-10 block function. Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream keyed by (seed, stream_id, counter).
///
/// Every draw is a pure function of those three values, so streams for
/// different work items can be created in any order and on any thread.
/// A stream is single-owner; copy it to fork an identical sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0)
      : seed_(seed), stream_id_(stream_id), counter_(counter) {}

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Two independent standard normals (polar method).
  std::pair<double, double> standard_normal_pair();

  /// Child stream with the same seed and a stream id derived from
  /// (stream_id, index). Does not advance this stream.
  RngStream split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint32_t, 4> cache_{};
};

enum class BetaSide {
  AlphaIsOne,  // B(1, shape): CDF 1 - (1 - x)^shape
  BetaIsOne,   // B(shape, 1): CDF x^shape
};

/// Inverse-CDF map of a uniform variate onto a one-unit-shape Beta law.
double beta_unit_shape_from_uniform(double u, double shape, BetaSide side);

double beta_unit_shape(RngStream& rng, double shape, BetaSide side);

/// Conic blending coefficients. a lies in [0, 2], b in [-1, 1], E[a + b] = 1.
struct ConicWeights {
  double a = 1.0;
  double b = 0.0;
};

/// a ~ 1/2 B(beta,1) + 1/2 (1 + B(1,beta)),  b ~ 1/2 B(1,beta) + 1/2 (-B(1,beta)).
/// Each coefficient picks its mixture branch with its own fair coin.
ConicWeights sample_conic_weights(RngStream& rng, double beta);

enum class BlendMethod { Arithmetic, Geometric, PixelMix, ElementMix };
inline constexpr std::size_t kBlendMethodCount = 4;

std::string_view to_string(BlendMethod method);

struct BlendMethodId {
  BlendMethod tag;
  double probability;
};

/// (1/3, 1/3, 1/6, 1/6) over Arithmetic, Geometric, PixelMix, ElementMix.
std::array<BlendMethodId, kBlendMethodCount> default_blend_weights();

/// Throws ParameterError unless the list is non-empty, non-negative and sums
/// to 1 within 1e-9.
void validate_blend_weights(std::span<const BlendMethodId> weights);

/// Multinomial draw over the given methods.
BlendMethodId choose_blend_method(RngStream& rng, std::span<const BlendMethodId> weights);

/// Which of the three pipeline samples is returned; uniform over {0, 1, 2}.
int choose_layer_exit(RngStream& rng);

}  // namespace layermix
