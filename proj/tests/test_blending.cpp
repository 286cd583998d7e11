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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "layermix/blending.hpp"
#include "test_support.hpp"

using namespace layermix;

namespace {

Image constant(ImageShape shape, float v) { return Image(shape, v); }

bool all_close(const Image& img, double v, double tol) {
  for (float x : img.data())
    if (std::abs(x - v) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("arithmetic blend examples") {
  const ImageShape s{4, 5, 3};
  const Image z0 = testing::random_image(s, 1);
  const Image z1 = testing::random_image(s, 2);
  CHECK(blend_arithmetic(z0, z1, {1.0, 0.0}) == z0);
  CHECK(all_close(blend_arithmetic(constant(s, 0.2f), constant(s, 0.6f), {0.5, 0.5}), 0.4, 1e-7));
  CHECK(all_close(blend_arithmetic(constant(s, 0.5f), constant(s, 0.5f), {2.0, 1.0}), 1.0, 0.0));
  CHECK(all_close(blend_arithmetic(constant(s, 0.5f), constant(s, 0.5f), {0.0, -1.0}), 0.0, 0.0));
  CHECK_THROWS_AS(blend_arithmetic(z0, Image({4, 5, 1}), {1.0, 0.0}), ShapeError);
}

TEST_CASE("geometric blend examples") {
  const ImageShape s{3, 3, 3};
  const Image z0 = testing::random_image(s, 3);
  const Image z1 = testing::random_image(s, 4);
  CHECK(blend_geometric(z0, z1, {1.0, 0.0}, 0.0) == z0);
  const Image half = blend_geometric(z0, z0, {0.5, 0.5}, 0.0);
  for (std::size_t i = 0; i < half.data().size(); ++i)
    CHECK(half.data()[i] == doctest::Approx(z0.data()[i]).epsilon(1e-6));
  CHECK(
      all_close(blend_geometric(constant(s, 0.5f), constant(s, 0.5f), {1.0, 1.0}, 0.0), 0.5, 1e-7));
  // Zero base under a negative exponent stays finite with eps and clips.
  const Image guarded = blend_geometric(constant(s, 0.0f), constant(s, 0.3f), {-0.0, -1.0});
  CHECK(within_unit_range(guarded));
  CHECK_THROWS_AS(blend_geometric(z0, z1, {1.0, 0.0}, -1.0), ParameterError);
}

TEST_CASE("geometric blend equals the log-domain form") {
  RngStream rng(31, 0);
  const ImageShape s{6, 7, 3};
  for (int trial = 0; trial < 200; ++trial) {
    Image z0 = testing::random_image(s, 10 + trial);
    Image z1 = testing::random_image(s, 1000 + trial);
    for (float& v : z0.data()) v = 0.05f + 0.95f * v;
    for (float& v : z1.data()) v = 0.05f + 0.95f * v;
    const ConicWeights w = sample_conic_weights(rng, 3.0);
    const Image g = blend_geometric(z0, z1, w, 0.0);
    for (std::size_t i = 0; i < g.data().size(); ++i) {
      const double log_y = w.a * std::log(double(z0.data()[i])) +
                           w.b * std::log(double(z1.data()[i])) + (w.a + w.b - 1.0) * std::log(2.0);
      const double expected = std::clamp(std::exp(log_y), 0.0, 1.0);
      REQUIRE(std::abs(g.data()[i] - expected) < 1e-6);
    }
  }
}

TEST_CASE("masked blend examples and complementarity") {
  const ImageShape s{4, 4, 3};
  const Image z0 = testing::random_image(s, 5);
  const Image z1 = testing::random_image(s, 6);
  for (auto gran : {MaskGranularity::PerPixel, MaskGranularity::PerElement}) {
    CHECK(blend_masked(z0, z1, make_mask(s, gran, true)) == z0);
    CHECK(blend_masked(z0, z1, make_mask(s, gran, false)) == z1);
  }

  BlendMask checker = make_mask(s, MaskGranularity::PerPixel, false);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) checker.bits[y * 4 + x] = (x + y) % 2 == 0;
  const Image cb = blend_masked(constant(s, 0.0f), constant(s, 1.0f), checker);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      for (int c = 0; c < 3; ++c) CHECK(cb.at(y, x, c) == ((x + y) % 2 == 0 ? 0.0f : 1.0f));

  RngStream rng(32, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto gran = trial % 2 ? MaskGranularity::PerElement : MaskGranularity::PerPixel;
    const BlendMask m = sample_mask(rng, s, gran);
    const Image p = blend_masked(z0, z1, m);
    const Image q = blend_masked(z1, z0, m);
    for (std::size_t i = 0; i < p.data().size(); ++i)
      REQUIRE(p.data()[i] + q.data()[i] == z0.data()[i] + z1.data()[i]);
  }

  CHECK_THROWS_AS(blend_masked(z0, z1, make_mask({4, 5, 3}, MaskGranularity::PerPixel, true)),
                  ShapeError);
  CHECK_THROWS_AS(blend_masked(z0, z1, make_mask({4, 4, 1}, MaskGranularity::PerElement, true)),
                  ShapeError);
}

TEST_CASE("sample_mask law") {
  const ImageShape s{8, 8, 3};
  SUBCASE("per-pixel masks never split a pixel") {
    RngStream rng(33, 0);
    const Image z0 = constant(s, 0.0f);
    const Image z1 = constant(s, 1.0f);
    for (int trial = 0; trial < 100; ++trial) {
      const BlendMask m = sample_mask(rng, s, MaskGranularity::PerPixel);
      CHECK(m.bits.size() == 64);
      CHECK(channels_equal(blend_masked(z0, z1, m)));
    }
    const BlendMask e = sample_mask(rng, s, MaskGranularity::PerElement);
    CHECK(e.bits.size() == s.size());
  }
  SUBCASE("expected true fraction is one half") {
    RngStream rng(34, 0);
    std::uint64_t set = 0, total = 0;
    for (int trial = 0; trial < 20000; ++trial) {
      const BlendMask m = sample_mask(rng, s, MaskGranularity::PerElement);
      for (auto b : m.bits) set += b;
      total += m.bits.size();
    }
    CHECK(std::abs(double(set) / total - 0.5) < 0.01);
  }
  SUBCASE("fixed rate") {
    RngStream rng(35, 0);
    CHECK(sample_mask(rng, s, MaskGranularity::PerPixel, 1.0).bits ==
          make_mask(s, MaskGranularity::PerPixel, true).bits);
    CHECK(sample_mask(rng, s, MaskGranularity::PerPixel, 0.0).bits ==
          make_mask(s, MaskGranularity::PerPixel, false).bits);
    std::uint64_t set = 0, total = 0;
    for (int trial = 0; trial < 2000; ++trial) {
      const BlendMask m = sample_mask(rng, s, MaskGranularity::PerElement, 0.25);
      for (auto b : m.bits) set += b;
      total += m.bits.size();
    }
    CHECK(std::abs(double(set) / total - 0.25) < 0.005);
    CHECK_THROWS_AS(sample_mask(rng, s, MaskGranularity::PerPixel, 1.5), ParameterError);
  }
  SUBCASE("same seed, same mask") {
    RngStream a(36, 4), b(36, 4);
    CHECK(sample_mask(a, s, MaskGranularity::PerElement).bits ==
          sample_mask(b, s, MaskGranularity::PerElement).bits);
  }
}

TEST_CASE("blend dispatch") {
  const ImageShape s{5, 6, 3};
  const Image z = testing::random_image(s, 7);
  const Image other = testing::random_image(s, 8);
  RngStream rng(37, 0);

  SUBCASE("masked methods leave z0 = z1 unchanged") {
    CHECK(blend(z, z, BlendMethod::PixelMix, rng) == z);
    CHECK(blend(z, z, BlendMethod::ElementMix, rng) == z);
  }
  SUBCASE("outputs stay in range with the input shape") {
    for (int trial = 0; trial < 400; ++trial) {
      const auto method = static_cast<BlendMethod>(trial % 4);
      const Image out = blend(z, other, method, rng);
      REQUIRE(out.shape() == s);
      REQUIRE(within_unit_range(out));
    }
  }
  SUBCASE("arithmetic blend of equal images is Z on average") {
    // a + b <= 3 keeps 0.3 (a + b) under the upper clip; the lower clip rarely binds.
    const ImageShape px{1, 1, 1};
    const Image zz(px, 0.3f);
    constexpr int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += blend(zz, zz, BlendMethod::Arithmetic, rng).data()[0];
    CHECK(std::abs(sum / n - 0.3) < 0.003);
  }
  SUBCASE("dispatch draws are reproducible") {
    RngStream a(38, 2), b(38, 2);
    for (int k = 0; k < 4; ++k) {
      const auto method = static_cast<BlendMethod>(k);
      CHECK(blend(z, other, method, a) == blend(z, other, method, b));
    }
  }
}
