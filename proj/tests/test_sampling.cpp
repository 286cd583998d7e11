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
#include <random>
#include <vector>

#include "layermix/sampling.hpp"
#include "test_support.hpp"

using namespace layermix;

TEST_CASE("philox4x32-10 known answers") {
  using Block = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and addressable by counter") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 100; ++i) first.push_back(a.next_u64());
  for (int i = 0; i < 100; ++i) CHECK(b.next_u64() == first[i]);

  // Jumping straight to counter 37 gives the 38th draw.
  RngStream jumped(42, 7, 37);
  CHECK(jumped.next_u64() == first[37]);

  RngStream other_seed(43, 7);
  RngStream other_stream(42, 8);
  CHECK(other_seed.next_u64() != first[0]);
  CHECK(other_stream.next_u64() != first[0]);
}

TEST_CASE("distinct stream ids are uncorrelated") {
  constexpr int n = 200000;
  RngStream a(9, 0);
  RngStream b(9, 1);
  RngStream c = a.split(5);
  double sab = 0, sac = 0, sa = 0, sb = 0, sc = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform() - 0.5;
    const double y = b.uniform() - 0.5;
    const double z = c.uniform() - 0.5;
    sab += x * y;
    sac += x * z;
    sa += x;
    sb += y;
    sc += z;
  }
  // corr of independent uniforms has standard error 1/sqrt(n).
  const double bound = 4.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs((sab / n - sa / n * sb / n) * 12.0) < bound);
  CHECK(std::abs((sac / n - sa / n * sc / n) * 12.0) < bound);
}

TEST_CASE("uniform and uniform_index ranges") {
  RngStream rng(1, 1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.uniform_index(7) < 7);
  }
  CHECK_THROWS_AS(rng.uniform_index(0), ParameterError);
}

TEST_CASE("beta_unit_shape identity and parameter errors") {
  CHECK(beta_unit_shape_from_uniform(0.37, 1.0, BetaSide::AlphaIsOne) ==
        doctest::Approx(0.37).epsilon(1e-15));
  CHECK(beta_unit_shape_from_uniform(0.37, 1.0, BetaSide::BetaIsOne) ==
        doctest::Approx(0.37).epsilon(1e-15));
  RngStream rng(0, 0);
  CHECK_THROWS_AS(beta_unit_shape(rng, 0.0, BetaSide::BetaIsOne), ParameterError);
  CHECK_THROWS_AS(beta_unit_shape(rng, -2.0, BetaSide::AlphaIsOne), ParameterError);
  CHECK_THROWS_AS(sample_conic_weights(rng, 0.0), ParameterError);
}

TEST_CASE("beta_unit_shape means match shape/(shape+1) and 1/(1+shape)") {
  constexpr int n = 1'000'000;
  RngStream rng(3, 0);
  double s_beta_one = 0.0, s_alpha_one = 0.0;
  for (int i = 0; i < n; ++i) {
    s_beta_one += beta_unit_shape(rng, 3.0, BetaSide::BetaIsOne);
    s_alpha_one += beta_unit_shape(rng, 3.0, BetaSide::AlphaIsOne);
  }
  CHECK(std::abs(s_beta_one / n - 0.75) < 0.002);
  CHECK(std::abs(s_alpha_one / n - 0.25) < 0.002);
}

namespace {

// Rejection sampler for the densities shape * x^(shape-1) and
// shape * (1-x)^(shape-1) on [0, 1], independent of the inverse-CDF path.
std::vector<double> rejection_beta(double shape, BetaSide side, int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double peak = std::max(shape, 1.0) * (shape < 1.0 ? 1e3 : 1.0);
  std::vector<double> out;
  while (static_cast<int>(out.size()) < n) {
    const double x = unit(gen);
    const double base = side == BetaSide::BetaIsOne ? x : 1.0 - x;
    const double density = shape * std::pow(base, shape - 1.0);
    if (unit(gen) * peak < density) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("inverse-CDF beta matches a rejection-sampling oracle (KS)") {
  constexpr int n = 100000;
  for (double shape : {2.0, 3.0, 5.0}) {
    for (BetaSide side : {BetaSide::BetaIsOne, BetaSide::AlphaIsOne}) {
      RngStream rng(11, static_cast<std::uint64_t>(shape * 10) + (side == BetaSide::BetaIsOne));
      std::vector<double> ours(n);
      for (auto& x : ours) x = beta_unit_shape(rng, shape, side);
      const double p = testing::ks_two_sample_p(ours, rejection_beta(shape, side, n, 77));
      INFO("shape=" << shape << " p=" << p);
      CHECK(p > 0.01);
    }
  }
}

TEST_CASE("conic weights: support and beta=3 means") {
  constexpr int n = 1'000'000;
  RngStream rng(5, 0);
  double sa = 0, sb = 0;
  for (int i = 0; i < n; ++i) {
    const ConicWeights w = sample_conic_weights(rng, 3.0);
    REQUIRE((w.a >= 0.0 && w.a <= 2.0));
    REQUIRE((w.b >= -1.0 && w.b <= 1.0));
    sa += w.a;
    sb += w.b;
  }
  CHECK(std::abs(sa / n - 1.0) < 0.003);
  CHECK(std::abs(sb / n) < 0.003);
  CHECK(std::abs((sa + sb) / n - 1.0) < 0.004);
}

TEST_CASE("conic weights: mean(a+b) within 4 analytic standard errors for several beta") {
  constexpr int n = 200000;
  for (double beta : {0.3, 1.0, 3.0, 8.0, 25.0}) {
    // Closed-form second moments of the two Beta mixtures.
    const double ex2 = beta / (beta + 2.0);                  // B(beta, 1)
    const double ey = 1.0 / (beta + 1.0);                    // B(1, beta)
    const double ey2 = 2.0 / ((beta + 1.0) * (beta + 2.0));  // B(1, beta)
    const double var_a = 0.5 * ex2 + 0.5 * (1.0 + 2.0 * ey + ey2) - 1.0;
    const double var_b = ey2;
    const double se = std::sqrt((var_a + var_b) / n);

    RngStream rng(6, static_cast<std::uint64_t>(beta * 100));
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const ConicWeights w = sample_conic_weights(rng, beta);
      s += w.a + w.b;
    }
    INFO("beta=" << beta);
    CHECK(std::abs(s / n - 1.0) < 4.0 * se);
  }
}

TEST_CASE("blend method selection") {
  SUBCASE("default frequencies") {
    constexpr int n = 1'000'000;
    const auto weights = default_blend_weights();
    RngStream rng(8, 0);
    std::array<int, 4> counts{};
    for (int i = 0; i < n; ++i)
      ++counts[static_cast<std::size_t>(choose_blend_method(rng, weights).tag)];
    const std::array<double, 4> expected{1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0};
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(std::abs(counts[k] / double(n) - expected[k]) < 0.003);
  }
  SUBCASE("degenerate lists") {
    RngStream rng(8, 1);
    const std::array<BlendMethodId, 1> single{{{BlendMethod::Geometric, 1.0}}};
    const std::array<BlendMethodId, 4> one_hot{{{BlendMethod::Arithmetic, 1.0},
                                                {BlendMethod::Geometric, 0.0},
                                                {BlendMethod::PixelMix, 0.0},
                                                {BlendMethod::ElementMix, 0.0}}};
    for (int i = 0; i < 1000; ++i) {
      CHECK(choose_blend_method(rng, single).tag == BlendMethod::Geometric);
      CHECK(choose_blend_method(rng, one_hot).tag == BlendMethod::Arithmetic);
    }
  }
  SUBCASE("invalid lists") {
    RngStream rng(8, 2);
    CHECK_THROWS_AS(choose_blend_method(rng, std::span<const BlendMethodId>{}), ParameterError);
    const std::array<BlendMethodId, 2> unnormalized{
        {{BlendMethod::Arithmetic, 0.5}, {BlendMethod::Geometric, 0.4}}};
    CHECK_THROWS_AS(choose_blend_method(rng, unnormalized), ParameterError);
  }
}

TEST_CASE("layer exit is uniform over {0,1,2}") {
  constexpr int n = 300000;
  RngStream rng(12, 0);
  std::vector<std::uint64_t> counts(3, 0);
  for (int i = 0; i < n; ++i) {
    const int e = choose_layer_exit(rng);
    REQUIRE((e >= 0 && e <= 2));
    ++counts[static_cast<std::size_t>(e)];
  }
  for (auto c : counts) CHECK(std::abs(c / double(n) - 1.0 / 3.0) < 0.005);
  CHECK(testing::chi_square_p(counts, {1.0 / 3, 1.0 / 3, 1.0 / 3}) > 0.01);

  RngStream a(12, 1), b(12, 1);
  for (int i = 0; i < 100; ++i) CHECK(choose_layer_exit(a) == choose_layer_exit(b));
}

TEST_CASE("standard normals match a reference sampler") {
  RngStream rng(17, 0);
  std::mt19937_64 gen(17);
  std::normal_distribution<double> reference(0.0, 1.0);
  constexpr int pairs = 100000;
  std::vector<double> ours, theirs;
  double sum = 0.0, sum_sq = 0.0, cross = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const auto [z0, z1] = rng.standard_normal_pair();
    ours.push_back(z0);
    ours.push_back(z1);
    sum += z0 + z1;
    sum_sq += z0 * z0 + z1 * z1;
    cross += z0 * z1;
    theirs.push_back(reference(gen));
    theirs.push_back(reference(gen));
  }
  const double n = 2.0 * pairs;
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sum_sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cross / pairs) < 4.0 / std::sqrt(double(pairs)));
  CHECK(testing::ks_two_sample_p(ours, theirs) > 0.01);
}
