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

#include <algorithm>
#include <numeric>

#include "layermix/pipeline.hpp"
#include "test_support.hpp"

using namespace layermix;

namespace {

const ImageShape kShape{8, 8, 3};

FractalBank small_bank() { return testing::random_bank(4, {12, 12, 3}, 77, true); }

// Straight-line replay of the three layers from the component operations.
Image replay(const Image& img, const FractalBank& bank, const PipelineConfig& cfg, RngStream& rng,
             int& exit_layer) {
  const auto weights = cfg.blend_weights();
  const BlendOptions opts = cfg.blend_options();
  exit_layer = choose_layer_exit(rng);
  const TransformDescriptor& desc = sample_transform(rng);
  Image y = apply_transform(img, desc, cfg.magnitude, rng);
  if (exit_layer == 0) return y;
  const Image img2 = apply_transform(img, desc, cfg.magnitude, rng);
  y = blend(y, img2, choose_blend_method(rng, weights).tag, rng, opts);
  if (exit_layer == 1) return y;
  const Image fractal = sample_fractal(bank, rng, img.shape());
  y = blend(y, fractal, choose_blend_method(rng, weights).tag, rng, opts);
  return apply_transform(y, desc, cfg.magnitude, rng);
}

}  // namespace

TEST_CASE("layermix matches a replay of its component draws") {
  const FractalBank bank = small_bank();
  PipelineConfig cfg;
  int exits[3] = {0, 0, 0};
  for (std::uint64_t i = 0; i < 300; ++i) {
    const Image img = testing::random_image(kShape, i);
    RngStream a(51, i), b(51, i);
    int exit_layer = -1;
    const Image expected = replay(img, bank, cfg, a, exit_layer);
    const LayerSample got = layermix::layermix(img, bank, cfg, b);
    REQUIRE(got.exit_layer == exit_layer);
    REQUIRE(got.image == expected);
    REQUIRE(a.counter() == b.counter());
    ++exits[exit_layer];
  }
  CHECK(exits[0] > 0);
  CHECK(exits[1] > 0);
  CHECK(exits[2] > 0);
}

TEST_CASE("exit 0 is a single transform of the input") {
  const FractalBank bank = small_bank();
  PipelineConfig cfg;
  const Image img = testing::random_image(kShape, 3);
  RngStream rng(52, 0);
  const LayerSample s = layermix::layermix(img, bank, cfg, rng, RunOptions{false, 0});
  REQUIRE(s.aug_stages.size() == 1);
  CHECK(s.blend_trace.empty());
  CHECK(!s.fractal_index);
  CHECK(s.image == apply_transform_at_level(img, s.transform_kind, s.aug_stages[0].level));
}

TEST_CASE("every Aug stage of one call shares its kind") {
  const FractalBank bank = small_bank();
  PipelineConfig cfg;
  RngStream rng(53, 0);
  const Image img = testing::random_image(kShape, 4);
  for (int i = 0; i < 2000; ++i) {
    const LayerSample s = layermix::layermix(img, bank, cfg, rng);
    REQUIRE(trace_is_consistent(s, PipelineStructure::LayerMix));
    for (const auto& st : s.aug_stages) REQUIRE(st.kind == s.transform_kind);
  }
}

TEST_CASE("seeded calls are bit-identical") {
  const FractalBank bank = small_bank();
  PipelineConfig cfg;
  const Image img = testing::random_image(kShape, 5);
  for (auto structure : {PipelineStructure::LayerMix, PipelineStructure::Iid}) {
    for (std::uint64_t id = 0; id < 50; ++id) {
      RngStream a(54, id), b(54, id);
      REQUIRE(run_pipeline(structure, img, bank, cfg, a) ==
              run_pipeline(structure, img, bank, cfg, b));
    }
  }
}

TEST_CASE("batches") {
  const FractalBank bank = small_bank();
  PipelineConfig cfg;
  cfg.seed = 99;
  std::vector<Image> imgs;
  for (std::uint64_t i = 0; i < 24; ++i) imgs.push_back(testing::random_image(kShape, 200 + i));

  const auto serial = layermix_batch(imgs, bank, cfg, 1);
  REQUIRE(serial.size() == imgs.size());

  SUBCASE("equal to independent single calls") {
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      RngStream rng(cfg.seed, i);
      CHECK(layermix::layermix(imgs[i], bank, cfg, rng) == serial[i]);
    }
  }
  SUBCASE("parallel execution is bit-identical") {
    CHECK(layermix_batch(imgs, bank, cfg, 3) == serial);
    CHECK(layermix_batch(imgs, bank, cfg, 8) == serial);
    CHECK(layermix_batch(imgs, bank, cfg, 0) == serial);
  }
  SUBCASE("permuting images with their ids permutes outputs") {
    std::vector<std::size_t> perm(imgs.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 gen(5);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<Image> shuffled;
    std::vector<std::uint64_t> ids;
    for (auto p : perm) {
      shuffled.push_back(imgs[p]);
      ids.push_back(p);
    }
    const auto out = layermix_batch(shuffled, ids, bank, cfg, 2);
    for (std::size_t j = 0; j < perm.size(); ++j) CHECK(out[j] == serial[perm[j]]);
  }
  SUBCASE("mixed shapes are rejected") {
    imgs.push_back(testing::random_image({4, 4, 3}, 1));
    CHECK_THROWS_AS(layermix_batch(imgs, bank, cfg), ShapeError);
  }
}

TEST_CASE("exit layer is uniform") {
  const FractalBank bank = testing::random_bank(2, {4, 4, 3}, 78, true);
  PipelineConfig cfg;
  const Image img = testing::random_image({4, 4, 3}, 6);
  RngStream rng(55, 0);
  std::vector<std::uint64_t> counts(3, 0);
  for (int i = 0; i < 300000; ++i) ++counts[layermix::layermix(img, bank, cfg, rng).exit_layer];
  CHECK(testing::chi_square_p(counts, {1.0 / 3, 1.0 / 3, 1.0 / 3}) > 0.01);
}

TEST_CASE("layer-2 kinds agree always under layermix and 1/11 of the time under iid") {
  const FractalBank bank = testing::random_bank(2, {4, 4, 3}, 79, true);
  PipelineConfig cfg;
  const Image img = testing::random_image({4, 4, 3}, 7);
  constexpr int n = 100000;
  int equal_lm = 0, equal_iid = 0;
  RngStream a(56, 0), b(56, 1);
  for (int i = 0; i < n; ++i) {
    const LayerSample lm = layermix::layermix(img, bank, cfg, a, RunOptions{false, 1});
    const LayerSample iid = iid_pipeline(img, bank, cfg, b, RunOptions{false, 1});
    REQUIRE(trace_is_consistent(iid, PipelineStructure::Iid));
    equal_lm += lm.aug_stages[0].kind == lm.aug_stages[1].kind;
    equal_iid += iid.aug_stages[0].kind == iid.aug_stages[1].kind;
  }
  CHECK(equal_lm == n);
  CHECK(std::abs(equal_iid / double(n) - 1.0 / 11.0) < 0.01);
}

TEST_CASE("a single-kind transform set makes iid and layermix agree") {
  const FractalBank bank = small_bank();
  PipelineConfig cfg;
  cfg.transform_kinds = {TransformKind::Rotate};
  const Image img = testing::random_image(kShape, 8);
  for (std::uint64_t id = 0; id < 100; ++id) {
    RngStream a(57, id), b(57, id);
    const LayerSample lm = layermix::layermix(img, bank, cfg, a);
    const LayerSample iid = iid_pipeline(img, bank, cfg, b);
    CHECK(lm.transform_kind == TransformKind::Rotate);
    // iid spends one extra kind draw per later stage, so only the structure matches.
    CHECK(iid.transform_kind == TransformKind::Rotate);
    CHECK(trace_is_consistent(iid, PipelineStructure::LayerMix));
  }
}

TEST_CASE("outputs stay in range for random inputs and configs") {
  const FractalBank bank = small_bank();
  std::mt19937_64 gen(58);
  RngStream rng(58, 0);
  for (int i = 0; i < 20000; ++i) {
    PipelineConfig cfg;
    cfg.magnitude = static_cast<int>(gen() % 11);
    cfg.blending_ratio = 0.2 + (gen() % 100) / 10.0;
    const Image img = testing::random_image({6, 5, 3}, gen());
    const LayerSample s = layermix::layermix(img, bank, cfg, rng);
    REQUIRE(s.image.shape() == img.shape());
    REQUIRE(within_unit_range(s.image));
  }
}

TEST_CASE("keep_layers records every intermediate sample") {
  const FractalBank bank = small_bank();
  PipelineConfig cfg;
  const Image img = testing::random_image(kShape, 9);
  RngStream a(59, 0), b(59, 0);
  const LayerSample kept = layermix::layermix(img, bank, cfg, a, RunOptions{true, 2});
  const LayerSample plain = layermix::layermix(img, bank, cfg, b, RunOptions{false, 2});
  REQUIRE(kept.layers.size() == 3);
  CHECK(kept.layers.back() == plain.image);
  CHECK(kept.image == plain.image);
}

TEST_CASE("invalid configurations and inputs") {
  const FractalBank bank = small_bank();
  const Image img = testing::random_image(kShape, 10);
  RngStream rng(60, 0);
  PipelineConfig cfg;
  cfg.magnitude = 11;
  CHECK_THROWS_AS(layermix::layermix(img, bank, cfg, rng), ParameterError);
  cfg = {};
  cfg.blending_ratio = 0.0;
  CHECK_THROWS_AS(layermix::layermix(img, bank, cfg, rng), ParameterError);
  cfg = {};
  cfg.blend_probabilities = {0.5, 0.5, 0.5, 0.0};
  CHECK_THROWS_AS(layermix::layermix(img, bank, cfg, rng), ParameterError);
  cfg = {};
  CHECK_THROWS_AS(layermix::layermix(img, bank, cfg, rng, RunOptions{false, 3}), ParameterError);
  Image bad = img;
  bad.at(0, 0, 0) = 1.5f;
  CHECK_THROWS_AS(layermix::layermix(bad, bank, cfg, rng), ParameterError);
}
