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

#include "layermix/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace layermix {

void PipelineConfig::validate() const {
  if (magnitude < 0 || magnitude > kMaxMagnitude) {
    throw ParameterError("magnitude must be in [0, 10], got " + std::to_string(magnitude));
  }
  if (!(blending_ratio > 0.0)) throw ParameterError("blending ratio must be positive");
  if (!(eps_geometric >= 0.0)) throw ParameterError("geometric eps must be non-negative");
  if (mask_rate && !(*mask_rate >= 0.0 && *mask_rate <= 1.0)) {
    throw ParameterError("mask rate must be in [0, 1]");
  }
  validate_blend_weights(blend_weights());
}

std::array<BlendMethodId, kBlendMethodCount> PipelineConfig::blend_weights() const {
  return {{{BlendMethod::Arithmetic, blend_probabilities[0]},
           {BlendMethod::Geometric, blend_probabilities[1]},
           {BlendMethod::PixelMix, blend_probabilities[2]},
           {BlendMethod::ElementMix, blend_probabilities[3]}}};
}

BlendOptions PipelineConfig::blend_options() const {
  return BlendOptions{blending_ratio, eps_geometric, mask_rate};
}

namespace {

struct AugResult {
  Image image;
  AugStage stage;
};

AugResult augment(const Image& input, const TransformDescriptor& desc, int magnitude,
                  AugInput source, RngStream& rng) {
  const double level = sample_level(desc, magnitude, rng);
  return {apply_transform_at_level(input, desc.kind, level), AugStage{desc.kind, level, source}};
}

}  // namespace

LayerSample run_pipeline(PipelineStructure structure, const Image& img, const FractalBank& bank,
                         const PipelineConfig& cfg, RngStream& rng, const RunOptions& options) {
  cfg.validate();
  if (img.empty()) throw ShapeError("pipeline input image is empty");
  if (!within_unit_range(img)) throw ParameterError("pipeline input must lie in [0, 1]");

  const auto weights = cfg.blend_weights();
  const BlendOptions blend_opts = cfg.blend_options();
  const bool shared = structure == PipelineStructure::LayerMix;

  LayerSample sample;
  sample.exit_layer = choose_layer_exit(rng);
  if (options.force_exit) {
    if (*options.force_exit < 0 || *options.force_exit > 2) {
      throw ParameterError("forced exit layer must be 0, 1 or 2");
    }
    sample.exit_layer = *options.force_exit;
  }

  const TransformDescriptor& first = sample_transform(rng, cfg.transform_kinds);
  auto next_kind = [&]() -> const TransformDescriptor& {
    return shared ? first : sample_transform(rng, cfg.transform_kinds);
  };
  auto finish = [&](Image image) {
    if (options.keep_layers) sample.layers.push_back(image);
    sample.image = std::move(image);
  };

  // Sample 1: the original through one Aug stage.
  AugResult aug1 = augment(img, first, cfg.magnitude, AugInput::Original, rng);
  sample.transform_kind = first.kind;
  sample.aug_stages.push_back(aug1.stage);
  finish(std::move(aug1.image));
  if (sample.exit_layer == 0) return sample;

  // Sample 2: a second Aug of the original, blended with sample 1.
  AugResult aug2 = augment(img, next_kind(), cfg.magnitude, AugInput::Original, rng);
  sample.aug_stages.push_back(aug2.stage);
  const BlendMethod method1 = choose_blend_method(rng, weights).tag;
  sample.blend_trace.push_back(method1);
  finish(blend(sample.image, aug2.image, method1, rng, blend_opts));
  if (sample.exit_layer == 1) return sample;

  // Sample 3: blend with a fractal, then one more Aug.
  FractalDraw fractal = draw_fractal(bank, rng, img.shape());
  sample.fractal_index = fractal.index;
  const BlendMethod method2 = choose_blend_method(rng, weights).tag;
  sample.blend_trace.push_back(method2);
  Image mixed = blend(sample.image, fractal.image, method2, rng, blend_opts);
  AugResult aug3 = augment(mixed, next_kind(), cfg.magnitude, AugInput::BlendOutput, rng);
  sample.aug_stages.push_back(aug3.stage);
  finish(std::move(aug3.image));
  return sample;
}

LayerSample layermix(const Image& img, const FractalBank& bank, const PipelineConfig& cfg,
                     RngStream& rng, const RunOptions& options) {
  return run_pipeline(PipelineStructure::LayerMix, img, bank, cfg, rng, options);
}

LayerSample iid_pipeline(const Image& img, const FractalBank& bank, const PipelineConfig& cfg,
                         RngStream& rng, const RunOptions& options) {
  return run_pipeline(PipelineStructure::Iid, img, bank, cfg, rng, options);
}

RngStream item_stream(const PipelineConfig& cfg, std::uint64_t index) {
  return RngStream(cfg.seed, index);
}

std::vector<LayerSample> layermix_batch(std::span<const Image> imgs, const FractalBank& bank,
                                        const PipelineConfig& cfg, unsigned workers,
                                        const RunOptions& options) {
  std::vector<std::uint64_t> ids(imgs.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return layermix_batch(imgs, ids, bank, cfg, workers, options);
}

std::vector<LayerSample> layermix_batch(std::span<const Image> imgs,
                                        std::span<const std::uint64_t> ids, const FractalBank& bank,
                                        const PipelineConfig& cfg, unsigned workers,
                                        const RunOptions& options) {
  cfg.validate();
  if (ids.size() != imgs.size()) throw ParameterError("layermix_batch: one id per image required");
  for (const auto& img : imgs) {
    if (img.shape() != imgs.front().shape()) {
      throw ShapeError("layermix_batch: images differ in shape (" + to_string(img.shape()) +
                       " vs " + to_string(imgs.front().shape()) + ")");
    }
  }
  std::vector<LayerSample> out(imgs.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers =
      static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, imgs.size())));

  auto run_one = [&](std::size_t i) {
    RngStream rng = item_stream(cfg, ids[i]);
    out[i] = layermix(imgs[i], bank, cfg, rng, options);
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < imgs.size(); ++i) run_one(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < imgs.size(); i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

bool trace_is_consistent(const LayerSample& sample, PipelineStructure structure) {
  const auto exit = static_cast<std::size_t>(sample.exit_layer);
  if (sample.exit_layer < 0 || sample.exit_layer > 2) return false;
  if (sample.blend_trace.size() != exit) return false;
  const std::size_t expected_augs = exit == 0 ? 1 : exit + 1;
  if (sample.aug_stages.size() != expected_augs) return false;
  if (sample.aug_stages.front().kind != sample.transform_kind) return false;
  // The two stages of layers 1-2 read the original; the last one reads a blend.
  for (std::size_t i = 0; i < sample.aug_stages.size(); ++i) {
    const AugInput want = i < 2 ? AugInput::Original : AugInput::BlendOutput;
    if (sample.aug_stages[i].input != want) return false;
  }
  if (structure == PipelineStructure::LayerMix) {
    for (const auto& stage : sample.aug_stages)
      if (stage.kind != sample.transform_kind) return false;
  }
  return sample.fractal_index.has_value() == (exit == 2);
}

}  // namespace layermix
