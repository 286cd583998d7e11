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
#include <optional>
#include <span>
#include <vector>

#include "layermix/blending.hpp"
#include "layermix/fractal_bank.hpp"
#include "layermix/image.hpp"
#include "layermix/sampling.hpp"
#include "layermix/transforms.hpp"

namespace layermix {

struct PipelineConfig {
  int magnitude = 8;
  double blending_ratio = 3.0;
  std::array<double, kBlendMethodCount> blend_probabilities{1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0,
                                                            1.0 / 6.0};
  bool grayscale_fractals = true;
  std::uint64_t seed = 0;
  double eps_geometric = kDefaultGeometricEps;
  /// Overrides the Uniform(0, 1) mixing rate of pixel/element masks.
  std::optional<double> mask_rate;
  /// Restricts the transform set; empty means all eleven kinds.
  std::vector<TransformKind> transform_kinds;

  /// Throws ParameterError on an out-of-domain field.
  void validate() const;
  std::array<BlendMethodId, kBlendMethodCount> blend_weights() const;
  BlendOptions blend_options() const;
};

/// Where an Aug stage took its input from.
enum class AugInput { Original, BlendOutput };

struct AugStage {
  TransformKind kind;
  double level;
  AugInput input;

  friend bool operator==(const AugStage&, const AugStage&) = default;
};

struct LayerSample {
  Image image;
  int exit_layer = 0;
  /// Kind of the first Aug stage. Under layermix every stage shares it.
  TransformKind transform_kind = TransformKind::Equalize;
  std::vector<AugStage> aug_stages;
  std::vector<BlendMethod> blend_trace;
  std::optional<std::size_t> fractal_index;
  /// Samples 1..3 in order, filled only when `keep_layers` was requested.
  std::vector<Image> layers;

  friend bool operator==(const LayerSample&, const LayerSample&) = default;
};

enum class PipelineStructure { LayerMix, Iid };

struct RunOptions {
  /// Record every intermediate sample up to the exit layer.
  bool keep_layers = false;
  /// Replace the drawn exit layer (the draw still happens, so the remaining
  /// stream is unchanged).
  std::optional<int> force_exit;
};

/// Three-layer structured mix: one transform kind shared by every Aug stage,
/// independent blend draws, and a fractal blended in at the last layer.
LayerSample layermix(const Image& img, const FractalBank& bank, const PipelineConfig& cfg,
                     RngStream& rng, const RunOptions& options = {});

/// Reference structure where each Aug stage draws its own transform kind.
LayerSample iid_pipeline(const Image& img, const FractalBank& bank, const PipelineConfig& cfg,
                         RngStream& rng, const RunOptions& options = {});

LayerSample run_pipeline(PipelineStructure structure, const Image& img, const FractalBank& bank,
                         const PipelineConfig& cfg, RngStream& rng, const RunOptions& options = {});

/// Stream for item `index` of a batch: RngStream(cfg.seed, index).
RngStream item_stream(const PipelineConfig& cfg, std::uint64_t index);

/// Each image i runs on item_stream(cfg, i); the result does not depend on
/// `workers`. workers == 0 picks the hardware concurrency.
std::vector<LayerSample> layermix_batch(std::span<const Image> imgs, const FractalBank& bank,
                                        const PipelineConfig& cfg, unsigned workers = 1,
                                        const RunOptions& options = {});

/// Item i runs on item_stream(cfg, ids[i]). Permuting images and ids together
/// permutes the outputs the same way.
std::vector<LayerSample> layermix_batch(std::span<const Image> imgs,
                                        std::span<const std::uint64_t> ids, const FractalBank& bank,
                                        const PipelineConfig& cfg, unsigned workers = 1,
                                        const RunOptions& options = {});

/// Structural check: no Aug stage consumes another Aug stage's output, the
/// trace lengths match the exit layer, and (for layermix) all kinds agree.
bool trace_is_consistent(const LayerSample& sample, PipelineStructure structure);

}  // namespace layermix
