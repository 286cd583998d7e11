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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "layermix/image.hpp"
#include "layermix/sampling.hpp"

namespace layermix {

class EmptyBankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CachePolicy { LoadAll, Lazy };

struct BankLoadOptions {
  bool grayscale = true;
  CachePolicy cache = CachePolicy::LoadAll;
  /// One path per line, relative to the bank root; '#' starts a comment.
  /// When given, it pins the entry order instead of the sorted directory walk.
  std::optional<std::filesystem::path> manifest;
};

/// Immutable collection of mixing pictures. Safe for concurrent readers.
class FractalBank {
 public:
  static FractalBank load(const std::filesystem::path& root, const BankLoadOptions& options = {});
  static FractalBank from_images(std::vector<Image> images, bool grayscale);

  std::size_t count() const { return count_; }
  bool grayscale() const { return grayscale_; }
  std::size_t skipped() const { return skipped_.size(); }
  const std::vector<std::filesystem::path>& skipped_files() const { return skipped_; }
  const std::vector<std::filesystem::path>& entries() const { return entries_; }
  const std::filesystem::path& root() const { return root_; }

  /// Entry i as served (single luminance channel when grayscale is on).
  Image entry(std::size_t index) const;

 private:
  Image prepare(Image img) const;

  std::filesystem::path root_;
  std::vector<std::filesystem::path> entries_;
  std::vector<std::filesystem::path> skipped_;
  std::vector<Image> cache_;
  std::size_t count_ = 0;
  bool grayscale_ = true;
  CachePolicy policy_ = CachePolicy::LoadAll;
};

FractalBank load_bank(const std::filesystem::path& root, bool grayscale);

/// Image files under `root`, recursively, in lexicographic path order.
std::vector<std::filesystem::path> list_image_files(const std::filesystem::path& root);

/// Picks an entry uniformly, flips horizontally and vertically with
/// probability 1/2 each, scales so the image covers `target`, then takes a
/// uniform random crop of exactly the target shape.
Image sample_fractal(const FractalBank& bank, RngStream& rng, ImageShape target);

/// Same as sample_fractal, reporting the chosen entry and flips.
struct FractalDraw {
  Image image;
  std::size_t index = 0;
  bool flipped_horizontal = false;
  bool flipped_vertical = false;
};
FractalDraw draw_fractal(const FractalBank& bank, RngStream& rng, ImageShape target);

/// Bilinear resize so the image covers `target` while keeping its aspect
/// ratio; images that already match are returned unchanged.
Image resize_to_cover(const Image& img, int target_height, int target_width);

}  // namespace layermix
