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

#include "layermix/fractal_bank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "layermix/image_io.hpp"

namespace fs = std::filesystem;

namespace layermix {

namespace {

std::vector<fs::path> read_manifest(const fs::path& root, const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(root / line);
  }
  return out;
}

}  // namespace

std::vector<fs::path> list_image_files(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

FractalBank FractalBank::load(const fs::path& root, const BankLoadOptions& options) {
  if (!fs::is_directory(root)) throw IoError("fractal directory not found: " + root.string());
  FractalBank bank;
  bank.root_ = root;
  bank.grayscale_ = options.grayscale;
  bank.policy_ = options.cache;

  const auto candidates =
      options.manifest ? read_manifest(root, *options.manifest) : list_image_files(root);
  for (const auto& path : candidates) {
    try {
      Image img = bank.prepare(read_image(path));
      bank.entries_.push_back(path);
      if (bank.policy_ == CachePolicy::LoadAll) bank.cache_.push_back(std::move(img));
    } catch (const IoError& e) {
      std::cerr << "warning: skipping " << path.string() << ": " << e.what() << "\n";
      bank.skipped_.push_back(path);
    }
  }
  bank.count_ = bank.entries_.size();
  if (bank.count_ == 0) {
    throw EmptyBankError("no decodable images in " + root.string() + " (" +
                         std::to_string(bank.skipped_.size()) + " skipped)");
  }
  return bank;
}

FractalBank FractalBank::from_images(std::vector<Image> images, bool grayscale) {
  if (images.empty()) throw EmptyBankError("fractal bank needs at least one image");
  FractalBank bank;
  bank.grayscale_ = grayscale;
  bank.policy_ = CachePolicy::LoadAll;
  for (auto& img : images) {
    if (img.empty()) throw ShapeError("fractal bank image is empty");
    bank.cache_.push_back(bank.prepare(std::move(img)));
  }
  bank.count_ = bank.cache_.size();
  return bank;
}

Image FractalBank::prepare(Image img) const {
  clip_unit(img);
  if (grayscale_) return with_channels(img, 1);
  return img;
}

Image FractalBank::entry(std::size_t index) const {
  if (index >= count_) throw std::out_of_range("fractal index out of range");
  if (policy_ == CachePolicy::LoadAll) return cache_[index];
  return prepare(read_image(entries_[index]));
}

FractalBank load_bank(const fs::path& root, bool grayscale) {
  return FractalBank::load(root, BankLoadOptions{grayscale, CachePolicy::LoadAll, std::nullopt});
}

Image resize_to_cover(const Image& img, int target_height, int target_width) {
  if (img.height() == target_height && img.width() == target_width) return img;
  const double scale = std::max(static_cast<double>(target_height) / img.height(),
                                static_cast<double>(target_width) / img.width());
  const int h = std::max(target_height, static_cast<int>(std::lround(img.height() * scale)));
  const int w = std::max(target_width, static_cast<int>(std::lround(img.width() * scale)));
  return resize_bilinear(img, h, w);
}

FractalDraw draw_fractal(const FractalBank& bank, RngStream& rng, ImageShape target) {
  if (!target.valid()) throw ShapeError("invalid fractal target shape " + to_string(target));
  if (bank.count() == 0) throw EmptyBankError("fractal bank is empty");
  FractalDraw draw;
  draw.index = static_cast<std::size_t>(rng.uniform_index(bank.count()));
  draw.flipped_horizontal = rng.bernoulli(0.5);
  draw.flipped_vertical = rng.bernoulli(0.5);

  Image img = bank.entry(draw.index);
  if (draw.flipped_horizontal) img = flip_horizontal(img);
  if (draw.flipped_vertical) img = flip_vertical(img);
  img = resize_to_cover(img, target.height, target.width);
  const auto top = static_cast<int>(rng.uniform_index(img.height() - target.height + 1));
  const auto left = static_cast<int>(rng.uniform_index(img.width() - target.width + 1));
  if (img.height() != target.height || img.width() != target.width) {
    img = crop(img, top, left, target.height, target.width);
  }
  draw.image = with_channels(img, target.channels);
  return draw;
}

Image sample_fractal(const FractalBank& bank, RngStream& rng, ImageShape target) {
  return draw_fractal(bank, rng, target).image;
}

}  // namespace layermix
