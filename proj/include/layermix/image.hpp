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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace layermix {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ImageShape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
           static_cast<std::size_t>(channels);
  }
  bool valid() const { return height > 0 && width > 0 && (channels == 1 || channels == 3); }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

std::string to_string(const ImageShape& shape);

/// Row-major H x W x C image with intensities in [0, 1].
class Image {
 public:
  Image() = default;
  explicit Image(ImageShape shape, float fill = 0.0f);
  Image(ImageShape shape, std::vector<float> data);

  const ImageShape& shape() const { return shape_; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  int channels() const { return shape_.channels; }
  bool empty() const { return data_.empty(); }

  float& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  float at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(shape_.channels) +
           static_cast<std::size_t>(c);
  }

  ImageShape shape_{};
  std::vector<float> data_;
};

void require_same_shape(const Image& a, const Image& b, const char* what);

/// Clamp every element into [0, 1]; NaN maps to 0.
void clip_unit(Image& img);
bool within_unit_range(const Image& img);

Image flip_horizontal(const Image& img);
Image flip_vertical(const Image& img);

/// Luminance 0.299 R + 0.587 G + 0.114 B replicated over all channels.
/// Single-channel images and pixels whose channels already agree are returned
/// unchanged, so the conversion is exactly idempotent.
Image to_grayscale(const Image& img);

/// Channel adapter: 1 -> 3 replicates, 3 -> 1 takes luminance.
Image with_channels(const Image& img, int channels);

bool channels_equal(const Image& img);

/// Bilinear resize with half-pixel centres and edge clamping.
Image resize_bilinear(const Image& img, int height, int width);

Image crop(const Image& img, int top, int left, int height, int width);

}  // namespace layermix
