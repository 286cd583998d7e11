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

#include "layermix/image.hpp"

#include <algorithm>
#include <cmath>

namespace layermix {

std::string to_string(const ImageShape& shape) {
  return std::to_string(shape.height) + "x" + std::to_string(shape.width) + "x" +
         std::to_string(shape.channels);
}

Image::Image(ImageShape shape, float fill) : shape_(shape) {
  if (!shape.valid()) throw ShapeError("invalid image shape " + to_string(shape));
  data_.assign(shape.size(), fill);
}

Image::Image(ImageShape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
  if (!shape.valid()) throw ShapeError("invalid image shape " + to_string(shape));
  if (data_.size() != shape.size()) {
    throw ShapeError("image data has " + std::to_string(data_.size()) + " elements, shape " +
                     to_string(shape) + " needs " + std::to_string(shape.size()));
  }
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
}

void clip_unit(Image& img) {
  for (float& v : img.data()) {
    if (std::isnan(v)) {
      v = 0.0f;
    } else {
      v = std::clamp(v, 0.0f, 1.0f);
    }
  }
}

bool within_unit_range(const Image& img) {
  return std::all_of(img.data().begin(), img.data().end(),
                     [](float v) { return v >= 0.0f && v <= 1.0f; });
}

Image flip_horizontal(const Image& img) {
  Image out(img.shape());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(y, img.width() - 1 - x, c);
  return out;
}

Image flip_vertical(const Image& img) {
  Image out(img.shape());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(img.height() - 1 - y, x, c);
  return out;
}

namespace {

// Written relative to G so that r == g == b returns g bit-exactly.
inline float luminance(float r, float g, float b) {
  if (r == g && g == b) return g;
  const double y = static_cast<double>(g) + 0.299 * (static_cast<double>(r) - g) +
                   0.114 * (static_cast<double>(b) - g);
  return static_cast<float>(std::clamp(y, 0.0, 1.0));
}

}  // namespace

Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.shape());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const float l = luminance(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2));
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = l;
    }
  }
  return out;
}

Image with_channels(const Image& img, int channels) {
  if (channels != 1 && channels != 3) throw ShapeError("channels must be 1 or 3");
  if (img.channels() == channels) return img;
  Image out({img.height(), img.width(), channels});
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (channels == 3) {
        const float v = img.at(y, x, 0);
        for (int c = 0; c < 3; ++c) out.at(y, x, c) = v;
      } else {
        out.at(y, x, 0) = luminance(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2));
      }
    }
  }
  return out;
}

bool channels_equal(const Image& img) {
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 1; c < img.channels(); ++c)
        if (img.at(y, x, c) != img.at(y, x, 0)) return false;
  return true;
}

Image resize_bilinear(const Image& img, int height, int width) {
  if (height <= 0 || width <= 0) throw ShapeError("resize target must be positive");
  if (height == img.height() && width == img.width()) return img;
  Image out({height, width, img.channels()});
  const double sy = static_cast<double>(img.height()) / height;
  const double sx = static_cast<double>(img.width()) / width;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;
      for (int c = 0; c < img.channels(); ++c) {
        const double top = (1.0 - wx) * img.at(y0, x0, c) + wx * img.at(y0, x1, c);
        const double bottom = (1.0 - wx) * img.at(y1, x0, c) + wx * img.at(y1, x1, c);
        out.at(y, x, c) = static_cast<float>(std::clamp((1.0 - wy) * top + wy * bottom, 0.0, 1.0));
      }
    }
  }
  return out;
}

Image crop(const Image& img, int top, int left, int height, int width) {
  if (top < 0 || left < 0 || height <= 0 || width <= 0 || top + height > img.height() ||
      left + width > img.width()) {
    throw ShapeError("crop window outside image");
  }
  Image out({height, width, img.channels()});
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(top + y, left + x, c);
  return out;
}

}  // namespace layermix
