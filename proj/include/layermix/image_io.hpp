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

#include <filesystem>
#include <stdexcept>

#include "layermix/image.hpp"

namespace layermix {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads PNG or JPEG. Grayscale files give 1 channel, colour files 3 (alpha
/// dropped). 16-bit data is scaled by 1/65535, 8-bit by 1/255.
/// Throws IoError when the file is missing or cannot be decoded.
Image read_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG, quantizing each value as round(x * 255).
void write_png(const std::filesystem::path& path, const Image& img);

/// round(clamp(x, 0, 1) * 255)
unsigned char quantize_u8(float x);

bool is_image_file(const std::filesystem::path& path);

}  // namespace layermix
