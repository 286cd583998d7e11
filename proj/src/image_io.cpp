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

#include "layermix/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace layermix {

unsigned char quantize_u8(float x) {
  const float clamped = std::isnan(x) ? 0.0f : std::clamp(x, 0.0f, 1.0f);
  return static_cast<unsigned char>(std::lround(clamped * 255.0f));
}

bool is_image_file(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

Image read_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw IoError("no such file: " + path.string());
  }
  cv::Mat mat;
  try {
    mat = cv::imread(path.string(), cv::IMREAD_ANYCOLOR | cv::IMREAD_ANYDEPTH);
  } catch (const cv::Exception& e) {
    throw IoError("cannot decode " + path.string() + ": " + e.what());
  }
  if (mat.empty()) throw IoError("cannot decode " + path.string());

  const int channels = mat.channels() == 1 ? 1 : 3;
  double scale = 1.0 / 255.0;
  if (mat.depth() == CV_16U) {
    scale = 1.0 / 65535.0;
  } else if (mat.depth() != CV_8U) {
    throw IoError("unsupported bit depth in " + path.string());
  }

  Image img({mat.rows, mat.cols, channels});
  for (int y = 0; y < mat.rows; ++y) {
    for (int x = 0; x < mat.cols; ++x) {
      for (int c = 0; c < channels; ++c) {
        // OpenCV stores colour as BGR(A).
        const int src_c = channels == 3 ? 2 - c : 0;
        double v;
        if (mat.depth() == CV_8U) {
          v = mat.ptr<unsigned char>(y)[x * mat.channels() + src_c];
        } else {
          v = mat.ptr<unsigned short>(y)[x * mat.channels() + src_c];
        }
        img.at(y, x, c) = static_cast<float>(v * scale);
      }
    }
  }
  return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  cv::Mat mat(img.height(), img.width(), img.channels() == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<unsigned char>(y);
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        const int dst_c = img.channels() == 3 ? 2 - c : 0;
        row[x * img.channels() + dst_c] = quantize_u8(img.at(y, x, c));
      }
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

}  // namespace layermix
