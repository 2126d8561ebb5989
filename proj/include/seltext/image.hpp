// Copyright 2026 The seltext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SELTEXT_IMAGE_HPP_
#define SELTEXT_IMAGE_HPP_

#include <filesystem>
#include <vector>

#include "seltext/tensor.hpp"

namespace seltext {

// H x W x 3 raster, channel-last, values in [0, 1].
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int height, int width, double fill = 0.0);
  Image(int height, int width, std::vector<double> values);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  double& at(int y, int x, int c) {
    return values_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  double at(int y, int x, int c) const {
    return values_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // True when every value is finite and inside [0, 1].
  bool InRange() const;

  // 3 x H x W tensor view used by the networks.
  Tensor ToChw() const;
  // Inverse of ToChw; the tensor must be 3 x H x W. Values are copied as-is.
  static Image FromChw(const Tensor& t);

  friend bool operator==(const Image& a, const Image& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ &&
           a.values_ == b.values_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

// Single-channel H x W plane. The tag separates binary text masks from
// probability maps at the type level.
template <typename Tag>
class Plane {
 public:
  Plane() = default;
  Plane(int height, int width, double fill = 0.0)
      : height_(height), width_(width),
        values_(static_cast<std::size_t>(height) * width, fill) {}
  Plane(int height, int width, std::vector<double> values)
      : height_(height), width_(width), values_(std::move(values)) {}

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  double& at(int y, int x) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  template <typename Other>
  bool SameSize(const Other& o) const {
    return height_ == o.height() && width_ == o.width();
  }

  friend bool operator==(const Plane& a, const Plane& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ &&
           a.values_ == b.values_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

struct TextMaskTag {};
struct TextProbMapTag {};

// Values in {0, 1}; 1 marks text.
using TextMask = Plane<TextMaskTag>;
// Per-pixel text probability in [0, 1].
using TextProbMap = Plane<TextProbMapTag>;

bool IsBinary(const TextMask& mask);

struct ImageFile {
  Image image;
  int bit_depth = 8;
};

// Reads an 8- or 16-bit PNG, BMP or binary PPM/PGM. Values are divided by the
// maximum code value; grayscale is replicated to three channels and an alpha
// channel is dropped.
ImageFile ReadImageFile(const std::filesystem::path& path);
Image LoadImage(const std::filesystem::path& path);

// Writes with the format implied by the extension. Values are clamped to
// [0, 1] and rounded to the nearest code. bit_depth 16 requires PNG or PPM.
void SaveImage(const std::filesystem::path& path, const Image& image,
               int bit_depth = 8);

// Single-channel 8-bit PNG, value / 255.
TextProbMap LoadProbMap(const std::filesystem::path& path);
void SaveProbMap(const std::filesystem::path& path, const TextProbMap& map);

}  // namespace seltext

#endif  // SELTEXT_IMAGE_HPP_
