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

#include "seltext/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "seltext/error.hpp"

namespace seltext {
namespace {

void CheckDims(int height, int width) {
  if (height < 1 || width < 1) {
    throw SizeError("image dimensions must be positive, got " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
}

cv::Mat ReadRaw(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("cannot read image file: " + path.string());
  }
  cv::Mat raw;
  try {
    raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw IoError("cannot decode image " + path.string() + ": " + e.what());
  }
  if (raw.empty()) throw IoError("cannot decode image: " + path.string());
  return raw;
}

void WriteRaw(const std::filesystem::path& path, const cv::Mat& mat) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

}  // namespace

Image::Image(int height, int width, double fill)
    : height_(height), width_(width),
      values_(static_cast<std::size_t>(height) * width * kChannels, fill) {
  CheckDims(height, width);
}

Image::Image(int height, int width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  CheckDims(height, width);
  if (values_.size() != static_cast<std::size_t>(height) * width * kChannels) {
    throw SizeError("image value count does not match " +
                    std::to_string(height) + "x" + std::to_string(width) + "x3");
  }
}

bool Image::InRange() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) {
    return std::isfinite(v) && v >= 0.0 && v <= 1.0;
  });
}

Tensor Image::ToChw() const {
  Tensor t = Tensor::Chw(kChannels, height_, width_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      for (int c = 0; c < kChannels; ++c) t.at(c, y, x) = at(y, x, c);
    }
  }
  return t;
}

Image Image::FromChw(const Tensor& t) {
  if (t.rank() != 3 || t.dim(0) != kChannels) {
    throw SizeError("expected a 3 x H x W tensor, got " + t.ShapeString());
  }
  Image img(t.dim(1), t.dim(2));
  for (int y = 0; y < img.height_; ++y) {
    for (int x = 0; x < img.width_; ++x) {
      for (int c = 0; c < kChannels; ++c) img.at(y, x, c) = t.at(c, y, x);
    }
  }
  return img;
}

bool IsBinary(const TextMask& mask) {
  return std::all_of(mask.values().begin(), mask.values().end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

ImageFile ReadImageFile(const std::filesystem::path& path) {
  cv::Mat raw = ReadRaw(path);
  double max_code = 0.0;
  int depth = 0;
  switch (raw.depth()) {
    case CV_8U:
      max_code = 255.0;
      depth = 8;
      break;
    case CV_16U:
      max_code = 65535.0;
      depth = 16;
      break;
    default:
      throw FormatError("unsupported bit depth in " + path.string());
  }
  cv::Mat rgb;
  switch (raw.channels()) {
    case 1:
      cv::cvtColor(raw, rgb, cv::COLOR_GRAY2RGB);
      break;
    case 3:
      cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB);
      break;
    case 4:
      cv::cvtColor(raw, rgb, cv::COLOR_BGRA2RGB);
      break;
    default:
      throw FormatError("unsupported channel count " +
                        std::to_string(raw.channels()) + " in " + path.string());
  }
  ImageFile out{Image(rgb.rows, rgb.cols), depth};
  for (int y = 0; y < rgb.rows; ++y) {
    for (int x = 0; x < rgb.cols; ++x) {
      for (int c = 0; c < Image::kChannels; ++c) {
        const double code = depth == 8 ? rgb.at<cv::Vec3b>(y, x)[c]
                                       : rgb.at<cv::Vec3w>(y, x)[c];
        out.image.at(y, x, c) = code / max_code;
      }
    }
  }
  return out;
}

Image LoadImage(const std::filesystem::path& path) {
  return ReadImageFile(path).image;
}

void SaveImage(const std::filesystem::path& path, const Image& image,
               int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw FormatError("bit depth must be 8 or 16");
  }
  const double max_code = bit_depth == 8 ? 255.0 : 65535.0;
  cv::Mat bgr(image.height(), image.width(), bit_depth == 8 ? CV_8UC3 : CV_16UC3);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < Image::kChannels; ++c) {
        const double v = std::clamp(image.at(y, x, c), 0.0, 1.0);
        const auto code = std::lround(v * max_code);
        // OpenCV stores BGR.
        if (bit_depth == 8) {
          bgr.at<cv::Vec3b>(y, x)[2 - c] = static_cast<unsigned char>(code);
        } else {
          bgr.at<cv::Vec3w>(y, x)[2 - c] = static_cast<unsigned short>(code);
        }
      }
    }
  }
  WriteRaw(path, bgr);
}

TextProbMap LoadProbMap(const std::filesystem::path& path) {
  cv::Mat raw = ReadRaw(path);
  if (raw.channels() != 1) {
    throw FormatError("probability map must be single-channel: " + path.string());
  }
  if (raw.depth() != CV_8U) {
    throw FormatError("probability map must be 8-bit: " + path.string());
  }
  TextProbMap map(raw.rows, raw.cols);
  for (int y = 0; y < raw.rows; ++y) {
    for (int x = 0; x < raw.cols; ++x) {
      map.at(y, x) = raw.at<unsigned char>(y, x) / 255.0;
    }
  }
  return map;
}

void SaveProbMap(const std::filesystem::path& path, const TextProbMap& map) {
  cv::Mat gray(map.height(), map.width(), CV_8UC1);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      gray.at<unsigned char>(y, x) = static_cast<unsigned char>(
          std::lround(std::clamp(map.at(y, x), 0.0, 1.0) * 255.0));
    }
  }
  WriteRaw(path, gray);
}

}  // namespace seltext
