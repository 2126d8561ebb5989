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

#ifndef SELTEXT_TESTS_TEST_UTIL_HPP_
#define SELTEXT_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "seltext/annotations.hpp"
#include "seltext/image.hpp"
#include "seltext/manifest.hpp"

namespace seltext::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("seltext_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Image RandomImage(int h, int w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(h, w);
  for (double& v : img.values()) v = u(rng);
  return img;
}

// Image whose values are exact multiples of 1/255, so an 8-bit round trip is
// lossless.
inline Image RandomImage8(int h, int w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, 255);
  Image img(h, w);
  for (double& v : img.values()) v = u(rng) / 255.0;
  return img;
}

inline TextMask Checkerboard(int h, int w, int block = 1) {
  TextMask m(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.at(y, x) = ((y / block + x / block) % 2) ? 1.0 : 0.0;
  }
  return m;
}

// Synthetic scene-text dataset: `count` size x size PNGs with one or two
// axis-aligned "text" quads (one of them sometimes marked ###) and ICDAR
// 2015-style annotation files. Writes manifest.json into `dir`.
inline DatasetManifest WriteSyntheticIcdarDataset(const std::filesystem::path& dir, int count,
                                                  int size, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(0, size - 1);
  DatasetManifest m;
  m.root = dir;
  for (int i = 0; i < count; ++i) {
    Image img = RandomImage8(size, size, rng);
    std::vector<QuadAnnotation> annots;
    for (int q = 0; q < 2; ++q) {
      int x0 = coord(rng), x1 = coord(rng), y0 = coord(rng), y1 = coord(rng);
      if (x0 > x1) std::swap(x0, x1);
      if (y0 > y1) std::swap(y0, y1);
      if (x0 == x1) x1 = std::min(size - 1, x1 + 1), x0 = x1 - 1;
      if (y0 == y1) y1 = std::min(size - 1, y1 + 1), y0 = y1 - 1;
      QuadAnnotation a;
      a.points = {Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}};
      a.transcription = (q == 1 && i % 3 == 0) ? "###" : "word,with,commas" + std::to_string(i);
      a.care = a.transcription != "###";
      annots.push_back(a);
      // Paint the text region a flat colour so it stands out.
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) img.at(y, x, q) = 1.0;
      }
    }
    const std::string stem = "img_" + std::to_string(i);
    SaveImage(dir / (stem + ".png"), img);
    WriteFileBytes(dir / ("gt_" + stem + ".txt"), SerializeIcdarAnnotations(annots));
    ManifestEntry e;
    e.image = stem + ".png";
    e.annotations = "gt_" + stem + ".txt";
    m.entries.push_back(e);
  }
  SaveManifest(dir / "manifest.json", m);
  return m;
}

}  // namespace seltext::testing

#endif  // SELTEXT_TESTS_TEST_UTIL_HPP_
