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

#ifndef SELTEXT_ANNOTATIONS_HPP_
#define SELTEXT_ANNOTATIONS_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seltext/image.hpp"

namespace seltext {

// Pixel coordinates. Pixel (row r, column c) has its center at (x=c, y=r).
struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct QuadAnnotation {
  std::array<Point, 4> points;
  std::string transcription;
  // False for "###" (don't care) regions.
  bool care = true;

  friend bool operator==(const QuadAnnotation&, const QuadAnnotation&) = default;
};

inline constexpr std::string_view kDontCare = "###";

enum class AnnotationFormat {
  // x1,y1,x2,y2,x3,y3,x4,y4,transcription
  kQuad8,
  // x1,y1,x2,y2,transcription (axis-aligned box, comma or space separated,
  // transcription optionally double-quoted); expanded to the corner quad.
  kRect4,
};

// Parses an annotation file body. Accepts a UTF-8 BOM and CRLF line endings;
// blank lines are skipped. The transcription is everything after the
// coordinate fields, commas included. Throws ParseError with the 1-based line
// number on malformed input.
std::vector<QuadAnnotation> ParseIcdarAnnotations(
    std::string_view text, AnnotationFormat format = AnnotationFormat::kQuad8);

// Always writes the 8-coordinate form with "\n" line endings and no BOM.
std::string SerializeIcdarAnnotations(const std::vector<QuadAnnotation>& annots);

// Four distinct points and no crossing between non-adjacent edges.
bool IsSimpleQuad(const std::array<Point, 4>& pts);

// Inclusive point-in-polygon test (boundary counts as inside), exact in
// integer arithmetic.
bool QuadContains(const std::array<Point, 4>& pts, std::int64_t x, std::int64_t y);

// 1 where a pixel center lies inside or on a care quad.
TextMask RasterizeMask(const std::vector<QuadAnnotation>& annots, int height,
                       int width);

// clamp(1 - d / radius, 0, 1) with d the Euclidean distance to the nearest
// set pixel. radius == 0 copies the mask.
TextProbMap FeatherMask(const TextMask& mask, double radius);

}  // namespace seltext

#endif  // SELTEXT_ANNOTATIONS_HPP_
