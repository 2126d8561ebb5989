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

#include "seltext/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "seltext/error.hpp"

namespace seltext {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool ParseInt(std::string_view field, std::int64_t& out) {
  field = Trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

// Splits off `count` leading fields separated by any character in `seps`.
// Returns false when the line has fewer than count + 1 fields.
bool SplitLeading(std::string_view line, int count, std::string_view seps,
                  std::vector<std::string_view>& fields, std::string_view& rest) {
  fields.clear();
  std::size_t pos = 0;
  for (int i = 0; i < count; ++i) {
    const auto sep = line.find_first_of(seps, pos);
    if (sep == std::string_view::npos) return false;
    fields.push_back(line.substr(pos, sep - pos));
    pos = sep + 1;
    // Runs of spaces count as one separator in the whitespace grammar.
    if (seps.find(',') == std::string_view::npos) {
      while (pos < line.size() && seps.find(line[pos]) != std::string_view::npos) ++pos;
    }
  }
  rest = line.substr(pos);
  return true;
}

std::int64_t Cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool OnSegment(const Point& a, const Point& b, const Point& p) {
  return Cross(a, b, p) == 0 && std::min(a.x, b.x) <= p.x &&
         p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int Sign(std::int64_t v) { return (v > 0) - (v < 0); }

bool SegmentsIntersect(const Point& a, const Point& b, const Point& c,
                       const Point& d) {
  const int d1 = Sign(Cross(c, d, a)), d2 = Sign(Cross(c, d, b));
  const int d3 = Sign(Cross(a, b, c)), d4 = Sign(Cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  return (d1 == 0 && OnSegment(c, d, a)) || (d2 == 0 && OnSegment(c, d, b)) ||
         (d3 == 0 && OnSegment(a, b, c)) || (d4 == 0 && OnSegment(a, b, d));
}

}  // namespace

std::vector<QuadAnnotation> ParseIcdarAnnotations(std::string_view text,
                                                  AnnotationFormat format) {
  constexpr std::string_view kBom = "\xEF\xBB\xBF";
  if (text.substr(0, kBom.size()) == kBom) text.remove_prefix(kBom.size());

  const int coords = format == AnnotationFormat::kQuad8 ? 8 : 4;
  std::vector<QuadAnnotation> out;
  std::vector<std::string_view> fields;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;

    std::string_view rest;
    bool split = SplitLeading(line, coords, ",", fields, rest);
    if (!split && format == AnnotationFormat::kRect4) {
      split = SplitLeading(Trim(line), coords, " \t", fields, rest);
    }
    if (!split) {
      throw ParseError(line_no, "expected " + std::to_string(coords + 1) +
                                    " comma-separated fields");
    }
    std::array<std::int64_t, 8> v{};
    for (int i = 0; i < coords; ++i) {
      if (!ParseInt(fields[i], v[i])) {
        throw ParseError(line_no, "non-integer coordinate '" +
                                      std::string(fields[i]) + "'");
      }
    }
    QuadAnnotation q;
    if (format == AnnotationFormat::kQuad8) {
      for (int i = 0; i < 4; ++i) q.points[i] = {v[2 * i], v[2 * i + 1]};
      q.transcription = std::string(rest);
    } else {
      q.points = {Point{v[0], v[1]}, Point{v[2], v[1]}, Point{v[2], v[3]},
                  Point{v[0], v[3]}};
      std::string_view t = Trim(rest);
      if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
        t = t.substr(1, t.size() - 2);
      }
      q.transcription = std::string(t);
    }
    q.care = q.transcription != kDontCare;
    out.push_back(std::move(q));
  }
  return out;
}

std::string SerializeIcdarAnnotations(const std::vector<QuadAnnotation>& annots) {
  std::string out;
  for (const auto& q : annots) {
    for (const auto& p : q.points) {
      out += std::to_string(p.x) + ',' + std::to_string(p.y) + ',';
    }
    out += q.transcription;
    out += '\n';
  }
  return out;
}

bool IsSimpleQuad(const std::array<Point, 4>& pts) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (pts[i] == pts[j]) return false;
    }
  }
  // Opposite edges must not touch; adjacent edges may only share their vertex,
  // which for distinct points reduces to not being collinear and overlapping.
  if (SegmentsIntersect(pts[0], pts[1], pts[2], pts[3])) return false;
  if (SegmentsIntersect(pts[1], pts[2], pts[3], pts[0])) return false;
  for (int i = 0; i < 4; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % 4];
    const Point& c = pts[(i + 2) % 4];
    if (Cross(a, b, c) == 0 && (OnSegment(a, b, c) || OnSegment(b, c, a))) {
      return false;
    }
  }
  return true;
}

bool QuadContains(const std::array<Point, 4>& pts, std::int64_t x, std::int64_t y) {
  const Point p{x, y};
  for (int i = 0; i < 4; ++i) {
    if (OnSegment(pts[i], pts[(i + 1) % 4], p)) return true;
  }
  // Crossing number with a rightward ray; half-open rule on edge endpoints.
  bool inside = false;
  for (int i = 0; i < 4; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % 4];
    if ((a.y > y) == (b.y > y)) continue;
    // x-coordinate of the crossing compared exactly: sign of cross product
    // relative to the edge direction.
    const std::int64_t c = Cross(a, b, p);
    if (b.y > a.y ? c > 0 : c < 0) inside = !inside;
  }
  return inside;
}

TextMask RasterizeMask(const std::vector<QuadAnnotation>& annots, int height,
                       int width) {
  if (height < 1 || width < 1) {
    throw SizeError("mask dimensions must be positive");
  }
  TextMask mask(height, width, 0.0);
  for (const auto& q : annots) {
    if (!q.care) continue;
    std::int64_t x0 = q.points[0].x, x1 = x0, y0 = q.points[0].y, y1 = y0;
    for (const auto& p : q.points) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    x0 = std::max<std::int64_t>(x0, 0);
    y0 = std::max<std::int64_t>(y0, 0);
    x1 = std::min<std::int64_t>(x1, width - 1);
    y1 = std::min<std::int64_t>(y1, height - 1);
    for (std::int64_t y = y0; y <= y1; ++y) {
      for (std::int64_t x = x0; x <= x1; ++x) {
        if (QuadContains(q.points, x, y)) {
          mask.at(static_cast<int>(y), static_cast<int>(x)) = 1.0;
        }
      }
    }
  }
  return mask;
}

TextProbMap FeatherMask(const TextMask& mask, double radius) {
  if (!(radius >= 0.0)) throw ContractError("feather radius must be >= 0");
  if (radius == 0.0) return TextProbMap(mask.height(), mask.width(), mask.values());

  const bool any = std::any_of(mask.values().begin(), mask.values().end(),
                               [](double v) { return v > 0.0; });
  TextProbMap out(mask.height(), mask.width(), 0.0);
  if (!any) return out;

  // distanceTransform measures the distance to the nearest zero pixel, so the
  // text pixels become the zeros.
  cv::Mat src(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      src.at<unsigned char>(y, x) = mask.at(y, x) > 0.0 ? 0 : 255;
    }
  }
  cv::Mat dist;
  cv::distanceTransform(src, dist, cv::DIST_L2, cv::DIST_MASK_PRECISE, CV_32F);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const double d = dist.at<float>(y, x);
      out.at(y, x) = std::clamp(1.0 - d / radius, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace seltext
