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

#include <gtest/gtest.h>

#include <array>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seltext/annotations.hpp"
#include "seltext/error.hpp"
#include "seltext/image.hpp"
#include "seltext/manifest.hpp"
#include "test_util.hpp"

namespace seltext {
namespace {

using testing::TempDir;

std::array<std::array<double, 2>, 4> AsDouble(const std::array<Point, 4>& pts) {
  std::array<std::array<double, 2>, 4> q;
  for (int i = 0; i < 4; ++i) q[i] = {double(pts[i].x), double(pts[i].y)};
  return q;
}

// Random star-shaped quad: four distinct points sorted by angle around their
// centroid, rejected when three consecutive vertices are collinear.
std::array<Point, 4> RandomSimpleQuad(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  while (true) {
    std::array<Point, 4> p;
    for (auto& q : p) q = {u(rng), u(rng)};
    double cx = 0, cy = 0;
    for (auto& q : p) cx += q.x / 4.0, cy += q.y / 4.0;
    std::sort(p.begin(), p.end(), [&](const Point& a, const Point& b) {
      return std::atan2(a.y - cy, a.x - cx) < std::atan2(b.y - cy, b.x - cx);
    });
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      const Point& a = p[i];
      const Point& b = p[(i + 1) % 4];
      const Point& c = p[(i + 2) % 4];
      if ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) == 0) ok = false;
    }
    if (ok) return p;
  }
}

TEST(Image, BlackAndWhiteFiles) {
  TempDir dir("img");
  SaveImage(dir / "black.png", Image(2, 2, 0.0));
  SaveImage(dir / "white.png", Image(3, 5, 1.0));
  Image black = LoadImage(dir / "black.png");
  EXPECT_EQ(black.height(), 2);
  EXPECT_EQ(black.width(), 2);
  EXPECT_EQ(black, Image(2, 2, 0.0));
  EXPECT_EQ(LoadImage(dir / "white.png"), Image(3, 5, 1.0));
}

TEST(Image, EightBitScaling) {
  TempDir dir("img");
  Image img(1, 1);
  for (int c = 0; c < 3; ++c) img.at(0, 0, c) = 128.0 / 255.0;
  SaveImage(dir / "p.png", img);
  Image back = LoadImage(dir / "p.png");
  EXPECT_DOUBLE_EQ(back.at(0, 0, 0), 128.0 / 255.0);
  EXPECT_NEAR(back.at(0, 0, 0), 0.50196, 1e-5);
}

TEST(Image, SaveLoadWithinQuantization) {
  TempDir dir("img");
  std::mt19937_64 rng(3);
  for (const char* ext : {".png", ".bmp", ".ppm"}) {
    Image img = testing::RandomImage(7, 9, rng);
    const auto path = dir / (std::string("x") + ext);
    SaveImage(path, img);
    Image back = LoadImage(path);
    ASSERT_EQ(back.height(), 7);
    ASSERT_EQ(back.width(), 9);
    for (std::size_t i = 0; i < img.size(); ++i) {
      EXPECT_LE(std::abs(img.values()[i] - back.values()[i]), 1.0 / 255.0) << ext;
    }
  }
}

TEST(Image, SixteenBitRoundTrip) {
  TempDir dir("img");
  std::mt19937_64 rng(4);
  Image img = testing::RandomImage(4, 4, rng);
  SaveImage(dir / "x.png", img, 16);
  ImageFile f = ReadImageFile(dir / "x.png");
  EXPECT_EQ(f.bit_depth, 16);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_LE(std::abs(img.values()[i] - f.image.values()[i]), 1.0 / 65535.0);
  }
}

TEST(Image, Errors) {
  TempDir dir("img");
  EXPECT_THROW(LoadImage(dir / "missing.png"), IoError);
  WriteFileBytes(dir / "junk.png", "not an image");
  EXPECT_THROW(LoadImage(dir / "junk.png"), IoError);
}

TEST(Image, InRangeAndChwLayout) {
  Image img(2, 3);
  img.at(1, 2, 0) = 0.25;
  img.at(0, 1, 2) = 0.75;
  EXPECT_TRUE(img.InRange());
  Tensor t = img.ToChw();
  EXPECT_EQ(t.shape(), (std::vector<int>{3, 2, 3}));
  EXPECT_EQ(t.at(0, 1, 2), 0.25);
  EXPECT_EQ(t.at(2, 0, 1), 0.75);
  EXPECT_EQ(Image::FromChw(t), img);
  img.at(0, 0, 0) = 1.5;
  EXPECT_FALSE(img.InRange());
}

TEST(ProbMap, FileValues) {
  TempDir dir("pm");
  SaveProbMap(dir / "zero.png", TextProbMap(3, 3, 0.0));
  SaveProbMap(dir / "one.png", TextProbMap(3, 3, 1.0));
  SaveProbMap(dir / "fifth.png", TextProbMap(1, 1, 51.0 / 255.0));
  EXPECT_EQ(LoadProbMap(dir / "zero.png"), TextProbMap(3, 3, 0.0));
  EXPECT_EQ(LoadProbMap(dir / "one.png"), TextProbMap(3, 3, 1.0));
  EXPECT_DOUBLE_EQ(LoadProbMap(dir / "fifth.png").at(0, 0), 0.2);
}

TEST(ProbMap, RejectsColourFiles) {
  TempDir dir("pm");
  SaveImage(dir / "rgb.png", Image(2, 2, 0.5));
  EXPECT_THROW(LoadProbMap(dir / "rgb.png"), FormatError);
}

TEST(Annotations, ParseBasic) {
  auto a = ParseIcdarAnnotations("0,0,1,0,1,1,0,1,hi\n");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].points[0], (Point{0, 0}));
  EXPECT_EQ(a[0].points[1], (Point{1, 0}));
  EXPECT_EQ(a[0].points[2], (Point{1, 1}));
  EXPECT_EQ(a[0].points[3], (Point{0, 1}));
  EXPECT_EQ(a[0].transcription, "hi");
  EXPECT_TRUE(a[0].care);
}

TEST(Annotations, DontCare) {
  auto a = ParseIcdarAnnotations("0,0,1,0,1,1,0,1,###");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_FALSE(a[0].care);
}

TEST(Annotations, CommasInTranscription) {
  auto a = ParseIcdarAnnotations("0,0,1,0,1,1,0,1,a,b");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].transcription, "a,b");
}

TEST(Annotations, BomCrlfAndBlankLines) {
  auto a = ParseIcdarAnnotations("\xEF\xBB\xBF" "1,2,3,2,3,4,1,4,x\r\n\r\n5,5,6,5,6,6,5,6,y\r\n");
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].points[0], (Point{1, 2}));
  EXPECT_EQ(a[0].transcription, "x");
  EXPECT_EQ(a[1].transcription, "y");
}

TEST(Annotations, ErrorsCarryLineNumber) {
  try {
    ParseIcdarAnnotations("0,0,1,0,1,1,0,1,ok\n0,0,1,zz,1,1,0,1,bad\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    ParseIcdarAnnotations("\n\n0,0,1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Annotations, RectFormatExpandsToCorners) {
  auto a = ParseIcdarAnnotations("1, 2, 5, 7, \"Tex,t\"\n", AnnotationFormat::kRect4);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].points[0], (Point{1, 2}));
  EXPECT_EQ(a[0].points[1], (Point{5, 2}));
  EXPECT_EQ(a[0].points[2], (Point{5, 7}));
  EXPECT_EQ(a[0].points[3], (Point{1, 7}));
  EXPECT_EQ(a[0].transcription, "Tex,t");
}

TEST(Annotations, ParseSerializeRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coord(-50, 500);
  std::uniform_int_distribution<int> len(0, 6);
  const std::string alphabet = "abcXYZ,.# 09";
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<QuadAnnotation> annots(static_cast<std::size_t>(len(rng)));
    for (auto& a : annots) {
      for (auto& p : a.points) p = {coord(rng), coord(rng)};
      int n = 1 + len(rng);
      a.transcription.clear();
      for (int i = 0; i < n; ++i) a.transcription += alphabet[rng() % alphabet.size()];
      // Whitespace at the ends is not preserved by design of the format.
      if (a.transcription.front() == ' ') a.transcription.front() = 'q';
      if (a.transcription.back() == ' ') a.transcription.back() = 'q';
      if (trial % 5 == 0) a.transcription = "###";
      a.care = a.transcription != "###";
    }
    const std::string text = SerializeIcdarAnnotations(annots);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(ParseIcdarAnnotations(text), annots);
  }
}

TEST(Rasterize, FullCoverAndEmpty) {
  QuadAnnotation full;
  full.points = {Point{0, 0}, Point{3, 0}, Point{3, 3}, Point{0, 3}};
  EXPECT_EQ(RasterizeMask({full}, 4, 4), TextMask(4, 4, 1.0));
  EXPECT_EQ(RasterizeMask({}, 4, 4), TextMask(4, 4, 0.0));
}

TEST(Rasterize, SmallSquare) {
  QuadAnnotation q;
  q.points = {Point{1, 1}, Point{2, 1}, Point{2, 2}, Point{1, 2}};
  TextMask m = RasterizeMask({q}, 4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      const bool expected = (y == 1 || y == 2) && (x == 1 || x == 2);
      EXPECT_EQ(m.at(y, x), expected ? 1.0 : 0.0) << y << "," << x;
      EXPECT_EQ(m.at(y, x) == 1.0, oracle::PointInQuad(AsDouble(q.points), x, y));
    }
  }
}

TEST(Rasterize, DontCareExcluded) {
  QuadAnnotation q;
  q.points = {Point{0, 0}, Point{3, 0}, Point{3, 3}, Point{0, 3}};
  q.transcription = "###";
  q.care = false;
  EXPECT_EQ(RasterizeMask({q}, 4, 4), TextMask(4, 4, 0.0));
}

TEST(Rasterize, MatchesBruteForceOnRandomQuads) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 32);
  for (int trial = 0; trial < 300; ++trial) {
    const int h = dim(rng), w = dim(rng);
    const int nq = 1 + static_cast<int>(rng() % 3);
    std::vector<QuadAnnotation> annots(static_cast<std::size_t>(nq));
    for (auto& a : annots) a.points = RandomSimpleQuad(rng, -4, 35);
    for (const auto& a : annots) ASSERT_TRUE(IsSimpleQuad(a.points));
    TextMask m = RasterizeMask(annots, h, w);
    ASSERT_EQ(m.height(), h);
    ASSERT_EQ(m.width(), w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        bool inside = false;
        for (const auto& a : annots) inside = inside || oracle::PointInQuad(AsDouble(a.points), x, y);
        ASSERT_EQ(m.at(y, x), inside ? 1.0 : 0.0) << "trial " << trial << " at " << y << "," << x;
      }
    }
  }
}

TEST(Rasterize, SelfIntersectingQuadIsDetected) {
  std::array<Point, 4> bowtie = {Point{0, 0}, Point{4, 4}, Point{4, 0}, Point{0, 4}};
  EXPECT_FALSE(IsSimpleQuad(bowtie));
  std::array<Point, 4> square = {Point{0, 0}, Point{4, 0}, Point{4, 4}, Point{0, 4}};
  EXPECT_TRUE(IsSimpleQuad(square));
}

TEST(Feather, RadiusZeroCopiesMask) {
  TextMask m = testing::Checkerboard(5, 6, 2);
  TextProbMap p = FeatherMask(m, 0.0);
  EXPECT_EQ(p.values(), m.values());
}

TEST(Feather, AllOnesStaysOne) {
  for (double r : {0.0, 0.5, 2.0, 10.0}) {
    EXPECT_EQ(FeatherMask(TextMask(4, 5, 1.0), r), TextProbMap(4, 5, 1.0));
  }
}

TEST(Feather, SingleCentrePixel) {
  TextMask m(5, 5);
  m.at(2, 2) = 1.0;
  TextProbMap p = FeatherMask(m, 2.0);
  auto d = oracle::NearestSetDistance(m.values(), 5, 5);
  for (int i = 0; i < 25; ++i) {
    EXPECT_NEAR(p.values()[i], std::clamp(1.0 - d[i] / 2.0, 0.0, 1.0), 1e-6) << i;
  }
  // Frozen values from the exhaustive scan.
  EXPECT_NEAR(p.at(2, 2), 1.0, 1e-12);
  EXPECT_NEAR(p.at(2, 3), 0.5, 1e-6);
  EXPECT_NEAR(p.at(1, 1), 0.2928932, 1e-6);
  EXPECT_NEAR(p.at(0, 2), 0.0, 1e-6);
  EXPECT_NEAR(p.at(0, 0), 0.0, 1e-12);
}

TEST(Feather, MatchesExhaustiveDistance) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int h = 1 + static_cast<int>(rng() % 12), w = 1 + static_cast<int>(rng() % 12);
    TextMask m(h, w);
    for (double& v : m.values()) v = (rng() % 7 == 0) ? 1.0 : 0.0;
    const double r = 0.5 + (rng() % 8) * 0.5;
    TextProbMap p = FeatherMask(m, r);
    auto d = oracle::NearestSetDistance(m.values(), h, w);
    for (int i = 0; i < h * w; ++i) {
      const double expect = std::isinf(d[i]) ? 0.0 : std::clamp(1.0 - d[i] / r, 0.0, 1.0);
      ASSERT_NEAR(p.values()[i], expect, 1e-5) << "trial " << trial;
    }
  }
}

TEST(Feather, MonotoneInRadius) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    TextMask m(10, 10);
    for (double& v : m.values()) v = (rng() % 9 == 0) ? 1.0 : 0.0;
    TextProbMap prev = FeatherMask(m, 0.0);
    for (double r : {0.5, 1.0, 1.5, 3.0, 6.0}) {
      TextProbMap cur = FeatherMask(m, r);
      for (std::size_t i = 0; i < cur.size(); ++i) ASSERT_GE(cur.values()[i], prev.values()[i]);
      prev = cur;
    }
  }
}

TEST(Feather, NegativeRadiusRejected) {
  EXPECT_THROW(FeatherMask(TextMask(2, 2), -1.0), ContractError);
}

TEST(Manifest, SaveLoadRoundTrip) {
  TempDir dir("mf");
  DatasetManifest m = testing::WriteSyntheticIcdarDataset(dir.path(), 3, 8, 1);
  m.entries[1].probmap = "pm.png";
  SaveProbMap(dir / "pm.png", TextProbMap(8, 8, 0.5));
  m.entries[2].provenance = Provenance{"img_2.png", {1, 0}, "two-stage", 42};
  SaveManifest(dir / "manifest.json", m);
  DatasetManifest back = LoadManifest(dir / "manifest.json");
  ASSERT_EQ(back.entries.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.entries[i].image, m.entries[i].image);
    EXPECT_EQ(back.entries[i].annotations, m.entries[i].annotations);
    EXPECT_EQ(back.entries[i].probmap, m.entries[i].probmap);
    EXPECT_EQ(back.entries[i].provenance, m.entries[i].provenance);
  }
  EXPECT_EQ(LoadAnnotations(back, back.entries[0]), LoadAnnotations(m, m.entries[0]));
}

TEST(Manifest, MissingFileAndDuplicates) {
  TempDir dir("mf");
  DatasetManifest m = testing::WriteSyntheticIcdarDataset(dir.path(), 2, 8, 1);
  std::filesystem::remove(dir / "img_1.png");
  EXPECT_THROW(LoadManifest(dir / "manifest.json"), IoError);
  testing::WriteSyntheticIcdarDataset(dir.path(), 2, 8, 1);
  m.entries[1] = m.entries[0];
  SaveManifest(dir / "dup.json", m);
  EXPECT_THROW(LoadManifest(dir / "dup.json"), ConfigError);
  WriteFileBytes(dir / "bad.json", "{ not json");
  EXPECT_THROW(LoadManifest(dir / "bad.json"), ConfigError);
}

}  // namespace
}  // namespace seltext
