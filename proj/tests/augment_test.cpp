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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "seltext/augment.hpp"
#include "seltext/error.hpp"
#include "test_util.hpp"

namespace seltext {
namespace {

using testing::TempDir;

std::map<std::string, std::string> DirectoryBytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    out[e.path().filename().string()] = ReadFileBytes(e.path());
  }
  return out;
}

class AugmentTest : public ::testing::Test {
 protected:
  AugmentTest() : input_("aug_in"), output_("aug_out"), net_([] {
    NetworkConfig c;
    c.num_styles = 5;
    c.seed = 2;
    return c;
  }()) {
    // Give each style a distinct look so variants differ from the source.
    int k = 0;
    for (auto& p : net_.Parameters()) {
      if (p.name.find("shift") == std::string::npos) continue;
      for (double& v : p.tensor->values()) v = static_cast<float>(0.1 * ((k++ % 7) - 3));
    }
    manifest_ = testing::WriteSyntheticIcdarDataset(input_.path(), 10, 16, 77);
  }

  AugmentSpec Spec(int per_image) const {
    AugmentSpec s;
    s.input = manifest_;
    s.output_dir = output_.path() / "run";
    s.styles_per_image = per_image;
    s.seed = 123;
    return s;
  }

  TempDir input_;
  TempDir output_;
  StyleNetwork net_;
  DatasetManifest manifest_;
};

TEST_F(AugmentTest, ZeroStylesCopiesDataset) {
  DatasetManifest out = RunAugment(Spec(0), net_);
  ASSERT_EQ(out.entries.size(), manifest_.entries.size());
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    EXPECT_EQ(ReadFileBytes(out.Resolve(out.entries[i].image)),
              ReadFileBytes(manifest_.Resolve(manifest_.entries[i].image)));
    EXPECT_EQ(ReadFileBytes(out.Resolve(*out.entries[i].annotations)),
              ReadFileBytes(manifest_.Resolve(*manifest_.entries[i].annotations)));
    EXPECT_EQ(out.entries[i].provenance->mode, "original");
  }
}

TEST_F(AugmentTest, FourStylesGiveFiftyPairs) {
  const auto before = DirectoryBytes(input_.path());
  DatasetManifest out = RunAugment(Spec(4), net_);
  ASSERT_EQ(out.entries.size(), 50u);
  std::set<std::string> images, annots;
  std::map<std::string, std::set<int>> styles_by_source;
  for (const auto& e : out.entries) {
    images.insert(e.image.string());
    annots.insert(e.annotations->string());
    EXPECT_TRUE(std::filesystem::exists(out.Resolve(e.image)));
    const auto& prov = *e.provenance;
    std::size_t src = 0;
    while (manifest_.entries[src].image.string() != prov.source) ++src;
    EXPECT_EQ(ReadFileBytes(out.Resolve(*e.annotations)),
              ReadFileBytes(manifest_.Resolve(*manifest_.entries[src].annotations)));
    for (int s : prov.style_indices) {
      EXPECT_TRUE(styles_by_source[prov.source].insert(s).second) << "style drawn twice";
    }
  }
  EXPECT_EQ(images.size(), 50u);
  EXPECT_EQ(annots.size(), 50u);
  for (const auto& [src, styles] : styles_by_source) EXPECT_EQ(styles.size(), 4u) << src;
  EXPECT_EQ(DirectoryBytes(input_.path()), before);
  DatasetManifest reloaded = LoadManifest(output_.path() / "run" / "manifest.json");
  EXPECT_EQ(reloaded.entries.size(), 50u);
  ASSERT_TRUE(reloaded.augmentation_json.has_value());
}

TEST_F(AugmentTest, BinaryProviderKeepsBackgroundBits) {
  DatasetManifest out = RunAugment(Spec(2), net_);
  int variants = 0, changed = 0;
  for (const auto& e : out.entries) {
    if (e.provenance->style_indices.empty()) continue;
    ++variants;
    std::size_t src = 0;
    while (manifest_.entries[src].image.string() != e.provenance->source) ++src;
    Image source = LoadImage(manifest_.Resolve(manifest_.entries[src].image));
    Image variant = LoadImage(out.Resolve(e.image));
    TextMask mask = RasterizeMask(LoadAnnotations(manifest_, manifest_.entries[src]),
                                  source.height(), source.width());
    for (int y = 0; y < source.height(); ++y) {
      for (int x = 0; x < source.width(); ++x) {
        for (int c = 0; c < 3; ++c) {
          if (mask.at(y, x) == 0.0) {
            ASSERT_EQ(variant.at(y, x, c), source.at(y, x, c));
          } else {
            changed += variant.at(y, x, c) != source.at(y, x, c);
          }
        }
      }
    }
  }
  EXPECT_EQ(variants, 20);
  EXPECT_GT(changed, 0);
}

TEST_F(AugmentTest, RerunIsByteIdentical) {
  AugmentSpec a = Spec(3);
  RunAugment(a, net_);
  AugmentSpec b = Spec(3);
  b.output_dir = output_.path() / "again";
  b.workers = 3;
  RunAugment(b, net_);
  EXPECT_EQ(DirectoryBytes(a.output_dir), DirectoryBytes(b.output_dir));
}

TEST_F(AugmentTest, VariantsOnlyAndExplicitStyles) {
  AugmentSpec s = Spec(1);
  s.variants_only = true;
  s.styles = std::vector<int>{4, 0};
  DatasetManifest out = RunAugment(s, net_);
  ASSERT_EQ(out.entries.size(), 20u);
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    EXPECT_EQ(out.entries[i].provenance->style_indices, (std::vector<int>{i % 2 ? 0 : 4}));
  }
}

TEST_F(AugmentTest, EndToEndModeRuns) {
  AugmentSpec s = Spec(1);
  s.mode = AugmentMode::kEndToEnd;
  DatasetManifest out = RunAugment(s, net_);
  ASSERT_EQ(out.entries.size(), 20u);
  EXPECT_EQ(out.entries[1].provenance->mode, "end-to-end");
}

TEST_F(AugmentTest, Errors) {
  EXPECT_THROW(RunAugment(Spec(6), net_), ConfigError);
  AugmentSpec s = Spec(1);
  s.styles = std::vector<int>{5};
  EXPECT_THROW(RunAugment(s, net_), ConfigError);
  s = Spec(1);
  s.output_dir = input_.path();
  EXPECT_THROW(RunAugment(s, net_), ConfigError);
}

TEST(PickStyles, DistinctSeededDraws) {
  for (std::size_t i = 0; i < 50; ++i) {
    auto a = PickStyles(9, i, 6, 4);
    EXPECT_EQ(a, PickStyles(9, i, 6, 4));
    EXPECT_EQ(std::set<int>(a.begin(), a.end()).size(), 4u);
    for (int s : a) EXPECT_TRUE(s >= 0 && s < 6);
  }
  EXPECT_THROW(PickStyles(0, 0, 3, 4), ConfigError);
  EXPECT_TRUE(PickStyles(0, 0, 3, 0).empty());
}

}  // namespace
}  // namespace seltext
