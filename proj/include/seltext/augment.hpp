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

#ifndef SELTEXT_AUGMENT_HPP_
#define SELTEXT_AUGMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seltext/manifest.hpp"
#include "seltext/selective.hpp"
#include "seltext/style_net.hpp"

namespace seltext {

enum class AugmentMode {
  // Stylize the whole image, then blend through a text probability map.
  kTwoStage,
  // The network itself is selective (a distilled student); no blending.
  kEndToEnd,
};

std::string ModeName(AugmentMode mode);

struct AugmentSpec {
  DatasetManifest input;
  std::filesystem::path output_dir;
  int styles_per_image = 1;
  AugmentMode mode = AugmentMode::kTwoStage;
  // When set, every image gets exactly these styles and styles_per_image is
  // ignored. Otherwise styles are drawn per image without replacement.
  std::optional<std::vector<int>> styles;
  ProbMapProvider provider = FeatherProvider{0.0};
  std::uint64_t seed = 0;
  // Omit the unmodified originals from the output.
  bool variants_only = false;
  int workers = 1;
  // Recorded in the output manifest.
  std::string source_label;
};

// Styles drawn for image `index`; depends only on (seed, index).
std::vector<int> PickStyles(std::uint64_t seed, std::size_t index, int num_styles, int count);

// Writes, per input entry in order, the original image and annotation files
// (byte copies) followed by one stylized image per selected style whose
// annotation file is a byte copy of the source's. Output names are
// "<index>_<stem>[_s<style>].<ext>". Writes "manifest.json" into the output
// directory and returns it. Throws ConfigError on a style-count mismatch.
DatasetManifest RunAugment(const AugmentSpec& spec, const StyleNetwork& net);

}  // namespace seltext

#endif  // SELTEXT_AUGMENT_HPP_
