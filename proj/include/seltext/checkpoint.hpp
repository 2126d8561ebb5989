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

#ifndef SELTEXT_CHECKPOINT_HPP_
#define SELTEXT_CHECKPOINT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "seltext/perceptual.hpp"
#include "seltext/style_net.hpp"

namespace seltext {

inline constexpr int kCheckpointVersion = 1;

// A checkpoint is a JSON manifest at `path` plus a blob at `path` + ".bin".
// The manifest holds the format version, the network config, an optional
// extractor config, free-form training metadata, the parameter table
// (name, shape, byte offset, element count) and the blob's size and CRC-32.
// The blob is the concatenation of all parameters as little-endian IEEE-754
// binary32.
struct CheckpointExtras {
  std::optional<ExtractorConfig> extractor;
  // Serialized JSON object; stored under "training".
  std::optional<std::string> training_json;
};

struct LoadedCheckpoint {
  StyleNetwork network;
  CheckpointExtras extras;
};

std::filesystem::path BlobPath(const std::filesystem::path& manifest_path);

void SaveCheckpoint(const std::filesystem::path& path, const StyleNetwork& net,
                    const CheckpointExtras& extras = {});

// Throws IncompatibleError for an unknown format version (before touching the
// blob) and IntegrityError for a truncated or corrupted blob or a parameter
// table that does not match the stored config.
LoadedCheckpoint LoadCheckpointWithExtras(const std::filesystem::path& path);
StyleNetwork LoadCheckpoint(const std::filesystem::path& path);

// Same checks as LoadCheckpointWithExtras, over in-memory manifest text and
// blob bytes.
LoadedCheckpoint ParseCheckpoint(std::string_view manifest, const std::string& blob);

// Externally trained feature extractor weights in the same manifest + blob
// layout (parameters "layerN.weight" / "layerN.bias").
void SaveExtractor(const std::filesystem::path& path, const FeatureExtractor& extractor);
FeatureExtractor LoadExtractor(const std::filesystem::path& path);

}  // namespace seltext

#endif  // SELTEXT_CHECKPOINT_HPP_
