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

#ifndef SELTEXT_MANIFEST_HPP_
#define SELTEXT_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seltext/annotations.hpp"

namespace seltext {

// Where an augmented entry came from. Absent for hand-written manifests.
struct Provenance {
  std::string source;             // source image path, relative to its root
  std::vector<int> style_indices;  // empty for the unmodified original
  std::string mode;               // "original", "two-stage" or "end-to-end"
  std::uint64_t seed = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ManifestEntry {
  std::filesystem::path image;
  std::optional<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> probmap;
  AnnotationFormat annotation_format = AnnotationFormat::kQuad8;
  std::optional<Provenance> provenance;
};

// A list of images with their annotation and heatmap files. Entry paths are
// stored relative to `root` and resolved through Resolve().
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  // Free-form top-level record of how the dataset was produced.
  std::optional<std::string> augmentation_json;

  std::filesystem::path Resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : root / p;
  }
};

// Reads a JSON manifest. `root` defaults to the manifest's directory and a
// relative "root" key is resolved against it. Throws IoError for a missing
// referenced file and ConfigError for duplicate image paths or bad schema.
DatasetManifest LoadManifest(const std::filesystem::path& path);

// Writes JSON with entry paths relative to the manifest's directory when
// `root` equals it.
void SaveManifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Same checks as LoadManifest on an in-memory manifest.
void ValidateManifest(const DatasetManifest& manifest);

std::vector<QuadAnnotation> LoadAnnotations(const DatasetManifest& manifest,
                                            const ManifestEntry& entry);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace seltext

#endif  // SELTEXT_MANIFEST_HPP_
