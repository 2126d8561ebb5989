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

#include "seltext/manifest.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "seltext/error.hpp"

namespace seltext {
namespace {

using nlohmann::json;

constexpr int kManifestVersion = 1;

std::string FormatName(AnnotationFormat f) {
  return f == AnnotationFormat::kQuad8 ? "quad8" : "rect4";
}

AnnotationFormat FormatFromName(const std::string& s) {
  if (s == "quad8") return AnnotationFormat::kQuad8;
  if (s == "rect4") return AnnotationFormat::kRect4;
  throw ConfigError("unknown annotation format '" + s + "'");
}

}  // namespace

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void WriteFileBytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

void ValidateManifest(const DatasetManifest& manifest) {
  std::set<std::filesystem::path> seen;
  for (const auto& e : manifest.entries) {
    if (!seen.insert(e.image.lexically_normal()).second) {
      throw ConfigError("duplicate manifest entry " + e.image.string());
    }
    std::vector<std::filesystem::path> files{e.image};
    if (e.annotations) files.push_back(*e.annotations);
    if (e.probmap) files.push_back(*e.probmap);
    for (const auto& f : files) {
      std::error_code ec;
      if (!std::filesystem::exists(manifest.Resolve(f), ec)) {
        throw IoError("manifest references missing file " +
                      manifest.Resolve(f).string());
      }
    }
  }
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(ReadFileBytes(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  DatasetManifest m;
  const auto dir = path.parent_path().empty() ? std::filesystem::path(".")
                                              : path.parent_path();
  try {
    const int version = doc.value("version", kManifestVersion);
    if (version != kManifestVersion) {
      throw IncompatibleError("unsupported manifest version " + std::to_string(version));
    }
    m.root = dir;
    if (doc.contains("root")) {
      std::filesystem::path r = doc.at("root").get<std::string>();
      m.root = r.is_absolute() ? r : dir / r;
    }
    if (doc.contains("augmentation")) m.augmentation_json = doc.at("augmentation").dump();
    for (const auto& je : doc.at("entries")) {
      ManifestEntry e;
      e.image = je.at("image").get<std::string>();
      if (je.contains("annotations")) e.annotations = je.at("annotations").get<std::string>();
      if (je.contains("probmap")) e.probmap = je.at("probmap").get<std::string>();
      if (je.contains("annotation_format")) {
        e.annotation_format = FormatFromName(je.at("annotation_format").get<std::string>());
      }
      if (je.contains("provenance")) {
        const auto& jp = je.at("provenance");
        Provenance p;
        p.source = jp.at("source").get<std::string>();
        p.style_indices = jp.at("style_indices").get<std::vector<int>>();
        p.mode = jp.at("mode").get<std::string>();
        p.seed = jp.at("seed").get<std::uint64_t>();
        e.provenance = std::move(p);
      }
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
  ValidateManifest(m);
  return m;
}

void SaveManifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  json doc;
  doc["version"] = kManifestVersion;
  const auto dir = path.parent_path().empty() ? std::filesystem::path(".")
                                              : path.parent_path();
  std::error_code ec;
  if (!std::filesystem::equivalent(dir, manifest.root, ec)) {
    doc["root"] = std::filesystem::absolute(manifest.root).lexically_normal().generic_string();
  }
  if (manifest.augmentation_json) {
    doc["augmentation"] = json::parse(*manifest.augmentation_json);
  }
  doc["entries"] = json::array();
  for (const auto& e : manifest.entries) {
    json je;
    je["image"] = e.image.generic_string();
    if (e.annotations) je["annotations"] = e.annotations->generic_string();
    if (e.probmap) je["probmap"] = e.probmap->generic_string();
    if (e.annotation_format != AnnotationFormat::kQuad8) {
      je["annotation_format"] = FormatName(e.annotation_format);
    }
    if (e.provenance) {
      je["provenance"] = {{"source", e.provenance->source},
                          {"style_indices", e.provenance->style_indices},
                          {"mode", e.provenance->mode},
                          {"seed", e.provenance->seed}};
    }
    doc["entries"].push_back(std::move(je));
  }
  WriteFileBytes(path, doc.dump(2) + "\n");
}

std::vector<QuadAnnotation> LoadAnnotations(const DatasetManifest& manifest,
                                            const ManifestEntry& entry) {
  if (!entry.annotations) {
    throw ConfigError("entry " + entry.image.string() + " has no annotations");
  }
  return ParseIcdarAnnotations(ReadFileBytes(manifest.Resolve(*entry.annotations)),
                               entry.annotation_format);
}

}  // namespace seltext
