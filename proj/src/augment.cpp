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

#include "seltext/augment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "seltext/error.hpp"

namespace seltext {
namespace {

std::string Prefix(std::size_t index, const std::filesystem::path& image) {
  std::ostringstream os;
  os << std::setw(4) << std::setfill('0') << index << '_' << image.stem().string();
  return os.str();
}

struct ItemResult {
  std::vector<ManifestEntry> entries;
  std::exception_ptr error;
};

ItemResult AugmentOne(const AugmentSpec& spec, const StyleNetwork& net, std::size_t index) {
  const DatasetManifest& in = spec.input;
  const ManifestEntry& entry = in.entries[index];
  if (!entry.annotations) {
    throw ConfigError("entry " + entry.image.string() + " has no annotation file");
  }
  const auto src_image = in.Resolve(entry.image);
  const auto src_annot = in.Resolve(*entry.annotations);
  const std::string annot_bytes = ReadFileBytes(src_annot);
  const std::string prefix = Prefix(index, entry.image);
  const std::string source = entry.image.generic_string();

  ItemResult out;
  auto emit = [&](const std::filesystem::path& image_name, std::vector<int> styles,
                  const std::string& mode) {
    const std::filesystem::path annot_name = image_name.stem().string() + ".txt";
    WriteFileBytes(spec.output_dir / annot_name, annot_bytes);
    ManifestEntry e;
    e.image = image_name;
    e.annotations = annot_name;
    e.annotation_format = entry.annotation_format;
    e.provenance = Provenance{source, std::move(styles), mode, spec.seed};
    out.entries.push_back(std::move(e));
  };

  if (!spec.variants_only) {
    const std::filesystem::path name = prefix + src_image.extension().string();
    std::filesystem::copy_file(src_image, spec.output_dir / name,
                               std::filesystem::copy_options::overwrite_existing);
    emit(name, {}, "original");
  }

  const std::vector<int> styles =
      spec.styles ? *spec.styles
                  : PickStyles(spec.seed, index, net.num_styles(), spec.styles_per_image);
  if (styles.empty()) return out;

  const ImageFile source_file = ReadImageFile(src_image);
  const Image& content = source_file.image;
  std::optional<TextProbMap> prob;
  std::vector<QuadAnnotation> annots;
  if (spec.mode == AugmentMode::kTwoStage) {
    annots = ParseIcdarAnnotations(annot_bytes, entry.annotation_format);
    ProbMapQuery query{&annots, {}};
    if (entry.probmap) query.heatmap = in.Resolve(*entry.probmap);
    prob = ProvideProbMap(spec.provider, content, query);
  }
  for (int style : styles) {
    const StyleWeights w = StyleWeights::OneHot(net.num_styles(), style);
    Image stylized = ForwardPadded(net, content, w);
    if (prob) stylized = Blend(content, stylized, *prob);
    const std::filesystem::path name = prefix + "_s" + std::to_string(style) + ".png";
    SaveImage(spec.output_dir / name, stylized, source_file.bit_depth);
    emit(name, {style}, ModeName(spec.mode));
  }
  return out;
}

}  // namespace

std::string ModeName(AugmentMode mode) {
  return mode == AugmentMode::kTwoStage ? "two-stage" : "end-to-end";
}

std::vector<int> PickStyles(std::uint64_t seed, std::size_t index, int num_styles, int count) {
  if (count < 0 || count > num_styles) {
    throw ConfigError("cannot pick " + std::to_string(count) + " distinct styles out of " +
                      std::to_string(num_styles));
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::vector<int> pool(static_cast<std::size_t>(num_styles));
  std::iota(pool.begin(), pool.end(), 0);
  // Partial Fisher-Yates: the first `count` slots are the draw.
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, num_styles - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

DatasetManifest RunAugment(const AugmentSpec& spec, const StyleNetwork& net) {
  if (spec.styles_per_image < 0) throw ConfigError("styles per image must be >= 0");
  if (spec.styles) {
    for (int s : *spec.styles) {
      if (s < 0 || s >= net.num_styles()) {
        throw ConfigError("style " + std::to_string(s) + " not in a " +
                          std::to_string(net.num_styles()) + "-style checkpoint");
      }
    }
  } else if (spec.styles_per_image > net.num_styles()) {
    throw ConfigError("styles per image (" + std::to_string(spec.styles_per_image) +
                      ") exceeds the checkpoint's " + std::to_string(net.num_styles()) +
                      " styles");
  }
  if (spec.workers < 1) throw ConfigError("worker count must be >= 1");
  ValidateManifest(spec.input);

  std::filesystem::create_directories(spec.output_dir);
  std::error_code ec;
  if (std::filesystem::equivalent(spec.output_dir, spec.input.root, ec)) {
    throw ConfigError("output directory must differ from the input dataset root");
  }

  const std::size_t n = spec.input.entries.size();
  std::vector<ItemResult> results(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = AugmentOne(spec, net, i);
      } catch (...) {
        results[i].error = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(spec.workers, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  DatasetManifest out;
  out.root = spec.output_dir;
  for (auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
    for (auto& e : r.entries) out.entries.push_back(std::move(e));
  }
  nlohmann::json info{{"seed", spec.seed},
                      {"styles_per_image", spec.styles ? static_cast<int>(spec.styles->size())
                                                       : spec.styles_per_image},
                      {"mode", ModeName(spec.mode)},
                      {"variants_only", spec.variants_only},
                      {"source", spec.source_label},
                      {"num_styles", net.num_styles()}};
  if (spec.styles) info["styles"] = *spec.styles;
  out.augmentation_json = info.dump();
  SaveManifest(spec.output_dir / "manifest.json", out);
  return out;
}

}  // namespace seltext
