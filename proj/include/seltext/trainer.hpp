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

#ifndef SELTEXT_TRAINER_HPP_
#define SELTEXT_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seltext/distill.hpp"
#include "seltext/manifest.hpp"
#include "seltext/optim.hpp"
#include "seltext/perceptual.hpp"
#include "seltext/style_net.hpp"

namespace seltext {

struct TrainConfig {
  long steps = 500;
  int batch_size = 4;
  AdamOptions optimizer{.learning_rate = 1e-2};
  LossWeights weights;
  LossOptions loss_options;
  // Defaults to LayerSelection::Default over the extractor's stages.
  std::optional<LayerSelection> layers;
  NetworkConfig network;
  ExtractorConfig extractor;
  // One style image per network style, in style-index order.
  std::vector<std::filesystem::path> style_sources;
  DatasetManifest content;
  // Content images are resized (shorter side) and center-cropped to this
  // square; style images are resized the same way.
  int image_size = 32;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

struct TrainTraceRow {
  long step = 0;
  int style = 0;
  double content = 0.0;
  double style_loss = 0.0;
  double total = 0.0;
};

struct TrainResult {
  StyleNetwork network;
  std::vector<TrainTraceRow> trace;
  // Number of times style Grams were computed (once per style).
  int style_gram_computations = 0;
};

// Resize so the shorter side equals `size`, then center-crop to size x size.
Image ResizeAndCenterCrop(const Image& image, int size);

// Style index used by batch `step` (round-robin).
inline int StyleForStep(long step, int num_styles) {
  return static_cast<int>(step % num_styles);
}

// Loads the manifest and style files named in the config.
TrainResult TrainBaseline(const TrainConfig& config);

// In-memory variant; images must already satisfy the network's size rule
// (content) and the extractor's (styles). config.style_sources and
// config.content are ignored.
TrainResult TrainBaseline(const TrainConfig& config, std::span<const Image> contents,
                          std::span<const Image> styles);

// "step,style,content,style_loss,total" rows.
void WriteTrainTrace(const std::filesystem::path& path, std::span<const TrainTraceRow> rows);
// "step,phase,loss" rows.
void WriteDistillTrace(const std::filesystem::path& path,
                       std::span<const DistillTraceRow> rows);

}  // namespace seltext

#endif  // SELTEXT_TRAINER_HPP_
