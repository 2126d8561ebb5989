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

#ifndef SELTEXT_SELECTIVE_HPP_
#define SELTEXT_SELECTIVE_HPP_

#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include "seltext/annotations.hpp"
#include "seltext/image.hpp"
#include "seltext/style_net.hpp"

namespace seltext {

// P * stylized + (1 - P) * content per pixel, P broadcast over channels.
// Exactly `content` where P == 0 and exactly `stylized` where P == 1.
Image Blend(const Image& content, const Image& stylized, const TextProbMap& prob);

// Same probability everywhere.
struct ConstantProvider {
  double value = 0.0;
};

// Feathered rasterization of the query's annotations.
struct FeatherProvider {
  double radius = 0.0;
};

// Heatmap file; the query's heatmap path is used when `path` is unset.
struct FileProvider {
  std::optional<std::filesystem::path> path;
};

using ProbMapProvider = std::variant<ConstantProvider, FeatherProvider, FileProvider>;

// Per-image context some providers need.
struct ProbMapQuery {
  const std::vector<QuadAnnotation>* annotations = nullptr;
  std::optional<std::filesystem::path> heatmap;
};

// Throws ConfigError when the provider lacks its inputs and ContractError when
// a heatmap does not match the image size.
TextProbMap ProvideProbMap(const ProbMapProvider& provider, const Image& image,
                           const ProbMapQuery& query = {});

// blend(c, forward(net, c, w), provider(c)); any image size, via ForwardPadded.
Image StylizeSelective(const StyleNetwork& net, const ProbMapProvider& provider,
                       const Image& content, const StyleWeights& weights,
                       const ProbMapQuery& query = {});

}  // namespace seltext

#endif  // SELTEXT_SELECTIVE_HPP_
