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

#include "seltext/selective.hpp"

#include <algorithm>
#include <cmath>

#include "seltext/error.hpp"

namespace seltext {

Image Blend(const Image& content, const Image& stylized, const TextProbMap& prob) {
  if (content.height() != stylized.height() || content.width() != stylized.width() ||
      !prob.SameSize(content)) {
    throw ContractError("blend inputs differ in size");
  }
  Image out(content.height(), content.width());
  for (int y = 0; y < content.height(); ++y) {
    for (int x = 0; x < content.width(); ++x) {
      const double pt = prob.at(y, x);
      for (int c = 0; c < Image::kChannels; ++c) {
        const double v = pt * stylized.at(y, x, c) + (1.0 - pt) * content.at(y, x, c);
        out.at(y, x, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

TextProbMap ProvideProbMap(const ProbMapProvider& provider, const Image& image,
                           const ProbMapQuery& query) {
  return std::visit(
      [&](const auto& p) -> TextProbMap {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ConstantProvider>) {
          if (!(p.value >= 0.0 && p.value <= 1.0)) {
            throw ConfigError("constant probability must lie in [0, 1]");
          }
          return TextProbMap(image.height(), image.width(), p.value);
        } else if constexpr (std::is_same_v<P, FeatherProvider>) {
          if (!query.annotations) {
            throw ConfigError("feathered-mask provider needs annotations");
          }
          return FeatherMask(RasterizeMask(*query.annotations, image.height(), image.width()),
                             p.radius);
        } else {
          const auto path = p.path ? p.path : query.heatmap;
          if (!path) throw ConfigError("heatmap provider has no heatmap file");
          TextProbMap map = LoadProbMap(*path);
          if (!map.SameSize(image)) {
            throw ContractError("heatmap " + path->string() + " does not match image size");
          }
          return map;
        }
      },
      provider);
}

Image StylizeSelective(const StyleNetwork& net, const ProbMapProvider& provider,
                       const Image& content, const StyleWeights& weights,
                       const ProbMapQuery& query) {
  const Image stylized = ForwardPadded(net, content, weights);
  return Blend(content, stylized, ProvideProbMap(provider, content, query));
}

}  // namespace seltext
