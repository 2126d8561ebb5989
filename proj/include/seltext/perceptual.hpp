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

#ifndef SELTEXT_PERCEPTUAL_HPP_
#define SELTEXT_PERCEPTUAL_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "seltext/autodiff.hpp"
#include "seltext/image.hpp"
#include "seltext/tensor.hpp"

namespace seltext {

enum class Activation {
  kRelu,
  // softplus(x) - log 2; used for finite-difference gradient audits.
  kSmooth,
};

struct ExtractorLayerSpec {
  int channels = 8;
  int kernel = 3;
  int stride = 1;
  // -1 selects kernel / 2 ("same" for stride 1).
  int padding = -1;

  int EffectivePadding() const { return padding < 0 ? kernel / 2 : padding; }
  friend bool operator==(const ExtractorLayerSpec&, const ExtractorLayerSpec&) = default;
};

struct ExtractorConfig {
  std::vector<ExtractorLayerSpec> layers = {{8, 3, 1, -1}, {16, 3, 2, -1}, {32, 3, 2, -1}};
  Activation activation = Activation::kRelu;
  std::uint64_t seed = 0;
  // Standard deviation of the random biases; 0 gives zero biases.
  double bias_stddev = 0.0;

  friend bool operator==(const ExtractorConfig&, const ExtractorConfig&) = default;
};

// Content layer m and style layers n <= m, as stage indices of the extractor.
struct LayerSelection {
  int content_layer = 0;
  std::vector<int> style_layers;

  // Content from the deepest stage, style from every stage.
  static LayerSelection Default(int num_layers);
};

// Layer id -> C x H x W activation map.
using FeatureStack = std::map<int, Tensor>;

// A fixed-weight convolutional feature extractor: each stage is a zero-padded
// convolution followed by the configured activation.
class FeatureExtractor {
 public:
  // Seeded random (He-normal) weights.
  explicit FeatureExtractor(ExtractorConfig config);
  // Externally supplied weights; shapes must match the config.
  FeatureExtractor(ExtractorConfig config, std::vector<Tensor> weights,
                   std::vector<Tensor> biases);

  const ExtractorConfig& config() const { return config_; }
  int num_layers() const { return static_cast<int>(config_.layers.size()); }
  const std::vector<Tensor>& weights() const { return weights_; }
  const std::vector<Tensor>& biases() const { return biases_; }

  // Throws ContractError for an invalid selection and SizeError naming the
  // first stage whose output would be empty.
  void CheckInput(int height, int width, const LayerSelection& layers) const;

  // Runs the stages up to the deepest requested layer and returns the
  // requested activations as graph nodes.
  std::map<int, ad::Var> Run(const ad::Var& image_chw,
                             const LayerSelection& layers) const;

 private:
  ExtractorConfig config_;
  std::vector<Tensor> weights_;
  std::vector<Tensor> biases_;
};

FeatureStack ExtractFeatures(const FeatureExtractor& extractor, const Image& image,
                             const LayerSelection& layers);

// F F^T for F reshaped to C x (H*W); divided by C*H*W when normalize is set.
// Throws NumericError on non-finite input.
Tensor Gram(const Tensor& feature, bool normalize = true);

// Squared difference on the content layer.
double ContentLoss(const FeatureStack& content, const FeatureStack& stylized,
                   int content_layer, Reduction reduction = Reduction::kMean);

// Sum over layers of the reduced squared Gram differences.
double StyleLoss(std::span<const Tensor> grams_style,
                 std::span<const Tensor> grams_stylized,
                 Reduction reduction = Reduction::kMean);

struct LossWeights {
  double content = 1.0;
  double style = 1.0;
};

struct LossOptions {
  Reduction reduction = Reduction::kMean;
  bool normalize_gram = true;
};

struct LossBreakdown {
  double content = 0.0;
  double style = 0.0;
  double total = 0.0;
  LossWeights weights;
};

// Style Grams of one style image, in the order of layers.style_layers.
std::vector<Tensor> StyleGrams(const FeatureExtractor& extractor, const Image& style,
                               const LayerSelection& layers,
                               const LossOptions& options = {});

struct LossTerms {
  ad::Var content;
  ad::Var style;
  ad::Var total;
};

// Differentiable objective. `content_features` holds the content image's
// activations (at least the content layer); gradients flow into `stylized`.
LossTerms TotalLossGraph(const ad::Var& stylized, const FeatureStack& content_features,
                         std::span<const Tensor> style_grams,
                         const FeatureExtractor& extractor, const LayerSelection& layers,
                         const LossWeights& weights, const LossOptions& options = {});

LossBreakdown TotalLoss(const Image& content, std::span<const Tensor> style_grams,
                        const Image& stylized, const FeatureExtractor& extractor,
                        const LayerSelection& layers, const LossWeights& weights,
                        const LossOptions& options = {});

}  // namespace seltext

#endif  // SELTEXT_PERCEPTUAL_HPP_
