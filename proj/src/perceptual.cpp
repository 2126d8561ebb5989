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

#include "seltext/perceptual.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "seltext/error.hpp"

namespace seltext {
namespace {

double RoundToFloat(double v) { return static_cast<double>(static_cast<float>(v)); }

void CheckLayers(const LayerSelection& layers, int num_layers) {
  auto in_range = [&](int l) { return l >= 0 && l < num_layers; };
  if (!in_range(layers.content_layer)) {
    throw ContractError("content layer " + std::to_string(layers.content_layer) +
                        " is not an extractor stage");
  }
  if (layers.style_layers.empty()) throw ContractError("no style layers selected");
  for (int l : layers.style_layers) {
    if (!in_range(l)) {
      throw ContractError("style layer " + std::to_string(l) + " is not an extractor stage");
    }
  }
}

double Reduce(double sum, std::size_t count, Reduction r) {
  return r == Reduction::kMean ? sum / static_cast<double>(count) : sum;
}

}  // namespace

LayerSelection LayerSelection::Default(int num_layers) {
  LayerSelection s;
  s.content_layer = num_layers - 1;
  for (int i = 0; i < num_layers; ++i) s.style_layers.push_back(i);
  return s;
}

FeatureExtractor::FeatureExtractor(ExtractorConfig config) : config_(std::move(config)) {
  if (config_.layers.empty()) throw ConfigError("extractor needs at least one layer");
  std::mt19937_64 rng(config_.seed);
  int in_channels = Image::kChannels;
  for (const auto& spec : config_.layers) {
    if (spec.channels < 1 || spec.kernel < 1 || spec.stride < 1) {
      throw ConfigError("invalid extractor layer spec");
    }
    const int fan_in = in_channels * spec.kernel * spec.kernel;
    std::normal_distribution<double> wdist(0.0, std::sqrt(2.0 / fan_in));
    Tensor w({spec.channels, in_channels, spec.kernel, spec.kernel});
    for (double& v : w.values()) v = RoundToFloat(wdist(rng));
    Tensor b({spec.channels}, 0.0);
    if (config_.bias_stddev > 0.0) {
      std::normal_distribution<double> bdist(0.0, config_.bias_stddev);
      for (double& v : b.values()) v = RoundToFloat(bdist(rng));
    }
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
    in_channels = spec.channels;
  }
}

FeatureExtractor::FeatureExtractor(ExtractorConfig config, std::vector<Tensor> weights,
                                   std::vector<Tensor> biases)
    : config_(std::move(config)), weights_(std::move(weights)), biases_(std::move(biases)) {
  if (weights_.size() != config_.layers.size() || biases_.size() != config_.layers.size()) {
    throw ConfigError("extractor weight count does not match its layer count");
  }
  int in_channels = Image::kChannels;
  for (std::size_t i = 0; i < config_.layers.size(); ++i) {
    const auto& spec = config_.layers[i];
    const std::vector<int> want{spec.channels, in_channels, spec.kernel, spec.kernel};
    if (weights_[i].shape() != want || biases_[i].shape() != std::vector<int>{spec.channels}) {
      throw ConfigError("extractor layer " + std::to_string(i) + " weight shape " +
                        weights_[i].ShapeString() + " does not match its spec");
    }
    in_channels = spec.channels;
  }
}

void FeatureExtractor::CheckInput(int height, int width, const LayerSelection& layers) const {
  CheckLayers(layers, num_layers());
  const int deepest =
      std::max(layers.content_layer,
               *std::max_element(layers.style_layers.begin(), layers.style_layers.end()));
  for (int i = 0; i <= deepest; ++i) {
    const auto& spec = config_.layers[i];
    const int pad = spec.EffectivePadding();
    const int h = height + 2 * pad - spec.kernel;
    const int w = width + 2 * pad - spec.kernel;
    if (h < 0 || w < 0) {
      throw SizeError("input too small for extractor layer " + std::to_string(i) + " (" +
                      std::to_string(height) + "x" + std::to_string(width) +
                      " entering a " + std::to_string(spec.kernel) + "x" +
                      std::to_string(spec.kernel) + " kernel)");
    }
    height = h / spec.stride + 1;
    width = w / spec.stride + 1;
  }
}

std::map<int, ad::Var> FeatureExtractor::Run(const ad::Var& image_chw,
                                             const LayerSelection& layers) const {
  const Tensor& in = image_chw.value();
  if (in.rank() != 3 || in.dim(0) != Image::kChannels) {
    throw SizeError("extractor expects a 3 x H x W input, got " + in.ShapeString());
  }
  CheckInput(in.dim(1), in.dim(2), layers);
  const int deepest =
      std::max(layers.content_layer,
               *std::max_element(layers.style_layers.begin(), layers.style_layers.end()));
  std::map<int, ad::Var> out;
  ad::Var x = image_chw;
  for (int i = 0; i <= deepest; ++i) {
    const auto& spec = config_.layers[i];
    x = ad::Conv2d(x, ad::Var::Constant(weights_[i]), ad::Var::Constant(biases_[i]),
                   spec.stride, spec.EffectivePadding());
    x = config_.activation == Activation::kRelu ? ad::Relu(x) : ad::ShiftedSoftplus(x);
    const bool wanted =
        i == layers.content_layer ||
        std::find(layers.style_layers.begin(), layers.style_layers.end(), i) !=
            layers.style_layers.end();
    if (wanted) out.emplace(i, x);
  }
  return out;
}

FeatureStack ExtractFeatures(const FeatureExtractor& extractor, const Image& image,
                             const LayerSelection& layers) {
  FeatureStack stack;
  for (auto& [id, var] : extractor.Run(ad::Var::Constant(image.ToChw()), layers)) {
    stack.emplace(id, var.value());
  }
  return stack;
}

Tensor Gram(const Tensor& feature, bool normalize) {
  if (feature.rank() != 3 || feature.dim(0) < 1 || feature.dim(1) * feature.dim(2) < 1) {
    throw ContractError("gram expects a non-empty C x H x W map, got " +
                        feature.ShapeString());
  }
  if (!feature.AllFinite()) throw NumericError("gram input contains non-finite values");
  return ad::Gram(ad::Var::Constant(feature), normalize).value();
}

double ContentLoss(const FeatureStack& content, const FeatureStack& stylized,
                   int content_layer, Reduction reduction) {
  const auto a = content.find(content_layer);
  const auto b = stylized.find(content_layer);
  if (a == content.end() || b == stylized.end()) {
    throw ContractError("content layer " + std::to_string(content_layer) +
                        " missing from feature stack");
  }
  if (!a->second.SameShape(b->second)) {
    throw ContractError("content feature shapes differ: " + a->second.ShapeString() +
                        " vs " + b->second.ShapeString());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a->second.size(); ++i) {
    const double d = a->second[i] - b->second[i];
    s += d * d;
  }
  return Reduce(s, a->second.size(), reduction);
}

double StyleLoss(std::span<const Tensor> grams_style, std::span<const Tensor> grams_stylized,
                 Reduction reduction) {
  if (grams_style.size() != grams_stylized.size()) {
    throw ContractError("style loss needs equal numbers of Gram matrices");
  }
  double total = 0.0;
  for (std::size_t l = 0; l < grams_style.size(); ++l) {
    const Tensor& a = grams_style[l];
    const Tensor& b = grams_stylized[l];
    if (!a.SameShape(b)) {
      throw ContractError("Gram shapes differ at layer " + std::to_string(l));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    total += Reduce(s, a.size(), reduction);
  }
  return total;
}

std::vector<Tensor> StyleGrams(const FeatureExtractor& extractor, const Image& style,
                               const LayerSelection& layers, const LossOptions& options) {
  const FeatureStack feats = ExtractFeatures(extractor, style, layers);
  std::vector<Tensor> grams;
  for (int l : layers.style_layers) grams.push_back(Gram(feats.at(l), options.normalize_gram));
  return grams;
}

LossTerms TotalLossGraph(const ad::Var& stylized, const FeatureStack& content_features,
                         std::span<const Tensor> style_grams,
                         const FeatureExtractor& extractor, const LayerSelection& layers,
                         const LossWeights& weights, const LossOptions& options) {
  if (style_grams.size() != layers.style_layers.size()) {
    throw ContractError("expected one style Gram per style layer");
  }
  const auto feats = extractor.Run(stylized, layers);
  const auto content_it = content_features.find(layers.content_layer);
  if (content_it == content_features.end()) {
    throw ContractError("content features lack layer " +
                        std::to_string(layers.content_layer));
  }
  const ad::Var& fp = feats.at(layers.content_layer);
  if (!content_it->second.SameShape(fp.value())) {
    throw ContractError("content feature shapes differ: " +
                        content_it->second.ShapeString() + " vs " +
                        fp.value().ShapeString());
  }
  LossTerms t;
  t.content = ad::SquaredError(ad::Var::Constant(content_it->second), fp, options.reduction);
  for (std::size_t l = 0; l < style_grams.size(); ++l) {
    ad::Var g = ad::Gram(feats.at(layers.style_layers[l]), options.normalize_gram);
    if (!g.value().SameShape(style_grams[l])) {
      throw ContractError("Gram shapes differ at layer " + std::to_string(l));
    }
    ad::Var term = ad::SquaredError(ad::Var::Constant(style_grams[l]), g, options.reduction);
    t.style = t.style.defined() ? ad::Add(t.style, term) : term;
  }
  t.total = ad::Add(ad::Scale(t.content, weights.content), ad::Scale(t.style, weights.style));
  return t;
}

LossBreakdown TotalLoss(const Image& content, std::span<const Tensor> style_grams,
                        const Image& stylized, const FeatureExtractor& extractor,
                        const LayerSelection& layers, const LossWeights& weights,
                        const LossOptions& options) {
  const FeatureStack content_features = ExtractFeatures(extractor, content, layers);
  const LossTerms t = TotalLossGraph(ad::Var::Constant(stylized.ToChw()), content_features,
                                     style_grams, extractor, layers, weights, options);
  return {t.content.item(), t.style.item(), t.total.item(), weights};
}

}  // namespace seltext
