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

#include "seltext/style_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "seltext/error.hpp"

namespace seltext {

void NetworkConfig::Validate() const {
  auto positive = [](int v) { return v >= 1; };
  if (!positive(stem_width) || !positive(stem_kernel) || !positive(kernel) ||
      !positive(output_kernel)) {
    throw ConfigError("network widths and kernel sizes must be positive");
  }
  for (int w : down_widths) {
    if (!positive(w)) throw ConfigError("downsample widths must be positive");
  }
  for (int w : up_widths) {
    if (!positive(w)) throw ConfigError("upsample widths must be positive");
  }
  if (up_widths.size() != down_widths.size()) {
    throw ConfigError("upsample stages (" + std::to_string(up_widths.size()) +
                      ") must mirror downsample stages (" +
                      std::to_string(down_widths.size()) + ")");
  }
  if (down_widths.size() > 8) throw ConfigError("too many downsample stages");
  if (residual_blocks < 0) throw ConfigError("residual block count must be >= 0");
  if (num_styles < 1) throw ConfigError("style count must be >= 1");
}

StyleWeights::StyleWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ContractError("style weights are empty");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ContractError("style weights must be finite and non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ContractError("style weights must sum to 1, got " + std::to_string(sum));
  }
}

StyleWeights StyleWeights::OneHot(int num_styles, int index) {
  if (index < 0 || index >= num_styles) {
    throw ContractError("style index " + std::to_string(index) + " out of range [0, " +
                        std::to_string(num_styles) + ")");
  }
  std::vector<double> w(static_cast<std::size_t>(num_styles), 0.0);
  w[static_cast<std::size_t>(index)] = 1.0;
  return StyleWeights(std::move(w));
}

StyleWeights StyleWeights::Uniform(int num_styles) {
  return StyleWeights(std::vector<double>(static_cast<std::size_t>(num_styles),
                                          1.0 / num_styles));
}

Tensor CondInstanceNorm(const Tensor& activation, const Tensor& scale, const Tensor& shift,
                        double eps) {
  if (activation.rank() != 3 || activation.dim(1) * activation.dim(2) < 1) {
    throw ContractError("instance norm expects a non-empty C x H x W map");
  }
  if (scale.size() != static_cast<std::size_t>(activation.dim(0)) ||
      shift.size() != scale.size()) {
    throw ContractError("instance norm scale/shift must have one entry per channel");
  }
  return ad::InstanceNorm(ad::Var::Constant(activation), ad::Var::Constant(scale),
                          ad::Var::Constant(shift), eps)
      .value();
}

std::vector<NormRows> MixStyles(const StyleBank& bank, const StyleWeights& weights) {
  if (weights.size() != bank.num_styles()) {
    throw ContractError("got " + std::to_string(weights.size()) + " style weights for " +
                        std::to_string(bank.num_styles()) + " styles");
  }
  std::vector<NormRows> rows;
  rows.reserve(bank.layers.size());
  for (const auto& layer : bank.layers) {
    rows.push_back({ad::MixRows(ad::Var::Constant(layer.scale), weights.values()).value(),
                    ad::MixRows(ad::Var::Constant(layer.shift), weights.values()).value()});
  }
  return rows;
}

StyleNetwork::StyleNetwork(NetworkConfig config) : config_(std::move(config)) {
  config_.Validate();
  std::mt19937_64 rng(config_.seed);
  auto add_conv = [&](int in, int out, int k, int stride, bool upsample) {
    Conv c;
    c.weight = Tensor({out, in, k, k});
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (in * k * k)));
    for (double& v : c.weight.values()) v = static_cast<float>(dist(rng));
    c.bias = Tensor({out}, 0.0);
    c.stride = stride;
    c.upsample = upsample;
    convs_.push_back(std::move(c));
    NormBank nb{Tensor({config_.num_styles, out}, 1.0),
                Tensor({config_.num_styles, out}, 0.0)};
    bank_.layers.push_back(std::move(nb));
  };

  int width = config_.stem_width;
  add_conv(Image::kChannels, width, config_.stem_kernel, 1, false);
  for (int w : config_.down_widths) {
    add_conv(width, w, config_.kernel, 2, false);
    width = w;
  }
  for (int r = 0; r < config_.residual_blocks; ++r) {
    add_conv(width, width, config_.kernel, 1, false);
    add_conv(width, width, config_.kernel, 1, false);
  }
  for (int w : config_.up_widths) {
    add_conv(width, w, config_.kernel, 1, true);
    width = w;
  }
  add_conv(width, Image::kChannels, config_.output_kernel, 1, false);
}

std::vector<NamedTensor> StyleNetwork::Parameters() {
  std::vector<NamedTensor> out;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    out.push_back({"conv" + std::to_string(i) + ".weight", &convs_[i].weight});
    out.push_back({"conv" + std::to_string(i) + ".bias", &convs_[i].bias});
  }
  for (std::size_t i = 0; i < bank_.layers.size(); ++i) {
    out.push_back({"norm" + std::to_string(i) + ".scale", &bank_.layers[i].scale});
    out.push_back({"norm" + std::to_string(i) + ".shift", &bank_.layers[i].shift});
  }
  return out;
}

std::vector<ConstNamedTensor> StyleNetwork::Parameters() const {
  std::vector<ConstNamedTensor> out;
  for (auto& p : const_cast<StyleNetwork*>(this)->Parameters()) {
    out.push_back({std::move(p.name), p.tensor});
  }
  return out;
}

std::size_t StyleNetwork::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& p : Parameters()) n += p.tensor->size();
  return n;
}

std::vector<ad::Var> StyleNetwork::Bind(bool trainable) const {
  std::vector<ad::Var> out;
  for (const auto& p : Parameters()) {
    out.push_back(trainable ? ad::Var::Leaf(*p.tensor) : ad::Var::Constant(*p.tensor));
  }
  return out;
}

void StyleNetwork::CheckInputSize(int height, int width) const {
  const int f = config_.DownsampleFactor();
  if (height % f != 0 || width % f != 0) {
    throw SizeError("image size " + std::to_string(height) + "x" + std::to_string(width) +
                    " must be a multiple of " + std::to_string(f) + " in each dimension");
  }
}

template <typename NormFn>
ad::Var StyleNetwork::Run(std::span<const ad::Var> conv_params, const ad::Var& input,
                          NormFn&& norm) const {
  const Tensor& in = input.value();
  if (in.rank() != 3 || in.dim(0) != Image::kChannels) {
    throw SizeError("network expects a 3 x H x W input, got " + in.ShapeString());
  }
  CheckInputSize(in.dim(1), in.dim(2));

  std::size_t layer = 0;
  auto conv_norm = [&](const ad::Var& x) {
    const Conv& c = convs_[layer];
    ad::Var h = c.upsample ? ad::UpsampleNearest(x, 2) : x;
    const int k = c.weight.dim(2);
    h = ad::Conv2d(h, conv_params[2 * layer], conv_params[2 * layer + 1], c.stride, k / 2);
    auto [scale, shift] = norm(layer);
    ++layer;
    return ad::InstanceNorm(h, scale, shift, kInstanceNormEps);
  };

  ad::Var x = ad::Relu(conv_norm(input));
  for (std::size_t i = 0; i < config_.down_widths.size(); ++i) x = ad::Relu(conv_norm(x));
  for (int r = 0; r < config_.residual_blocks; ++r) {
    ad::Var h = ad::Relu(conv_norm(x));
    x = ad::Add(x, conv_norm(h));
  }
  for (std::size_t i = 0; i < config_.up_widths.size(); ++i) x = ad::Relu(conv_norm(x));
  return ad::Sigmoid(conv_norm(x));
}

ad::Var StyleNetwork::Forward(std::span<const ad::Var> bound, const ad::Var& input_chw,
                              const StyleWeights& weights) const {
  if (bound.size() != 2 * convs_.size() + 2 * bank_.layers.size()) {
    throw ContractError("bound parameter count does not match the network");
  }
  if (weights.size() != config_.num_styles) {
    throw ContractError("got " + std::to_string(weights.size()) + " style weights for " +
                        std::to_string(config_.num_styles) + " styles");
  }
  const std::size_t bank_offset = 2 * convs_.size();
  return Run(bound, input_chw, [&](std::size_t i) {
    return std::pair{ad::MixRows(bound[bank_offset + 2 * i], weights.values()),
                     ad::MixRows(bound[bank_offset + 2 * i + 1], weights.values())};
  });
}

Image StyleNetwork::Forward(const Image& image, const StyleWeights& weights) const {
  const auto bound = Bind(false);
  return Image::FromChw(Forward(bound, ad::Var::Constant(image.ToChw()), weights).value());
}

Image StyleNetwork::ForwardWithRows(const Image& image,
                                    const std::vector<NormRows>& rows) const {
  if (rows.size() != bank_.layers.size()) {
    throw ContractError("expected one set of normalization rows per layer");
  }
  const auto bound = Bind(false);
  return Image::FromChw(Run(bound, ad::Var::Constant(image.ToChw()), [&](std::size_t i) {
                          return std::pair{ad::Var::Constant(rows[i].scale),
                                           ad::Var::Constant(rows[i].shift)};
                        }).value());
}

Image ForwardPadded(const StyleNetwork& net, const Image& image, const StyleWeights& weights) {
  const int f = net.config().DownsampleFactor();
  const int h = (image.height() + f - 1) / f * f;
  const int w = (image.width() + f - 1) / f * f;
  if (h == image.height() && w == image.width()) return net.Forward(image, weights);
  Image padded(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sy = std::min(y, image.height() - 1), sx = std::min(x, image.width() - 1);
      for (int c = 0; c < Image::kChannels; ++c) padded.at(y, x, c) = image.at(sy, sx, c);
    }
  }
  const Image out = net.Forward(padded, weights);
  Image cropped(image.height(), image.width());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < Image::kChannels; ++c) cropped.at(y, x, c) = out.at(y, x, c);
    }
  }
  return cropped;
}

bool operator==(const StyleNetwork& a, const StyleNetwork& b) {
  if (!(a.config_ == b.config_)) return false;
  const auto pa = a.Parameters();
  const auto pb = b.Parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].name != pb[i].name || !(*pa[i].tensor == *pb[i].tensor)) return false;
  }
  return true;
}

}  // namespace seltext
