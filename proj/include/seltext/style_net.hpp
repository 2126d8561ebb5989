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

#ifndef SELTEXT_STYLE_NET_HPP_
#define SELTEXT_STYLE_NET_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seltext/autodiff.hpp"
#include "seltext/image.hpp"
#include "seltext/tensor.hpp"

namespace seltext {

inline constexpr double kInstanceNormEps = 1e-5;

// Encoder / residual / decoder transformation network. Every convolution is
// followed by conditional instance normalization; the output passes through a
// sigmoid so values stay in [0, 1].
struct NetworkConfig {
  int stem_width = 8;
  int stem_kernel = 3;
  // Stride-2 convolutions.
  std::vector<int> down_widths = {16, 32};
  int residual_blocks = 3;
  // Nearest-neighbour x2 upsampling followed by a convolution; one per
  // downsampling stage.
  std::vector<int> up_widths = {16, 8};
  int kernel = 3;
  int output_kernel = 3;
  int num_styles = 1;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
  // Input height and width must be multiples of this.
  int DownsampleFactor() const { return 1 << down_widths.size(); }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Convex weights over the N learned styles.
class StyleWeights {
 public:
  // Throws ContractError unless every weight is >= 0 and they sum to 1
  // within 1e-6.
  explicit StyleWeights(std::vector<double> weights);
  static StyleWeights OneHot(int num_styles, int index);
  static StyleWeights Uniform(int num_styles);

  std::span<const double> values() const { return weights_; }
  int size() const { return static_cast<int>(weights_.size()); }

 private:
  std::vector<double> weights_;
};

// Scale and shift rows of one normalized layer: N x C each.
struct NormBank {
  Tensor scale;
  Tensor shift;
};

// Per-style conditional instance normalization parameters.
struct StyleBank {
  std::vector<NormBank> layers;
  int num_styles() const { return layers.empty() ? 0 : layers.front().scale.dim(0); }
};

// Mixed scale/shift vectors (length C) for one normalized layer.
struct NormRows {
  Tensor scale;
  Tensor shift;
};

// (x - mean) / sqrt(var + eps) * scale + shift per channel, statistics over
// the spatial extent of this instance.
Tensor CondInstanceNorm(const Tensor& activation, const Tensor& scale, const Tensor& shift,
                        double eps = kInstanceNormEps);

// Convex combination of the bank rows; throws ContractError when the weight
// count differs from N.
std::vector<NormRows> MixStyles(const StyleBank& bank, const StyleWeights& weights);

struct NamedTensor {
  std::string name;
  Tensor* tensor;
};
struct ConstNamedTensor {
  std::string name;
  const Tensor* tensor;
};

class StyleNetwork {
 public:
  // Deterministic seeded initialization; CIN scales 1 and shifts 0.
  explicit StyleNetwork(NetworkConfig config);

  const NetworkConfig& config() const { return config_; }
  const StyleBank& bank() const { return bank_; }
  int num_styles() const { return config_.num_styles; }

  // Stable, ordered view of every parameter: convolution weights and biases
  // first, then the bank's scale and shift tables.
  std::vector<NamedTensor> Parameters();
  std::vector<ConstNamedTensor> Parameters() const;
  std::size_t ParameterCount() const;

  // One graph node per entry of Parameters(); Leaf nodes when trainable.
  std::vector<ad::Var> Bind(bool trainable) const;

  // Graph forward over bound parameters. The bank rows are mixed inside the
  // graph, so unused styles receive exactly-zero gradients.
  ad::Var Forward(std::span<const ad::Var> bound, const ad::Var& input_chw,
                  const StyleWeights& weights) const;

  // Throws SizeError when the dimensions are not multiples of
  // DownsampleFactor().
  Image Forward(const Image& image, const StyleWeights& weights) const;
  // Uses the supplied normalization rows instead of the bank.
  Image ForwardWithRows(const Image& image, const std::vector<NormRows>& rows) const;

  void CheckInputSize(int height, int width) const;

  friend bool operator==(const StyleNetwork& a, const StyleNetwork& b);

 private:
  struct Conv {
    Tensor weight;
    Tensor bias;
    int stride = 1;
    bool upsample = false;
  };

  // Shared body; `norm` yields the (scale, shift) nodes of layer i.
  template <typename NormFn>
  ad::Var Run(std::span<const ad::Var> conv_params, const ad::Var& input,
              NormFn&& norm) const;

  NetworkConfig config_;
  std::vector<Conv> convs_;
  StyleBank bank_;
};

// Forward on an image of any size: edge-replicates up to the next multiple of
// the downsampling factor, runs the network and crops back.
Image ForwardPadded(const StyleNetwork& net, const Image& image, const StyleWeights& weights);

}  // namespace seltext

#endif  // SELTEXT_STYLE_NET_HPP_
