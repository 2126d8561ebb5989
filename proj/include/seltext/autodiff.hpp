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

#ifndef SELTEXT_AUTODIFF_HPP_
#define SELTEXT_AUTODIFF_HPP_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "seltext/tensor.hpp"

// Minimal reverse-mode differentiation over Tensor-valued nodes. A graph is
// built implicitly by calling the ops below and torn down when the last Var
// referencing it is dropped. Nodes whose inputs all have requires_grad ==
// false record no backward closure, so inference builds no tape.
namespace seltext::ad {

struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  // Lazily allocates grad with the shape of value.
  Tensor& Grad();
};

class Var {
 public:
  Var() = default;

  // Non-differentiable input.
  static Var Constant(Tensor value);
  // Differentiable input; gradients accumulate into grad().
  static Var Leaf(Tensor value);

  const Tensor& value() const { return node_->value; }
  // Empty tensor when nothing has been propagated here.
  const Tensor& grad() const { return node_->grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool defined() const { return node_ != nullptr; }

  // Value of a single-element tensor.
  double item() const;

  const std::shared_ptr<Node>& node() const { return node_; }

  static Var FromNode(std::shared_ptr<Node> node);

 private:
  std::shared_ptr<Node> node_;
};

// Seeds d(root)/d(root) = 1 and propagates to every reachable leaf. root must
// hold exactly one element.
void Backward(const Var& root);

enum class Reduction { kSum, kMean };

// Zero-padded 2-D convolution. x: C x H x W, weight: O x C x K x K,
// bias: O. Output spatial size is (H + 2*pad - K) / stride + 1.
Var Conv2d(const Var& x, const Var& weight, const Var& bias, int stride,
           int pad);

Var Relu(const Var& x);
// softplus(x) - log(2): smooth, and maps 0 to 0.
Var ShiftedSoftplus(const Var& x);
Var Sigmoid(const Var& x);

// Per-channel normalization over the spatial extent of a single instance,
// followed by the affine map scale[c] * xhat + shift[c].
Var InstanceNorm(const Var& x, const Var& scale, const Var& shift, double eps);

// Convex (or any fixed-coefficient) combination of the rows of an N x C
// table. Rows with a zero coefficient receive an exactly-zero gradient.
Var MixRows(const Var& table, std::span<const double> coefficients);

Var UpsampleNearest(const Var& x, int factor);

Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Scale(const Var& a, double factor);

// C x C channel correlation of a C x H x W map, optionally divided by C*H*W.
Var Gram(const Var& features, bool normalize);

// Reduction of (a - b)^2 to a one-element tensor.
Var SquaredError(const Var& a, const Var& b, Reduction reduction);

}  // namespace seltext::ad

namespace seltext {
using ad::Reduction;
}  // namespace seltext

#endif  // SELTEXT_AUTODIFF_HPP_
