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

#ifndef SELTEXT_OPTIM_HPP_
#define SELTEXT_OPTIM_HPP_

#include <vector>

#include "seltext/autodiff.hpp"
#include "seltext/style_net.hpp"

namespace seltext {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam over a network's parameters. Updated values are rounded to 32-bit
// floats so checkpoints store them exactly.
class Adam {
 public:
  Adam(AdamOptions options, const StyleNetwork& net);

  // `bound` comes from net.Bind(true) and carries this step's gradients.
  // Parameters without a gradient are left untouched.
  void Step(StyleNetwork& net, const std::vector<ad::Var>& bound);

  long steps() const { return steps_; }

 private:
  AdamOptions options_;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
  long steps_ = 0;
};

}  // namespace seltext

#endif  // SELTEXT_OPTIM_HPP_
