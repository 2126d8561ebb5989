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

#include "seltext/optim.hpp"

#include <cmath>

#include "seltext/error.hpp"

namespace seltext {

Adam::Adam(AdamOptions options, const StyleNetwork& net) : options_(options) {
  if (!(options_.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  for (const auto& p : net.Parameters()) {
    first_.emplace_back(p.tensor->shape(), 0.0);
    second_.emplace_back(p.tensor->shape(), 0.0);
  }
}

void Adam::Step(StyleNetwork& net, const std::vector<ad::Var>& bound) {
  auto params = net.Parameters();
  if (params.size() != bound.size() || params.size() != first_.size()) {
    throw ContractError("optimizer state does not match the network");
  }
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& g = bound[i].grad();
    if (g.size() != params[i].tensor->size()) continue;
    Tensor& p = *params[i].tensor;
    Tensor& m = first_[i];
    Tensor& v = second_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double update =
          options_.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + options_.epsilon);
      p[j] = static_cast<float>(p[j] - update);
    }
  }
}

}  // namespace seltext
