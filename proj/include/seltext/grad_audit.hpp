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

#ifndef SELTEXT_GRAD_AUDIT_HPP_
#define SELTEXT_GRAD_AUDIT_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seltext/distill.hpp"
#include "seltext/perceptual.hpp"

namespace seltext {

// Comparison of an analytic gradient against central differences
//   (f(x + h e_i) - f(x - h e_i)) / 2h
// for every coordinate i. The per-coordinate relative error is
//   |a_i - n_i| / max(|a_i|, |n_i|, floor)
// where the floor keeps coordinates whose true derivative is ~0 from
// dividing noise by noise.
struct GradAuditOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  double floor = 1e-8;
};

struct GradAuditReport {
  std::string name;
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  double max_gradient = 0.0;
  double tolerance = 0.0;
  bool analytic_finite = true;
  bool passed = false;
};

GradAuditReport CheckGradient(const std::string& name,
                              const std::function<double(const Tensor&)>& loss,
                              const Tensor& analytic, const Tensor& at,
                              const GradAuditOptions& options);

// Perceptual objective with respect to the stylized image's pixels.
struct TotalLossFixture {
  Image content;
  Image style;
  Image stylized;
  ExtractorConfig extractor;
  std::optional<LayerSelection> layers;
  LossWeights weights;
  LossOptions options;
};

// Masked MSE with respect to the student output.
struct DistillFixture {
  Image student_output;
  Image content;
  Image teacher_output;
  TextMask mask;
  DistillWeights weights;
  Reduction reduction = Reduction::kMean;
};

// Random size x size images and a smooth-activation extractor.
TotalLossFixture MakeTotalLossFixture(int size, std::uint64_t seed, LossWeights weights);
// All-zero stylized image through a zero-bias smooth extractor.
TotalLossFixture MakeZeroTotalLossFixture(int size, std::uint64_t seed);
// 2 x 2 images with a checkerboard mask.
DistillFixture MakeDistillFixture(std::uint64_t seed);

GradAuditReport AuditTotalLoss(const TotalLossFixture& fixture,
                               const GradAuditOptions& options);
GradAuditReport AuditDistillLoss(const DistillFixture& fixture,
                                 const GradAuditOptions& options);

// The fixtures the CLI's gradcheck command runs.
std::vector<GradAuditReport> RunShippedGradAudits();

}  // namespace seltext

#endif  // SELTEXT_GRAD_AUDIT_HPP_
