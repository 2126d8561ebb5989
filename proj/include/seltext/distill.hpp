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

#ifndef SELTEXT_DISTILL_HPP_
#define SELTEXT_DISTILL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seltext/autodiff.hpp"
#include "seltext/image.hpp"
#include "seltext/manifest.hpp"
#include "seltext/optim.hpp"
#include "seltext/style_net.hpp"

namespace seltext {

// theta_s = p * M (teacher output on text), theta_c = c * (1 - M).
struct DistillTargets {
  Image theta_s;
  Image theta_c;
};

// Throws ContractError for size mismatches or a non-binary mask.
DistillTargets MakeTargets(const Image& content, const Image& teacher_output,
                           const TextMask& mask);

// Text and background weights of the masked MSE.
struct DistillWeights {
  double lambda_text = 100.0;
  double lambda_bg = 1.0;
};

// lambda_text * R((p_hat * M - theta_s)^2) + lambda_bg * R((p_hat * (1 - M) - theta_c)^2)
double DistillLoss(const Image& student_output, const DistillTargets& targets,
                   const TextMask& mask, const DistillWeights& weights,
                   Reduction reduction = Reduction::kMean);

// Graph form over 3 x H x W tensors; `mask_chw` is the mask replicated over
// the three channels.
ad::Var DistillLossGraph(const ad::Var& student_output, const Tensor& theta_s,
                         const Tensor& theta_c, const Tensor& mask_chw,
                         const DistillWeights& weights, Reduction reduction);

Tensor MaskToChw(const TextMask& mask);

struct DistillPhase {
  int epochs = 1;
  DistillWeights weights;
};

enum class StyleConditioning {
  // Teacher and student both use the caller's StyleWeights.
  kFixed,
  // Each batch uses one style, round-robin; teacher and student share it.
  kPerBatch,
};

struct DistillSchedule {
  // Text-heavy phase, then equal weights.
  std::vector<DistillPhase> phases = {{77, {100.0, 1.0}}, {50, {1.0, 1.0}}};
  AdamOptions optimizer;
  int batch_size = 1;
  std::uint64_t seed = 0;
  Reduction reduction = Reduction::kMean;
  StyleConditioning conditioning = StyleConditioning::kFixed;
  // Keep teacher outputs after their first computation instead of
  // recomputing them each epoch.
  bool cache_teacher_outputs = false;

  // Throws ConfigError: no phases, negative epochs, negative or non-finite
  // weights, lambda_text <= lambda_bg in the first phase, batch size < 1.
  void Validate() const;
};

struct DistillSample {
  Image content;
  TextMask mask;
};

struct DistillTraceRow {
  long step = 0;
  int phase = 0;
  double loss = 0.0;
};

struct DistillResult {
  StyleNetwork student;
  std::vector<DistillTraceRow> trace;
};

// Trains a student with the teacher's architecture, randomly initialized from
// schedule.seed. The teacher is only read. Throws ConfigError for an empty
// dataset and TrainingError on a non-finite loss.
DistillResult TrainStudent(const StyleNetwork& teacher, std::span<const DistillSample> samples,
                           const DistillSchedule& schedule, const StyleWeights& style);

// Loads every manifest entry, crops it to a multiple of the network's
// downsampling factor (top-left anchored, so annotation coordinates keep
// their meaning) and rasterizes its mask.
std::vector<DistillSample> LoadDistillSamples(const DatasetManifest& manifest,
                                              int size_multiple);

}  // namespace seltext

#endif  // SELTEXT_DISTILL_HPP_
