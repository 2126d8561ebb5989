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

#include "seltext/distill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "seltext/annotations.hpp"
#include "seltext/error.hpp"

namespace seltext {
namespace {

void CheckSizes(const Image& a, const Image& b, const TextMask& m) {
  if (a.height() != b.height() || a.width() != b.width() || !m.SameSize(a)) {
    throw ContractError("image and mask sizes differ");
  }
}

Image Crop(const Image& img, int height, int width) {
  Image out(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < Image::kChannels; ++c) out.at(y, x, c) = img.at(y, x, c);
    }
  }
  return out;
}

}  // namespace

DistillTargets MakeTargets(const Image& content, const Image& teacher_output,
                           const TextMask& mask) {
  CheckSizes(content, teacher_output, mask);
  if (!IsBinary(mask)) throw ContractError("text mask must be binary");
  DistillTargets t{Image(content.height(), content.width()),
                   Image(content.height(), content.width())};
  for (int y = 0; y < content.height(); ++y) {
    for (int x = 0; x < content.width(); ++x) {
      const double m = mask.at(y, x);
      for (int c = 0; c < Image::kChannels; ++c) {
        t.theta_s.at(y, x, c) = teacher_output.at(y, x, c) * m;
        t.theta_c.at(y, x, c) = content.at(y, x, c) * (1.0 - m);
      }
    }
  }
  return t;
}

Tensor MaskToChw(const TextMask& mask) {
  Tensor t = Tensor::Chw(Image::kChannels, mask.height(), mask.width());
  for (int c = 0; c < Image::kChannels; ++c) {
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) t.at(c, y, x) = mask.at(y, x);
    }
  }
  return t;
}

ad::Var DistillLossGraph(const ad::Var& student_output, const Tensor& theta_s,
                         const Tensor& theta_c, const Tensor& mask_chw,
                         const DistillWeights& weights, Reduction reduction) {
  Tensor inverse = mask_chw;
  for (double& v : inverse.values()) v = 1.0 - v;
  const ad::Var text = ad::Mul(student_output, ad::Var::Constant(mask_chw));
  const ad::Var background = ad::Mul(student_output, ad::Var::Constant(std::move(inverse)));
  const ad::Var text_term = ad::SquaredError(text, ad::Var::Constant(theta_s), reduction);
  const ad::Var bg_term = ad::SquaredError(background, ad::Var::Constant(theta_c), reduction);
  return ad::Add(ad::Scale(text_term, weights.lambda_text),
                 ad::Scale(bg_term, weights.lambda_bg));
}

double DistillLoss(const Image& student_output, const DistillTargets& targets,
                   const TextMask& mask, const DistillWeights& weights,
                   Reduction reduction) {
  CheckSizes(student_output, targets.theta_s, mask);
  CheckSizes(student_output, targets.theta_c, mask);
  return DistillLossGraph(ad::Var::Constant(student_output.ToChw()),
                          targets.theta_s.ToChw(), targets.theta_c.ToChw(),
                          MaskToChw(mask), weights, reduction)
      .item();
}

void DistillSchedule::Validate() const {
  if (phases.empty()) throw ConfigError("distillation schedule has no phases");
  for (const auto& ph : phases) {
    if (ph.epochs < 0) throw ConfigError("phase epochs must be >= 0");
    const auto& w = ph.weights;
    if (!std::isfinite(w.lambda_text) || !std::isfinite(w.lambda_bg) || w.lambda_text < 0.0 ||
        w.lambda_bg < 0.0) {
      throw ConfigError("distillation weights must be finite and >= 0");
    }
  }
  if (!(phases.front().weights.lambda_text > phases.front().weights.lambda_bg)) {
    throw ConfigError("the first phase must weight text above background");
  }
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

DistillResult TrainStudent(const StyleNetwork& teacher, std::span<const DistillSample> samples,
                           const DistillSchedule& schedule, const StyleWeights& style) {
  schedule.Validate();
  if (samples.empty()) throw ConfigError("distillation dataset is empty");
  if (style.size() != teacher.num_styles()) {
    throw ConfigError("style weights do not match the teacher's style count");
  }
  for (const auto& s : samples) {
    if (!s.mask.SameSize(s.content)) throw ContractError("sample mask size differs from image");
    if (!IsBinary(s.mask)) throw ContractError("sample mask must be binary");
    teacher.CheckInputSize(s.content.height(), s.content.width());
  }

  NetworkConfig student_config = teacher.config();
  student_config.seed = schedule.seed;
  DistillResult result{StyleNetwork(student_config), {}};
  StyleNetwork& student = result.student;
  Adam adam(schedule.optimizer, student);

  const int num_styles = teacher.num_styles();
  auto style_for_batch = [&](long batch) {
    return schedule.conditioning == StyleConditioning::kFixed
               ? style
               : StyleWeights::OneHot(num_styles, static_cast<int>(batch % num_styles));
  };

  // Per-sample tensors that do not change across epochs.
  std::vector<Tensor> contents, masks;
  for (const auto& s : samples) {
    contents.push_back(s.content.ToChw());
    masks.push_back(MaskToChw(s.mask));
  }
  const auto teacher_params = teacher.Bind(false);
  std::vector<std::vector<std::optional<Tensor>>> teacher_cache(
      samples.size(), std::vector<std::optional<Tensor>>(static_cast<std::size_t>(num_styles)));

  std::mt19937_64 rng(schedule.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  long step = 0;
  for (std::size_t phase = 0; phase < schedule.phases.size(); ++phase) {
    const DistillPhase& ph = schedule.phases[phase];
    for (int epoch = 0; epoch < ph.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(schedule.batch_size)) {
        const std::size_t end =
            std::min(order.size(), start + static_cast<std::size_t>(schedule.batch_size));
        const StyleWeights w = style_for_batch(step);
        const std::size_t style_key =
            schedule.conditioning == StyleConditioning::kFixed
                ? 0
                : static_cast<std::size_t>(step % num_styles);

        auto bound = student.Bind(true);
        ad::Var batch_loss;
        for (std::size_t b = start; b < end; ++b) {
          const std::size_t i = order[b];
          std::optional<Tensor>& cached = teacher_cache[i][style_key];
          Tensor teacher_out;
          if (cached) {
            teacher_out = *cached;
          } else {
            teacher_out =
                teacher.Forward(teacher_params, ad::Var::Constant(contents[i]), w).value();
            if (schedule.cache_teacher_outputs) cached = teacher_out;
          }
          Tensor theta_s = teacher_out, theta_c = contents[i];
          for (std::size_t j = 0; j < theta_s.size(); ++j) {
            theta_s[j] *= masks[i][j];
            theta_c[j] *= 1.0 - masks[i][j];
          }
          const ad::Var out = student.Forward(bound, ad::Var::Constant(contents[i]), w);
          const ad::Var loss =
              DistillLossGraph(out, theta_s, theta_c, masks[i], ph.weights, schedule.reduction);
          batch_loss = batch_loss.defined() ? ad::Add(batch_loss, loss) : loss;
        }
        batch_loss = ad::Scale(batch_loss, 1.0 / static_cast<double>(end - start));
        const double value = batch_loss.item();
        if (!std::isfinite(value)) throw TrainingError(step, "non-finite distillation loss");
        ad::Backward(batch_loss);
        adam.Step(student, bound);
        result.trace.push_back({step, static_cast<int>(phase), value});
        ++step;
      }
    }
  }
  return result;
}

std::vector<DistillSample> LoadDistillSamples(const DatasetManifest& manifest,
                                              int size_multiple) {
  std::vector<DistillSample> out;
  for (const auto& e : manifest.entries) {
    Image img = LoadImage(manifest.Resolve(e.image));
    const int h = img.height() / size_multiple * size_multiple;
    const int w = img.width() / size_multiple * size_multiple;
    if (h < 1 || w < 1) {
      throw SizeError(e.image.string() + " is smaller than " + std::to_string(size_multiple) +
                      " pixels");
    }
    if (h != img.height() || w != img.width()) img = Crop(img, h, w);
    TextMask mask = RasterizeMask(LoadAnnotations(manifest, e), h, w);
    out.push_back({std::move(img), std::move(mask)});
  }
  return out;
}

}  // namespace seltext
