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

#include "seltext/grad_audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "seltext/error.hpp"

namespace seltext {
namespace {

Image RandomImage(int h, int w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(h, w);
  for (double& v : img.values()) v = u(rng);
  return img;
}

ExtractorConfig SmallSmoothExtractor(std::uint64_t seed) {
  ExtractorConfig cfg;
  cfg.layers = {{4, 3, 1, -1}, {6, 3, 2, -1}};
  cfg.activation = Activation::kSmooth;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

GradAuditReport CheckGradient(const std::string& name,
                              const std::function<double(const Tensor&)>& loss,
                              const Tensor& analytic, const Tensor& at,
                              const GradAuditOptions& options) {
  if (!analytic.SameShape(at)) throw ContractError("gradient shape differs from input");
  GradAuditReport r;
  r.name = name;
  r.tolerance = options.tolerance;
  r.analytic_finite = analytic.AllFinite();
  Tensor x = at;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + options.step;
    const double up = loss(x);
    x[i] = orig - options.step;
    const double down = loss(x);
    x[i] = orig;
    const double numeric = (up - down) / (2.0 * options.step);
    const double a = analytic[i];
    const double abs_err = std::abs(a - numeric);
    const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
    r.max_absolute_error = std::max(r.max_absolute_error, abs_err);
    r.max_relative_error = std::max(r.max_relative_error, abs_err / denom);
    r.max_gradient = std::max(r.max_gradient, std::abs(a));
    ++r.checked;
  }
  r.passed = r.analytic_finite && std::isfinite(r.max_relative_error) &&
             r.max_relative_error < options.tolerance;
  return r;
}

TotalLossFixture MakeTotalLossFixture(int size, std::uint64_t seed, LossWeights weights) {
  std::mt19937_64 rng(seed);
  TotalLossFixture f;
  f.content = RandomImage(size, size, rng);
  f.style = RandomImage(size, size, rng);
  f.stylized = RandomImage(size, size, rng);
  f.extractor = SmallSmoothExtractor(seed);
  f.extractor.bias_stddev = 0.1;
  f.weights = weights;
  return f;
}

TotalLossFixture MakeZeroTotalLossFixture(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TotalLossFixture f;
  f.content = RandomImage(size, size, rng);
  f.style = RandomImage(size, size, rng);
  f.stylized = Image(size, size, 0.0);
  f.extractor = SmallSmoothExtractor(seed);
  f.weights = {0.0, 1.0};
  return f;
}

DistillFixture MakeDistillFixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DistillFixture f;
  f.student_output = RandomImage(2, 2, rng);
  f.content = RandomImage(2, 2, rng);
  f.teacher_output = RandomImage(2, 2, rng);
  f.mask = TextMask(2, 2, std::vector<double>{1.0, 0.0, 0.0, 1.0});
  f.weights = {100.0, 1.0};
  return f;
}

GradAuditReport AuditTotalLoss(const TotalLossFixture& f, const GradAuditOptions& options) {
  const FeatureExtractor extractor(f.extractor);
  const LayerSelection layers = f.layers.value_or(LayerSelection::Default(extractor.num_layers()));
  const std::vector<Tensor> grams = StyleGrams(extractor, f.style, layers, f.options);
  const FeatureStack content = ExtractFeatures(extractor, f.content, layers);

  const ad::Var p = ad::Var::Leaf(f.stylized.ToChw());
  const LossTerms t = TotalLossGraph(p, content, grams, extractor, layers, f.weights, f.options);
  ad::Backward(t.total);
  Tensor analytic = p.grad().empty() ? Tensor(p.value().shape(), 0.0) : p.grad();

  auto loss = [&](const Tensor& x) {
    return TotalLossGraph(ad::Var::Constant(x), content, grams, extractor, layers, f.weights,
                          f.options)
        .total.item();
  };
  return CheckGradient("total_loss", loss, analytic, p.value(), options);
}

GradAuditReport AuditDistillLoss(const DistillFixture& f, const GradAuditOptions& options) {
  const DistillTargets targets = MakeTargets(f.content, f.teacher_output, f.mask);
  const Tensor theta_s = targets.theta_s.ToChw();
  const Tensor theta_c = targets.theta_c.ToChw();
  const Tensor mask = MaskToChw(f.mask);

  const ad::Var p = ad::Var::Leaf(f.student_output.ToChw());
  ad::Backward(DistillLossGraph(p, theta_s, theta_c, mask, f.weights, f.reduction));
  auto loss = [&](const Tensor& x) {
    return DistillLossGraph(ad::Var::Constant(x), theta_s, theta_c, mask, f.weights,
                            f.reduction)
        .item();
  };
  return CheckGradient("distill_loss", loss, p.grad(), p.value(), options);
}

std::vector<GradAuditReport> RunShippedGradAudits() {
  std::vector<GradAuditReport> reports;
  GradAuditOptions total_opts{.step = 1e-5, .tolerance = 1e-4};
  auto r = AuditTotalLoss(MakeTotalLossFixture(8, 7, {1.0, 1.0}), total_opts);
  r.name = "total_loss 8x8";
  reports.push_back(r);
  r = AuditTotalLoss(MakeTotalLossFixture(8, 11, {1.0, 0.0}), total_opts);
  r.name = "total_loss 8x8 content-only";
  reports.push_back(r);
  r = AuditTotalLoss(MakeZeroTotalLossFixture(8, 3), total_opts);
  r.name = "total_loss 8x8 zero image";
  reports.push_back(r);
  r = AuditDistillLoss(MakeDistillFixture(5), {.step = 1e-5, .tolerance = 1e-6});
  r.name = "distill_loss 2x2";
  reports.push_back(r);
  return reports;
}

}  // namespace seltext
