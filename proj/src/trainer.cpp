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

#include "seltext/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "seltext/error.hpp"

namespace seltext {

void TrainConfig::Validate() const {
  if (steps < 0) throw ConfigError("step count must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(optimizer.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (image_size < 1) throw ConfigError("image size must be positive");
  network.Validate();
}

Image ResizeAndCenterCrop(const Image& image, int size) {
  if (size < 1) throw SizeError("crop size must be positive");
  if (image.height() == size && image.width() == size) return image;
  cv::Mat src(image.height(), image.width(), CV_64FC3,
              const_cast<double*>(image.values().data()));
  const double scale = static_cast<double>(size) / std::min(image.height(), image.width());
  const int h = std::max(size, static_cast<int>(std::lround(image.height() * scale)));
  const int w = std::max(size, static_cast<int>(std::lround(image.width() * scale)));
  cv::Mat resized;
  cv::resize(src, resized, cv::Size(w, h), 0, 0,
             scale < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);
  const int y0 = (h - size) / 2, x0 = (w - size) / 2;
  Image out(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const auto& px = resized.at<cv::Vec3d>(y0 + y, x0 + x);
      for (int c = 0; c < Image::kChannels; ++c) out.at(y, x, c) = std::clamp(px[c], 0.0, 1.0);
    }
  }
  return out;
}

TrainResult TrainBaseline(const TrainConfig& config) {
  config.Validate();
  if (static_cast<int>(config.style_sources.size()) != config.network.num_styles) {
    throw ConfigError("expected " + std::to_string(config.network.num_styles) +
                      " style images, got " + std::to_string(config.style_sources.size()));
  }
  std::vector<Image> styles;
  for (const auto& p : config.style_sources) {
    std::error_code ec;
    if (!std::filesystem::exists(p, ec)) throw ConfigError("missing style source " + p.string());
    styles.push_back(ResizeAndCenterCrop(LoadImage(p), config.image_size));
  }
  std::vector<Image> contents;
  for (const auto& e : config.content.entries) {
    contents.push_back(ResizeAndCenterCrop(LoadImage(config.content.Resolve(e.image)),
                                           config.image_size));
  }
  return TrainBaseline(config, contents, styles);
}

TrainResult TrainBaseline(const TrainConfig& config, std::span<const Image> contents,
                          std::span<const Image> styles) {
  config.Validate();
  const int num_styles = config.network.num_styles;
  if (static_cast<int>(styles.size()) != num_styles) {
    throw ConfigError("expected " + std::to_string(num_styles) + " style images, got " +
                      std::to_string(styles.size()));
  }
  if (contents.empty()) throw ConfigError("content dataset is empty");

  TrainResult result{StyleNetwork(config.network), {}, 0};
  if (config.steps == 0) return result;

  const FeatureExtractor extractor(config.extractor);
  const LayerSelection layers =
      config.layers.value_or(LayerSelection::Default(extractor.num_layers()));

  std::vector<std::vector<Tensor>> style_grams;
  for (const Image& s : styles) {
    style_grams.push_back(StyleGrams(extractor, s, layers, config.loss_options));
    ++result.style_gram_computations;
  }
  // Content features do not depend on the network, so compute them once.
  std::vector<Tensor> content_chw;
  std::vector<FeatureStack> content_features;
  for (const Image& c : contents) {
    result.network.CheckInputSize(c.height(), c.width());
    content_chw.push_back(c.ToChw());
    content_features.push_back(ExtractFeatures(extractor, c, layers));
  }

  StyleNetwork& net = result.network;
  Adam adam(config.optimizer, net);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(contents.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  for (long step = 0; step < config.steps; ++step) {
    const int style = StyleForStep(step, num_styles);
    const StyleWeights w = StyleWeights::OneHot(num_styles, style);
    auto bound = net.Bind(true);
    ad::Var content_sum, style_sum, total_sum;
    for (int b = 0; b < config.batch_size; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const std::size_t i = order[cursor++];
      const ad::Var out = net.Forward(bound, ad::Var::Constant(content_chw[i]), w);
      const LossTerms t = TotalLossGraph(out, content_features[i], style_grams[style],
                                         extractor, layers, config.weights,
                                         config.loss_options);
      auto acc = [](ad::Var& sum, const ad::Var& v) {
        sum = sum.defined() ? ad::Add(sum, v) : v;
      };
      acc(content_sum, t.content);
      acc(style_sum, t.style);
      acc(total_sum, t.total);
    }
    const double inv = 1.0 / config.batch_size;
    const ad::Var loss = ad::Scale(total_sum, inv);
    const double value = loss.item();
    if (!std::isfinite(value)) throw TrainingError(step, "non-finite style transfer loss");
    ad::Backward(loss);
    adam.Step(net, bound);
    result.trace.push_back(
        {step, style, content_sum.item() * inv, style_sum.item() * inv, value});
  }
  return result;
}

void WriteTrainTrace(const std::filesystem::path& path, std::span<const TrainTraceRow> rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << std::setprecision(17) << "step,style,content,style_loss,total\n";
  for (const auto& r : rows) {
    out << r.step << ',' << r.style << ',' << r.content << ',' << r.style_loss << ','
        << r.total << '\n';
  }
  if (!out) throw IoError("error writing " + path.string());
}

void WriteDistillTrace(const std::filesystem::path& path,
                       std::span<const DistillTraceRow> rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << std::setprecision(17) << "step,phase,loss\n";
  for (const auto& r : rows) out << r.step << ',' << r.phase << ',' << r.loss << '\n';
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace seltext
