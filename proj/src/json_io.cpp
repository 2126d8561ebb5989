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

#include "seltext/json_io.hpp"

#include "seltext/error.hpp"

namespace seltext {

using nlohmann::json;

void to_json(json& j, const NetworkConfig& c) {
  j = json{{"stem_width", c.stem_width},
           {"stem_kernel", c.stem_kernel},
           {"down_widths", c.down_widths},
           {"residual_blocks", c.residual_blocks},
           {"up_widths", c.up_widths},
           {"kernel", c.kernel},
           {"output_kernel", c.output_kernel},
           {"num_styles", c.num_styles},
           {"seed", c.seed},
           {"output", "sigmoid"}};
}

void from_json(const json& j, NetworkConfig& c) {
  j.at("stem_width").get_to(c.stem_width);
  j.at("stem_kernel").get_to(c.stem_kernel);
  j.at("down_widths").get_to(c.down_widths);
  j.at("residual_blocks").get_to(c.residual_blocks);
  j.at("up_widths").get_to(c.up_widths);
  j.at("kernel").get_to(c.kernel);
  j.at("output_kernel").get_to(c.output_kernel);
  j.at("num_styles").get_to(c.num_styles);
  j.at("seed").get_to(c.seed);
}

void to_json(json& j, const ExtractorConfig& c) {
  json layers = json::array();
  for (const auto& l : c.layers) {
    layers.push_back({{"channels", l.channels},
                      {"kernel", l.kernel},
                      {"stride", l.stride},
                      {"padding", l.padding}});
  }
  j = json{{"layers", layers},
           {"activation", c.activation == Activation::kRelu ? "relu" : "smooth"},
           {"seed", c.seed},
           {"bias_stddev", c.bias_stddev}};
}

void from_json(const json& j, ExtractorConfig& c) {
  c.layers.clear();
  for (const auto& l : j.at("layers")) {
    ExtractorLayerSpec s;
    l.at("channels").get_to(s.channels);
    l.at("kernel").get_to(s.kernel);
    l.at("stride").get_to(s.stride);
    l.at("padding").get_to(s.padding);
    c.layers.push_back(s);
  }
  const auto act = j.at("activation").get<std::string>();
  if (act == "relu") {
    c.activation = Activation::kRelu;
  } else if (act == "smooth") {
    c.activation = Activation::kSmooth;
  } else {
    throw ConfigError("unknown activation '" + act + "'");
  }
  j.at("seed").get_to(c.seed);
  c.bias_stddev = j.value("bias_stddev", 0.0);
}

void to_json(json& j, const LayerSelection& s) {
  j = json{{"content_layer", s.content_layer}, {"style_layers", s.style_layers}};
}

void from_json(const json& j, LayerSelection& s) {
  j.at("content_layer").get_to(s.content_layer);
  j.at("style_layers").get_to(s.style_layers);
}

}  // namespace seltext
