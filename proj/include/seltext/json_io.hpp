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

#ifndef SELTEXT_JSON_IO_HPP_
#define SELTEXT_JSON_IO_HPP_

#include <nlohmann/json.hpp>

#include "seltext/perceptual.hpp"
#include "seltext/style_net.hpp"

namespace seltext {

void to_json(nlohmann::json& j, const NetworkConfig& c);
void from_json(const nlohmann::json& j, NetworkConfig& c);

void to_json(nlohmann::json& j, const ExtractorConfig& c);
void from_json(const nlohmann::json& j, ExtractorConfig& c);

void to_json(nlohmann::json& j, const LayerSelection& s);
void from_json(const nlohmann::json& j, LayerSelection& s);

}  // namespace seltext

#endif  // SELTEXT_JSON_IO_HPP_
