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

#include "seltext/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "seltext/error.hpp"
#include "seltext/json_io.hpp"
#include "seltext/manifest.hpp"

namespace seltext {
namespace {

using nlohmann::json;

constexpr const char* kNetworkFormat = "seltext-checkpoint";
constexpr const char* kExtractorFormat = "seltext-extractor";

std::uint32_t Crc32(const std::string& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large blobs.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

void AppendFloat(std::string& blob, double v) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
  for (int i = 0; i < 4; ++i) blob.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

float ReadFloat(const std::string& blob, std::size_t offset) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[offset + i])) << (8 * i);
  }
  return std::bit_cast<float>(bits);
}

void WriteTables(const std::filesystem::path& path, const char* format, json header,
                 const std::vector<ConstNamedTensor>& params) {
  std::string blob;
  json table = json::array();
  for (const auto& p : params) {
    table.push_back({{"name", p.name},
                     {"shape", p.tensor->shape()},
                     {"offset", blob.size()},
                     {"count", p.tensor->size()}});
    for (double v : p.tensor->values()) AppendFloat(blob, v);
  }
  header["format"] = format;
  header["version"] = kCheckpointVersion;
  header["blob"] = BlobPath(path).filename().string();
  header["blob_bytes"] = blob.size();
  header["crc32"] = Crc32(blob);
  header["parameters"] = std::move(table);
  WriteFileBytes(BlobPath(path), blob);
  WriteFileBytes(path, header.dump(2) + "\n");
}

json ParseHeader(std::string_view text, const char* format) {
  json header;
  try {
    header = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IntegrityError("checkpoint manifest is not valid JSON");
  }
  if (!header.is_object() || header.value("format", "") != format) {
    throw IncompatibleError(std::string("not a ") + format + " manifest");
  }
  const auto version = header.value("version", -1);
  if (version != kCheckpointVersion) {
    throw IncompatibleError("checkpoint version " + std::to_string(version) +
                            " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
  }
  return header;
}

std::string ReadBlob(const std::filesystem::path& manifest_path, const json& header) {
  try {
    return ReadFileBytes(manifest_path.parent_path() / header.at("blob").get<std::string>());
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

void VerifyBlob(const json& header, const std::string& blob) {
  try {
    if (blob.size() != header.at("blob_bytes").get<std::size_t>()) {
      throw IntegrityError("checkpoint blob is " + std::to_string(blob.size()) +
                           " bytes, manifest says " + header.at("blob_bytes").dump());
    }
    if (Crc32(blob) != header.at("crc32").get<std::uint32_t>()) {
      throw IntegrityError("checkpoint blob checksum mismatch");
    }
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

// Fills each target tensor from a verified blob according to the table.
void ReadTables(const json& header, const std::string& blob,
                const std::vector<NamedTensor>& targets) {
  try {
    const auto& table = header.at("parameters");
    if (table.size() != targets.size()) {
      throw IntegrityError("parameter table has " + std::to_string(table.size()) +
                           " entries, expected " + std::to_string(targets.size()));
    }
    // Decode into scratch first so a failure leaves the targets untouched.
    std::vector<std::vector<double>> decoded;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& entry = table[i];
      const Tensor& t = *targets[i].tensor;
      if (entry.at("name").get<std::string>() != targets[i].name ||
          entry.at("shape").get<std::vector<int>>() != t.shape()) {
        throw IntegrityError("parameter " + entry.at("name").get<std::string>() +
                             " does not match the configured architecture");
      }
      const auto offset = entry.at("offset").get<std::size_t>();
      const auto count = entry.at("count").get<std::size_t>();
      if (count != t.size() || offset % 4 != 0 || offset > blob.size() ||
          count * 4 > blob.size() - offset) {
        throw IntegrityError("parameter " + targets[i].name + " lies outside the blob");
      }
      std::vector<double> v(count);
      for (std::size_t k = 0; k < count; ++k) v[k] = ReadFloat(blob, offset + 4 * k);
      decoded.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
      *targets[i].tensor = Tensor(targets[i].tensor->shape(), std::move(decoded[i]));
    }
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

LoadedCheckpoint ParseNetwork(const json& header, const std::string& blob) {
  VerifyBlob(header, blob);
  NetworkConfig config;
  CheckpointExtras extras;
  try {
    config = header.at("network").get<NetworkConfig>();
    if (header.contains("extractor")) {
      extras.extractor = header.at("extractor").get<ExtractorConfig>();
    }
    if (header.contains("training")) extras.training_json = header.at("training").dump();
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed checkpoint config: ") + e.what());
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("invalid checkpoint config: ") + e.what());
  }
  StyleNetwork net(config);
  ReadTables(header, blob, net.Parameters());
  return {std::move(net), std::move(extras)};
}

}  // namespace

std::filesystem::path BlobPath(const std::filesystem::path& manifest_path) {
  auto p = manifest_path;
  p += ".bin";
  return p;
}

void SaveCheckpoint(const std::filesystem::path& path, const StyleNetwork& net,
                    const CheckpointExtras& extras) {
  json header;
  header["network"] = net.config();
  if (extras.extractor) header["extractor"] = *extras.extractor;
  if (extras.training_json) header["training"] = json::parse(*extras.training_json);
  WriteTables(path, kNetworkFormat, std::move(header), net.Parameters());
}

LoadedCheckpoint LoadCheckpointWithExtras(const std::filesystem::path& path) {
  const json header = ParseHeader(ReadFileBytes(path), kNetworkFormat);
  return ParseNetwork(header, ReadBlob(path, header));
}

StyleNetwork LoadCheckpoint(const std::filesystem::path& path) {
  return LoadCheckpointWithExtras(path).network;
}

LoadedCheckpoint ParseCheckpoint(std::string_view manifest, const std::string& blob) {
  return ParseNetwork(ParseHeader(manifest, kNetworkFormat), blob);
}

void SaveExtractor(const std::filesystem::path& path, const FeatureExtractor& extractor) {
  json header;
  header["extractor"] = extractor.config();
  std::vector<ConstNamedTensor> params;
  for (int i = 0; i < extractor.num_layers(); ++i) {
    params.push_back({"layer" + std::to_string(i) + ".weight", &extractor.weights()[i]});
    params.push_back({"layer" + std::to_string(i) + ".bias", &extractor.biases()[i]});
  }
  WriteTables(path, kExtractorFormat, std::move(header), params);
}

FeatureExtractor LoadExtractor(const std::filesystem::path& path) {
  const json header = ParseHeader(ReadFileBytes(path), kExtractorFormat);
  const std::string blob = ReadBlob(path, header);
  VerifyBlob(header, blob);
  ExtractorConfig config;
  try {
    config = header.at("extractor").get<ExtractorConfig>();
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed extractor config: ") + e.what());
  }
  // Seeded construction supplies correctly shaped tensors to overwrite.
  FeatureExtractor shaped(config);
  std::vector<Tensor> weights = shaped.weights();
  std::vector<Tensor> biases = shaped.biases();
  std::vector<NamedTensor> targets;
  for (int i = 0; i < shaped.num_layers(); ++i) {
    targets.push_back({"layer" + std::to_string(i) + ".weight", &weights[i]});
    targets.push_back({"layer" + std::to_string(i) + ".bias", &biases[i]});
  }
  ReadTables(header, blob, targets);
  return FeatureExtractor(std::move(config), std::move(weights), std::move(biases));
}

}  // namespace seltext
