/*
 *    Copyright 2026 The voltsnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "voltsnn/checkpoint.hpp"

#include <fstream>

#include "voltsnn/config.hpp"
#include "voltsnn/error.hpp"

namespace voltsnn
{

namespace
{
constexpr const char* kContainer = "voltsnn-checkpoint";
constexpr int kVersion = 1;

std::string encode_words(const QuantizedTensor& t)
{
  static constexpr char digits[] = "0123456789abcdef";
  const int nibbles = t.format.bytes_per_element() * 2;
  std::string out;
  out.reserve(t.words.size() * static_cast<std::size_t>(nibbles));
  for (auto w : t.words)
    for (int k = nibbles - 1; k >= 0; --k)
      out.push_back(digits[(w >> (4 * k)) & 0xf]);
  return out;
}

std::vector<std::uint32_t> decode_words(const std::string& hex, std::size_t count, int nibbles)
{
  if (hex.size() != count * static_cast<std::size_t>(nibbles))
    throw DataError("checkpoint weight codes have " + std::to_string(hex.size()) + " hex digits, expected " +
                    std::to_string(count * static_cast<std::size_t>(nibbles)));
  std::vector<std::uint32_t> words(count, 0);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char c = hex[i];
    std::uint32_t v;
    if (c >= '0' && c <= '9')
      v = static_cast<std::uint32_t>(c - '0');
    else if (c >= 'a' && c <= 'f')
      v = static_cast<std::uint32_t>(c - 'a' + 10);
    else
      throw DataError(std::string("invalid hex digit '") + c + "' in checkpoint weight codes");
    auto& w = words[i / static_cast<std::size_t>(nibbles)];
    w = (w << 4) | v;
  }
  return words;
}
} // namespace

nlohmann::json checkpoint_to_json(const SnnModel& model, const WeightFormat& format, Rounding rounding, const nlohmann::json& provenance)
{
  Rng rng = make_rng(0);
  const auto stored = quantize_tensor(model.weights(), format, rounding, rng);
  nlohmann::json j = {{"container", kContainer},
                      {"version", kVersion},
                      {"network", to_json(model.config())},
                      {"weights",
                       {{"format", format.name()},
                        {"rounding", to_string(rounding)},
                        {"rows", stored.rows},
                        {"cols", stored.cols},
                        {"codes", encode_words(stored)}}},
                      {"theta", std::vector<double>(model.theta().begin(), model.theta().end())},
                      {"label_map", model.labeled() ? nlohmann::json(model.label_map()) : nlohmann::json(nullptr)},
                      {"provenance", provenance}};
  return j;
}

SnnModel checkpoint_from_json(const nlohmann::json& j)
{
  try {
    if (j.at("container").get<std::string>() != kContainer)
      throw DataError("not a voltsnn checkpoint");
    if (j.at("version").get<int>() != kVersion)
      throw DataError("unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
    const auto config = snn_config_from_json(j.at("network"));
    const auto& w = j.at("weights");

    QuantizedTensor t;
    t.format = WeightFormat::parse(w.at("format").get<std::string>());
    t.rows = w.at("rows").get<std::size_t>();
    t.cols = w.at("cols").get<std::size_t>();
    t.words = decode_words(w.at("codes").get<std::string>(), t.rows * t.cols, t.format.bytes_per_element() * 2);

    SnnModel model(config, dequantize_tensor(t), j.at("theta").get<std::vector<double>>());
    if (!j.at("label_map").is_null())
      model.set_label_map(j.at("label_map").get<std::vector<int>>());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw DataError(std::string("invalid checkpoint: ") + e.what());
  }
}

SnnModel load_checkpoint(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open checkpoint " + path);
  try {
    return checkpoint_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

} // namespace voltsnn
