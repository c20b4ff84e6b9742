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

#ifndef VOLTSNN_CHECKPOINT_HPP
#define VOLTSNN_CHECKPOINT_HPP

#include <string>

#include <json.hpp>

#include "voltsnn/fixedpoint.hpp"
#include "voltsnn/snn.hpp"

namespace voltsnn
{

/// JSON container for a trained network:
///
///   {"container": "voltsnn-checkpoint", "version": 1,
///    "network": {...},                       // SnnConfig
///    "weights": {"format": "fp32", "rounding": "tr", "rows": R, "cols": C,
///                "codes": "<hex>"},          // row-major words, big-endian hex
///    "theta": [...], "label_map": [...] | null, "provenance": {...}}
///
/// Each element takes bytes_per_element * 2 hex digits. fp32 stores IEEE-754
/// bit patterns, so a float checkpoint round-trips exactly. Fixed-point
/// checkpoints hold two's-complement codes and load as their dequantized
/// values.
nlohmann::json checkpoint_to_json(const SnnModel& model, const WeightFormat& format = WeightFormat::fp32(),
                                  Rounding rounding = Rounding::Truncate, const nlohmann::json& provenance = nlohmann::json::object());

/// Throws DataError on a malformed container.
SnnModel checkpoint_from_json(const nlohmann::json& j);

/// Throws DataError when the file is missing or malformed.
SnnModel load_checkpoint(const std::string& path);

} // namespace voltsnn

#endif
