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

#ifndef VOLTSNN_CONFIG_HPP
#define VOLTSNN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "voltsnn/dram_mapping.hpp"
#include "voltsnn/dram_org.hpp"
#include "voltsnn/fixedpoint.hpp"
#include "voltsnn/snn.hpp"

namespace voltsnn
{

struct DatasetConfig
{
  bool toy = false;            // two-class synthetic set instead of IDX files
  std::size_t toy_side = 8;
  std::string train_images, train_labels, test_images, test_labels; // resolved paths
  std::size_t train_samples = 2000; // 0 loads every sample
  std::size_t test_samples = 2000;
  bool operator==(const DatasetConfig&) const = default;
};

struct DramConfig
{
  DramGeometry geometry;
  AccessEnergies energies;
  DramTiming timing;
  double v_nominal = VoltageConfig::kNominal;
  double energy_exponent = 2.0;
  double write_energy_factor = 1.0;
  double flip_probability = 0.5; // P in BER = F * P
  bool operator==(const DramConfig&) const = default;

  VoltageConfig voltage(double v_supply) const;
};

enum class ScheduleMode
{
  Efficient,
  Conventional,
  Explicit
};
ScheduleMode parse_schedule_mode(std::string_view name);
std::string to_string(ScheduleMode mode);

struct ExperimentConfig
{
  std::uint64_t seed = 1;
  std::string output_dir = "out"; // resolved
  unsigned threads = 0;           // 0: VOLTSNN_THREADS or hardware

  DatasetConfig dataset;
  SnnConfig network;
  std::size_t epochs = 3;

  std::string format = "fxp8_signed_q1_6";
  Rounding rounding = Rounding::Truncate;
  DramConfig dram;

  MappingPolicy mapping = MappingPolicy::EnforceSnn;
  MappingVariant variant = MappingVariant::Listing;
  bool ber_th_from_profile = false;
  double ber_th = 1e-2;
  double max_accuracy_drop = 0.03;  // tolerable loss when the threshold comes from the profile

  std::vector<double> profile_bers{0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  std::size_t profile_trials = 5;
  MappingPolicy profile_mapping = MappingPolicy::Baseline;

  ScheduleMode schedule = ScheduleMode::Efficient;
  std::vector<double> schedule_bers; // explicit mode only
  double region_a_drop = 0.01;
  double learning_rate_scale = 0.1;
  double collapse_drop = 0.20;
  double epoch_cost = 1.0; // per-epoch cost relative to the conventional reference
  std::vector<double> comparison_bers{1e-4, 1e-3, 1e-2};

  std::vector<double> energy_voltages{1.025, 1.1, 1.2, 1.35};
  std::vector<std::string> energy_formats{"fp32", "fxp8_signed_q1_6"};
  std::uint32_t energy_passes = 1;

  std::vector<double> mus{0, 1, 5, 10};
  std::vector<double> epsilons{0, 1, 5, 10};
  double operating_voltage = VoltageConfig::kMinSupply;
  double operating_ber = 1e-2;
  std::vector<std::string> selection_results; // extra result directories, resolved

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
/// Reads a config file; paths resolve against its directory. A missing or
/// unparsable file is a ConfigError.
ExperimentConfig load_config(const std::string& path);
/// Fully resolved document, every field present.
nlohmann::json to_json(const ExperimentConfig& config);
/// FNV-1a 64 of the compact resolved document, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

nlohmann::json to_json(const SnnConfig& config);
/// Missing keys keep their defaults; unknown keys throw ConfigError.
SnnConfig snn_config_from_json(const nlohmann::json& j);

} // namespace voltsnn

#endif
