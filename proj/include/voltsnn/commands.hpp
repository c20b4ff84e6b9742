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

#ifndef VOLTSNN_COMMANDS_HPP
#define VOLTSNN_COMMANDS_HPP

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>

#include "voltsnn/config.hpp"

namespace voltsnn
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitCapacity = 4,
  kExitOther = 5
};

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e) noexcept;

/// Files written to the output directory. Each command reads what earlier
/// steps produced there:
///   train   -> model.json, train.json
///   profile -> profile.json, profile.csv              (needs model.json)
///   fat     -> fat_model.json, fat.json, fat_levels.csv, fat_comparison.csv
///                                                     (needs model.json, profile.json)
///   energy  -> energy.json, energy.csv
///   select  -> candidates.json, reward.csv, selection.json
///                                                     (needs train.json, profile.json, fat.json)
///   report  -> plots/*.csv                            (from whatever exists)
void cmd_train(const ExperimentConfig& config, std::ostream& log);
void cmd_profile(const ExperimentConfig& config, std::ostream& log);
void cmd_fat(const ExperimentConfig& config, std::ostream& log);
void cmd_energy(const ExperimentConfig& config, std::ostream& log);
void cmd_select(const ExperimentConfig& config, std::ostream& log);
void cmd_report(const ExperimentConfig& config, std::ostream& log);

/// Dispatches by name. Returns kExitUsage for an unknown command.
int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& log);

/// Loads the config, applies overrides and runs the command, mapping
/// exceptions to exit codes and printing their message to `log`.
int run_command_file(const std::string& command, const std::string& config_path, std::optional<std::uint64_t> seed,
                     std::optional<std::string> out_dir, std::ostream& log);

} // namespace voltsnn

#endif
