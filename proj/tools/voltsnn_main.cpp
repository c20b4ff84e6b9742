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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "voltsnn/commands.hpp"

int main(int argc, char** argv)
{
  CLI::App app{"Voltage-scaled DRAM study for spiking neural networks"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  const char* commands[][2] = {{"train", "pre-train the network with STDP and save model.json"},
                               {"profile", "accuracy versus bit error rate, tolerable BER and FAT schedule"},
                               {"fat", "fault-aware retraining and FAT/non-FAT comparison"},
                               {"energy", "DRAM energy and throughput across formats, mappings and voltages"},
                               {"select", "reward-based model selection over the (mu, epsilon) grid"},
                               {"report", "plot-ready CSV series from the outputs"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "override the output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? voltsnn::kExitOk : voltsnn::kExitUsage;
  }
  return voltsnn::run_command_file(app.get_subcommands().front()->get_name(), config_path, seed, out_dir, std::cerr);
}
