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

#ifndef VOLTSNN_SELECTION_HPP
#define VOLTSNN_SELECTION_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace voltsnn
{

struct Candidate
{
  std::string id;
  double accuracy = 0.0;       // in [0, 1]
  std::size_t n_weights = 0;
  unsigned bitwidth = 32;      // 8 or 32 for the shipped formats
  double energy_approx = 0.0;  // DRAM energy on approximate DRAM (nJ)
  double energy_accurate = 0.0; // same accesses on accurate DRAM (nJ)
  double ber = 0.0;
  double v_supply = 1.35;

  /// Throws InvalidValue on accuracy outside [0, 1], zero weights or bit
  /// width, or non-positive energies.
  void validate() const;
  bool operator==(const Candidate&) const = default;
};

/// (n_weights * bitwidth) / (n_weights * 32). Throws InvalidValue if the
/// reference differs in weight count or is not 32-bit.
double memory_norm(const Candidate& candidate, const Candidate& reference);
/// Against an implicit 32-bit model of the same size.
double memory_norm(const Candidate& candidate);

/// energy_approx / energy_accurate. A ratio above 1 appends a message to
/// `warnings` when given.
double energy_norm(const Candidate& candidate, std::vector<std::string>* warnings = nullptr);

/// accuracy - (mu * m_norm + epsilon * e_norm). Throws InvalidValue on a
/// negative weight factor.
double reward(double accuracy, double m_norm, double e_norm, double mu, double epsilon);

/// Index of the highest-reward candidate; ties go to smaller memory, then
/// smaller energy, then the earlier entry. Throws InvalidValue when empty.
std::size_t select(std::span<const Candidate> candidates, double mu, double epsilon);

struct RewardRow
{
  std::size_t candidate = 0;
  double mu = 0.0;
  double epsilon = 0.0;
  double m_norm = 0.0;
  double e_norm = 0.0;
  double reward = 0.0;
  bool selected = false;
};

/// One row per (mu, epsilon, candidate), mu-major.
std::vector<RewardRow> reward_grid(std::span<const Candidate> candidates, std::span<const double> mus, std::span<const double> epsilons);
/// candidate,mu,epsilon,m_norm,e_norm,reward,selected
void write_reward_csv(std::ostream& out, std::span<const Candidate> candidates, std::span<const RewardRow> rows);

struct CarbonEstimate
{
  double energy_kwh = 0.0; // p_t
  double co2e = 0.0;
};

/// p_t = 1.58 * t * (p_c + p_r + g * p_g) / 1000 and CO2e = 0.954 * p_t with t
/// in hours and powers in watts. Throws InvalidValue on a negative input.
CarbonEstimate carbon_emission(double hours, double cpu_watts, double dram_watts, double gpu_watts, double gpus);

nlohmann::json to_json(const Candidate& candidate);
Candidate candidate_from_json(const nlohmann::json& j);

} // namespace voltsnn

#endif
