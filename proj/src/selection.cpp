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

#include "voltsnn/selection.hpp"

#include <ostream>

#include "voltsnn/error.hpp"

namespace voltsnn
{

void Candidate::validate() const
{
  if (!(accuracy >= 0.0 && accuracy <= 1.0))
    throw InvalidValue("candidate " + id + ": accuracy outside [0, 1]");
  if (n_weights == 0 || bitwidth == 0)
    throw InvalidValue("candidate " + id + ": weight count and bit width must be positive");
  if (!(energy_approx > 0.0 && energy_accurate > 0.0))
    throw InvalidValue("candidate " + id + ": energies must be positive");
}

double memory_norm(const Candidate& candidate, const Candidate& reference)
{
  if (reference.bitwidth != 32)
    throw InvalidValue("memory reference must be a 32-bit model");
  if (reference.n_weights != candidate.n_weights)
    throw InvalidValue("memory reference has " + std::to_string(reference.n_weights) + " weights, candidate " + candidate.id + " has " +
                       std::to_string(candidate.n_weights));
  if (candidate.n_weights == 0)
    throw InvalidValue("candidate " + candidate.id + " has no weights");
  const double n = static_cast<double>(candidate.n_weights);
  return (n * candidate.bitwidth) / (n * reference.bitwidth);
}

double memory_norm(const Candidate& candidate)
{
  Candidate reference = candidate;
  reference.bitwidth = 32;
  return memory_norm(candidate, reference);
}

double energy_norm(const Candidate& candidate, std::vector<std::string>* warnings)
{
  if (!(candidate.energy_accurate > 0.0))
    throw InvalidValue("candidate " + candidate.id + ": accurate-DRAM energy must be positive");
  const double ratio = candidate.energy_approx / candidate.energy_accurate;
  if (ratio > 1.0 && warnings)
    warnings->push_back("candidate " + candidate.id + ": approximate DRAM energy exceeds accurate DRAM energy");
  return ratio;
}

double reward(double accuracy, double m_norm, double e_norm, double mu, double epsilon)
{
  if (!(mu >= 0.0 && epsilon >= 0.0))
    throw InvalidValue("reward weights mu and epsilon must be non-negative");
  return accuracy - (mu * m_norm + epsilon * e_norm);
}

std::size_t select(std::span<const Candidate> candidates, double mu, double epsilon)
{
  if (candidates.empty())
    throw InvalidValue("no candidates to select from");
  std::size_t best = 0;
  double best_r = 0.0, best_m = 0.0, best_e = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].validate();
    const double m = memory_norm(candidates[i]);
    const double e = energy_norm(candidates[i]);
    const double r = reward(candidates[i].accuracy, m, e, mu, epsilon);
    const bool better = i == 0 || r > best_r || (r == best_r && (m < best_m || (m == best_m && e < best_e)));
    if (better) {
      best = i;
      best_r = r;
      best_m = m;
      best_e = e;
    }
  }
  return best;
}

std::vector<RewardRow> reward_grid(std::span<const Candidate> candidates, std::span<const double> mus, std::span<const double> epsilons)
{
  std::vector<RewardRow> rows;
  for (double mu : mus) {
    for (double eps : epsilons) {
      const auto chosen = select(candidates, mu, eps);
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        RewardRow row;
        row.candidate = i;
        row.mu = mu;
        row.epsilon = eps;
        row.m_norm = memory_norm(candidates[i]);
        row.e_norm = energy_norm(candidates[i]);
        row.reward = reward(candidates[i].accuracy, row.m_norm, row.e_norm, mu, eps);
        row.selected = i == chosen;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_reward_csv(std::ostream& out, std::span<const Candidate> candidates, std::span<const RewardRow> rows)
{
  out << "candidate,mu,epsilon,m_norm,e_norm,reward,selected\n";
  for (const auto& r : rows)
    out << candidates[r.candidate].id << ',' << r.mu << ',' << r.epsilon << ',' << r.m_norm << ',' << r.e_norm << ',' << r.reward << ','
        << (r.selected ? 1 : 0) << '\n';
}

CarbonEstimate carbon_emission(double hours, double cpu_watts, double dram_watts, double gpu_watts, double gpus)
{
  if (!(hours >= 0.0 && cpu_watts >= 0.0 && dram_watts >= 0.0 && gpu_watts >= 0.0 && gpus >= 0.0))
    throw InvalidValue("carbon estimate inputs must be non-negative");
  const double energy = 1.58 * hours * (cpu_watts + dram_watts + gpus * gpu_watts) / 1000.0;
  return {energy, 0.954 * energy};
}

nlohmann::json to_json(const Candidate& c)
{
  return {{"id", c.id},
          {"accuracy", c.accuracy},
          {"n_weights", c.n_weights},
          {"bitwidth", c.bitwidth},
          {"energy_approx_nj", c.energy_approx},
          {"energy_accurate_nj", c.energy_accurate},
          {"ber", c.ber},
          {"v_supply", c.v_supply}};
}

Candidate candidate_from_json(const nlohmann::json& j)
{
  try {
    Candidate c;
    c.id = j.at("id").get<std::string>();
    c.accuracy = j.at("accuracy").get<double>();
    c.n_weights = j.at("n_weights").get<std::size_t>();
    c.bitwidth = j.at("bitwidth").get<unsigned>();
    c.energy_approx = j.at("energy_approx_nj").get<double>();
    c.energy_accurate = j.at("energy_accurate_nj").get<double>();
    c.ber = j.value("ber", 0.0);
    c.v_supply = j.value("v_supply", 1.35);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed candidate: ") + e.what());
  }
}

} // namespace voltsnn
