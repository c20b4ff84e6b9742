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

#include "voltsnn/dram_org.hpp"

#include <cmath>
#include <tuple>
#include <utility>

#include "voltsnn/error.hpp"

namespace voltsnn
{

void DramGeometry::validate() const
{
  const std::pair<const char*, std::uint32_t> counts[] = {{"channels", channels}, {"ranks", ranks},       {"chips", chips},
                                                          {"banks", banks},       {"subarrays", subarrays}, {"rows", rows},
                                                          {"columns", columns},   {"bytes_per_column", bytes_per_column}};
  for (const auto& [name, value] : counts)
    if (value == 0)
      throw InvalidValue(std::string("DRAM geometry: ") + name + " must be at least 1");
}

std::string to_string(const DramAddress& a)
{
  return "[ch " + std::to_string(a.channel) + ", ra " + std::to_string(a.rank) + ", cp " + std::to_string(a.chip) + ", ba " + std::to_string(a.bank) +
         ", su " + std::to_string(a.subarray) + ", ro " + std::to_string(a.row) + ", co " + std::to_string(a.column) + "]";
}

std::uint64_t linear_capacity(const DramGeometry& g) { return g.column_count() * g.bytes_per_column; }

void validate_address(const DramGeometry& g, const DramAddress& a)
{
  const std::tuple<const char*, std::uint32_t, std::uint32_t> dims[] = {
      {"channel", a.channel, g.channels}, {"rank", a.rank, g.ranks}, {"chip", a.chip, g.chips},      {"bank", a.bank, g.banks},
      {"subarray", a.subarray, g.subarrays}, {"row", a.row, g.rows}, {"column", a.column, g.columns}};
  for (const auto& [name, index, bound] : dims)
    if (index >= bound)
      throw AddressError(name, index, bound);
}

std::uint64_t bank_index(const DramGeometry& g, const DramAddress& a) noexcept
{
  return ((std::uint64_t{a.channel} * g.ranks + a.rank) * g.chips + a.chip) * g.banks + a.bank;
}

std::uint64_t subarray_index(const DramGeometry& g, const DramAddress& a) noexcept { return bank_index(g, a) * g.subarrays + a.subarray; }

std::uint64_t column_index(const DramGeometry& g, const DramAddress& a) noexcept
{
  return (subarray_index(g, a) * g.rows + a.row) * g.columns + a.column;
}

DramAddress address_of_column(const DramGeometry& g, std::uint64_t column)
{
  if (column >= g.column_count())
    throw AddressError("column-index", column, g.column_count());
  DramAddress a;
  auto take = [&column](std::uint32_t bound) {
    const auto v = static_cast<std::uint32_t>(column % bound);
    column /= bound;
    return v;
  };
  a.column = take(g.columns);
  a.row = take(g.rows);
  a.subarray = take(g.subarrays);
  a.bank = take(g.banks);
  a.chip = take(g.chips);
  a.rank = take(g.ranks);
  a.channel = take(g.channels);
  return a;
}

std::string to_string(RowCondition c)
{
  switch (c) {
  case RowCondition::Hit:
    return "hit";
  case RowCondition::Miss:
    return "miss";
  case RowCondition::Conflict:
    return "conflict";
  }
  return "?";
}

VoltageConfig::VoltageConfig(double v_supply, AccessEnergies energies, DramTiming timing, double energy_exponent, double v_nominal,
                             double write_energy_factor)
    : v_supply_(v_supply), energies_(energies), timing_(timing), energy_exponent_(energy_exponent), v_nominal_(v_nominal),
      write_energy_factor_(write_energy_factor)
{
  if (!(v_nominal > 0.0))
    throw InvalidValue("v_nominal must be positive");
  // Small slack so decimal configs like 1.025 survive round-trips.
  constexpr double slack = 1e-12;
  if (!(v_supply >= kMinSupply - slack && v_supply <= v_nominal + slack))
    throw InvalidValue("v_supply " + std::to_string(v_supply) + " V outside [1.025, " + std::to_string(v_nominal) + "] V");
  if (!(energies.hit > 0.0 && energies.hit < energies.miss && energies.miss < energies.conflict))
    throw InvalidValue("access energies must satisfy 0 < hit < miss < conflict");
  if (!(timing.t_rcd > 0 && timing.t_ras > 0 && timing.t_rp > 0 && timing.t_burst > 0))
    throw InvalidValue("DRAM timing parameters must be positive");
  if (!(energy_exponent > 0.0))
    throw InvalidValue("energy exponent must be positive");
  if (!(write_energy_factor > 0.0))
    throw InvalidValue("write energy factor must be positive");
}

VoltageConfig VoltageConfig::at(double v_supply) const
{
  return VoltageConfig(v_supply, energies_, timing_, energy_exponent_, v_nominal_, write_energy_factor_);
}

double energy_scale(const VoltageConfig& v) noexcept { return std::pow(v.v_supply() / v.v_nominal(), v.energy_exponent()); }

double access_energy(RowCondition condition, const VoltageConfig& v) noexcept
{
  const auto& e = v.energies();
  double base = e.hit;
  if (condition == RowCondition::Miss)
    base = e.miss;
  else if (condition == RowCondition::Conflict)
    base = e.conflict;
  return base * energy_scale(v);
}

} // namespace voltsnn
