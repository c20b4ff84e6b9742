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

#ifndef VOLTSNN_DRAM_ORG_HPP
#define VOLTSNN_DRAM_ORG_HPP

#include <compare>
#include <cstdint>
#include <string>

namespace voltsnn
{

/// DRAM hierarchy. Rows are counted per subarray; columns per row.
/// Defaults are a desk-scale slice of an LPDDR3-1600 4Gb part (2 MiB).
struct DramGeometry
{
  std::uint32_t channels = 1;
  std::uint32_t ranks = 1;         // per channel
  std::uint32_t chips = 1;         // per rank
  std::uint32_t banks = 8;         // per chip
  std::uint32_t subarrays = 16;    // per bank
  std::uint32_t rows = 128;        // per subarray
  std::uint32_t columns = 128;     // per row
  std::uint32_t bytes_per_column = 1;

  /// Throws InvalidValue if any count is zero.
  void validate() const;

  std::uint64_t bank_count() const noexcept { return std::uint64_t{channels} * ranks * chips * banks; }
  std::uint64_t subarray_count() const noexcept { return bank_count() * subarrays; }
  std::uint64_t column_count() const noexcept { return subarray_count() * rows * columns; }
  std::uint64_t bits_per_column() const noexcept { return std::uint64_t{bytes_per_column} * 8; }
  std::uint64_t bits_per_subarray() const noexcept { return std::uint64_t{rows} * columns * bits_per_column(); }
  std::uint64_t bits_per_bank() const noexcept { return bits_per_subarray() * subarrays; }
  std::uint64_t bytes_per_subarray() const noexcept { return std::uint64_t{rows} * columns * bytes_per_column; }

  bool operator==(const DramGeometry&) const = default;
};

struct DramAddress
{
  std::uint32_t channel = 0;
  std::uint32_t rank = 0;
  std::uint32_t chip = 0;
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
  std::uint32_t row = 0;
  std::uint32_t column = 0;

  auto operator<=>(const DramAddress&) const = default;
};

std::string to_string(const DramAddress& addr);

/// Total bytes: product of all counts times bytes_per_column.
std::uint64_t linear_capacity(const DramGeometry& geometry);

/// Throws AddressError naming the first out-of-bound dimension.
void validate_address(const DramGeometry& geometry, const DramAddress& addr);

/// Flat bank index over (channel, rank, chip, bank).
std::uint64_t bank_index(const DramGeometry& geometry, const DramAddress& addr) noexcept;
/// Flat subarray index over (channel, rank, chip, bank, subarray).
std::uint64_t subarray_index(const DramGeometry& geometry, const DramAddress& addr) noexcept;
/// Flat column index, hierarchy order channel-major down to column.
std::uint64_t column_index(const DramGeometry& geometry, const DramAddress& addr) noexcept;
DramAddress address_of_column(const DramGeometry& geometry, std::uint64_t column);

enum class RowCondition { Hit, Miss, Conflict };
std::string to_string(RowCondition condition);

/// Per-access energies at the nominal supply, nJ.
struct AccessEnergies
{
  double hit = 4.0;
  double miss = 7.0;
  double conflict = 10.0;

  bool operator==(const AccessEnergies&) const = default;
};

/// Timing parameters, ns. Held independent of the supply voltage.
struct DramTiming
{
  double t_rcd = 18.0;
  double t_ras = 42.0;
  double t_rp = 18.0;
  double t_burst = 10.0;

  bool operator==(const DramTiming&) const = default;
};

class VoltageConfig
{
public:
  static constexpr double kNominal = 1.35;
  static constexpr double kMinSupply = 1.025;

  /// Throws InvalidValue unless v_supply lies in [1.025, v_nominal], energies
  /// are strictly ordered hit < miss < conflict, and timings are positive.
  explicit VoltageConfig(double v_supply = kNominal, AccessEnergies energies = {}, DramTiming timing = {}, double energy_exponent = 2.0,
                         double v_nominal = kNominal, double write_energy_factor = 1.0);

  double v_supply() const noexcept { return v_supply_; }
  double v_nominal() const noexcept { return v_nominal_; }
  double energy_exponent() const noexcept { return energy_exponent_; }
  double write_energy_factor() const noexcept { return write_energy_factor_; }
  const AccessEnergies& energies() const noexcept { return energies_; }
  const DramTiming& timing() const noexcept { return timing_; }

  /// Same tables at a different supply.
  VoltageConfig at(double v_supply) const;

private:
  double v_supply_;
  AccessEnergies energies_;
  DramTiming timing_;
  double energy_exponent_;
  double v_nominal_;
  double write_energy_factor_;
};

/// (v_supply / v_nominal)^energy_exponent.
double energy_scale(const VoltageConfig& v) noexcept;

/// Base energy of the condition times energy_scale(v), nJ.
double access_energy(RowCondition condition, const VoltageConfig& v) noexcept;

} // namespace voltsnn

#endif
