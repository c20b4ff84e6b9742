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

#ifndef VOLTSNN_DRAM_ENERGY_HPP
#define VOLTSNN_DRAM_ENERGY_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "voltsnn/dram_mapping.hpp"
#include "voltsnn/dram_org.hpp"

namespace voltsnn
{

/// Open row per (channel, rank, chip, bank). A row is identified by its
/// subarray and row-within-subarray.
class RowBufferState
{
public:
  explicit RowBufferState(const DramGeometry& geometry);

  const DramGeometry& geometry() const noexcept { return geometry_; }
  /// Open row id (subarray * rows + row) of a flat bank, if any.
  std::optional<std::uint64_t> open_row(std::uint64_t flat_bank) const;

  /// hit if the addressed row is open; miss if the bank is idle; conflict if
  /// another row is open. Leaves the addressed row open.
  RowCondition access(const DramAddress& addr);

private:
  static constexpr std::uint64_t kClosed = ~std::uint64_t{0};

  DramGeometry geometry_;
  std::vector<std::uint64_t> open_;
};

/// Free-function form; `addr` must be valid for the state's geometry.
RowCondition classify_access(RowBufferState& state, const DramAddress& addr);

struct ConditionCounts
{
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t conflicts = 0;

  std::uint64_t total() const noexcept { return hits + misses + conflicts; }
  bool operator==(const ConditionCounts&) const = default;
};

struct EnergyReport
{
  ConditionCounts counts;
  double energy_nj = 0.0;
  double latency_ns = 0.0;
  std::uint64_t bytes = 0;
  double throughput_bytes_per_s = 0.0;
  double v_supply = VoltageConfig::kNominal;

  double hit_rate() const noexcept
  {
    return counts.total() == 0 ? 0.0 : static_cast<double>(counts.hits) / static_cast<double>(counts.total());
  }
  bool operator==(const EnergyReport&) const = default;
};

/// Replays the trace through a cold row-buffer state.
///
/// Latency per access is the command time plus one burst: hit 0, miss t_RCD,
/// conflict t_RP + t_RCD. When the previous access went to a different bank
/// the command overlaps that access's burst (multi-bank burst), leaving
/// max(t_burst, command) exposed. Throws AddressError (with the trace
/// position) on an invalid address.
EnergyReport simulate_trace(const AccessTrace& trace, const VoltageConfig& voltage, const DramGeometry& geometry);
/// Same, starting from `state` (e.g. rows left open by an earlier trace).
EnergyReport simulate_trace(const AccessTrace& trace, const VoltageConfig& voltage, RowBufferState state);

struct ReportComparison
{
  double energy_saving = 0.0; // 1 - E_improved / E_baseline
  double speedup = 1.0;       // latency_baseline / latency_improved
};

/// Throws InvalidValue if either report has zero energy or latency.
ReportComparison compare_reports(const EnergyReport& baseline, const EnergyReport& improved);

nlohmann::json to_json(const EnergyReport& report);
EnergyReport energy_report_from_json(const nlohmann::json& j);
void write_energy_csv_header(std::ostream& out);
/// One row: label,v_supply,hits,misses,conflicts,energy_nj,latency_ns,bytes,throughput_bytes_per_s
void write_energy_csv_row(std::ostream& out, const std::string& label, const EnergyReport& report);

} // namespace voltsnn

#endif
