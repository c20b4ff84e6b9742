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

#include "voltsnn/dram_energy.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "voltsnn/error.hpp"

namespace voltsnn
{

RowBufferState::RowBufferState(const DramGeometry& geometry) : geometry_(geometry), open_(geometry.bank_count(), kClosed) {}

std::optional<std::uint64_t> RowBufferState::open_row(std::uint64_t flat_bank) const
{
  const auto v = open_.at(flat_bank);
  if (v == kClosed)
    return std::nullopt;
  return v;
}

RowCondition RowBufferState::access(const DramAddress& addr)
{
  auto& slot = open_[bank_index(geometry_, addr)];
  const std::uint64_t row = std::uint64_t{addr.subarray} * geometry_.rows + addr.row;
  if (slot == row)
    return RowCondition::Hit;
  const auto condition = slot == kClosed ? RowCondition::Miss : RowCondition::Conflict;
  slot = row;
  return condition;
}

RowCondition classify_access(RowBufferState& state, const DramAddress& addr) { return state.access(addr); }

EnergyReport simulate_trace(const AccessTrace& trace, const VoltageConfig& voltage, const DramGeometry& geometry)
{
  geometry.validate();
  return simulate_trace(trace, voltage, RowBufferState(geometry));
}

EnergyReport simulate_trace(const AccessTrace& trace, const VoltageConfig& voltage, RowBufferState state)
{
  const DramGeometry geometry = state.geometry();
  EnergyReport report;
  report.v_supply = voltage.v_supply();
  const auto& t = voltage.timing();
  const double e_hit = access_energy(RowCondition::Hit, voltage);
  const double e_miss = access_energy(RowCondition::Miss, voltage);
  const double e_conflict = access_energy(RowCondition::Conflict, voltage);

  std::optional<std::uint64_t> previous_bank;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& [addr, op] = trace.accesses[i];
    try {
      validate_address(geometry, addr);
    } catch (const AddressError& e) {
      throw AddressError(e.dimension(), e.index(), e.bound(), "trace position " + std::to_string(i));
    }
    const auto condition = state.access(addr);
    double energy = 0.0;
    double command = 0.0;
    switch (condition) {
    case RowCondition::Hit:
      ++report.counts.hits;
      energy = e_hit;
      break;
    case RowCondition::Miss:
      ++report.counts.misses;
      energy = e_miss;
      command = t.t_rcd;
      break;
    case RowCondition::Conflict:
      ++report.counts.conflicts;
      energy = e_conflict;
      command = t.t_rp + t.t_rcd;
      break;
    }
    if (op == AccessOp::Write)
      energy *= voltage.write_energy_factor();
    report.energy_nj += energy;

    const auto bank = bank_index(geometry, addr);
    if (previous_bank && *previous_bank != bank)
      report.latency_ns += std::max(t.t_burst, command);
    else
      report.latency_ns += command + t.t_burst;
    previous_bank = bank;
  }
  report.bytes = static_cast<std::uint64_t>(trace.size()) * geometry.bytes_per_column;
  report.throughput_bytes_per_s = report.latency_ns > 0.0 ? static_cast<double>(report.bytes) / (report.latency_ns * 1e-9) : 0.0;
  return report;
}

ReportComparison compare_reports(const EnergyReport& baseline, const EnergyReport& improved)
{
  if (!(baseline.energy_nj > 0.0 && improved.energy_nj > 0.0))
    throw InvalidValue("cannot compare reports with zero energy");
  if (!(baseline.latency_ns > 0.0 && improved.latency_ns > 0.0))
    throw InvalidValue("cannot compare reports with zero latency");
  return {1.0 - improved.energy_nj / baseline.energy_nj, baseline.latency_ns / improved.latency_ns};
}

nlohmann::json to_json(const EnergyReport& r)
{
  return {{"hits", r.counts.hits},
          {"misses", r.counts.misses},
          {"conflicts", r.counts.conflicts},
          {"energy_nj", r.energy_nj},
          {"latency_ns", r.latency_ns},
          {"bytes", r.bytes},
          {"throughput_bytes_per_s", r.throughput_bytes_per_s},
          {"hit_rate", r.hit_rate()},
          {"v_supply", r.v_supply}};
}

EnergyReport energy_report_from_json(const nlohmann::json& j)
{
  EnergyReport r;
  r.counts.hits = j.at("hits").get<std::uint64_t>();
  r.counts.misses = j.at("misses").get<std::uint64_t>();
  r.counts.conflicts = j.at("conflicts").get<std::uint64_t>();
  r.energy_nj = j.at("energy_nj").get<double>();
  r.latency_ns = j.at("latency_ns").get<double>();
  r.bytes = j.at("bytes").get<std::uint64_t>();
  r.throughput_bytes_per_s = j.at("throughput_bytes_per_s").get<double>();
  r.v_supply = j.at("v_supply").get<double>();
  return r;
}

void write_energy_csv_header(std::ostream& out)
{
  out << "label,v_supply,hits,misses,conflicts,energy_nj,latency_ns,bytes,throughput_bytes_per_s\n";
}

void write_energy_csv_row(std::ostream& out, const std::string& label, const EnergyReport& r)
{
  out << label << ',' << std::setprecision(10) << r.v_supply << ',' << r.counts.hits << ',' << r.counts.misses << ',' << r.counts.conflicts << ','
      << r.energy_nj << ',' << r.latency_ns << ',' << r.bytes << ',' << r.throughput_bytes_per_s << '\n';
}

} // namespace voltsnn
