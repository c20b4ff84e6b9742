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

#include "voltsnn/dram_mapping.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "voltsnn/error.hpp"

namespace voltsnn
{

MappingPolicy parse_mapping_policy(std::string_view name)
{
  if (name == "enforcesnn")
    return MappingPolicy::EnforceSnn;
  if (name == "baseline")
    return MappingPolicy::Baseline;
  throw InvalidValue("unknown mapping policy '" + std::string(name) + "' (expected enforcesnn or baseline)");
}

MappingVariant parse_mapping_variant(std::string_view name)
{
  if (name == "listing")
    return MappingVariant::Listing;
  if (name == "prose")
    return MappingVariant::Prose;
  throw InvalidValue("unknown mapping variant '" + std::string(name) + "' (expected listing or prose)");
}

std::string to_string(MappingPolicy policy) { return policy == MappingPolicy::EnforceSnn ? "enforcesnn" : "baseline"; }
std::string to_string(MappingVariant variant) { return variant == MappingVariant::Listing ? "listing" : "prose"; }

PhysicalLayout::PhysicalLayout(DramGeometry geometry, MappingPolicy policy, std::vector<BytePlacement> placements,
                               std::vector<std::uint64_t> safe_subarrays)
    : geometry_(geometry), policy_(policy), placements_(std::move(placements)), safe_subarrays_(std::move(safe_subarrays))
{
}

namespace
{
// Appends bytes to one column; returns false once `total` bytes are placed.
class Placer
{
public:
  Placer(const DramGeometry& g, std::size_t total) : g_(g), total_(total) { out_.reserve(total); }

  bool done() const noexcept { return out_.size() >= total_; }

  void fill_column(const DramAddress& addr)
  {
    for (std::uint32_t slot = 0; slot < g_.bytes_per_column && !done(); ++slot)
      out_.push_back({addr, slot});
  }

  std::vector<BytePlacement> take() { return std::move(out_); }

private:
  const DramGeometry& g_;
  std::size_t total_;
  std::vector<BytePlacement> out_;
};
} // namespace

PhysicalLayout map_enforcesnn(const DramGeometry& g, std::span<const double> subarray_bers, double ber_th, std::size_t data_bytes,
                              MappingVariant variant)
{
  g.validate();
  if (subarray_bers.size() != g.subarray_count())
    throw InvalidValue("subarray BER table has " + std::to_string(subarray_bers.size()) + " entries, geometry has " +
                       std::to_string(g.subarray_count()) + " subarrays");

  std::vector<std::uint64_t> safe;
  std::vector<char> is_safe(subarray_bers.size(), 0);
  for (std::size_t s = 0; s < subarray_bers.size(); ++s) {
    if (subarray_bers[s] <= ber_th) {
      safe.push_back(s);
      is_safe[s] = 1;
    }
  }
  const std::uint64_t available = safe.size() * g.bytes_per_subarray();
  if (data_bytes > available)
    throw CapacityError(data_bytes, available);

  Placer placer(g, data_bytes);
  DramAddress a;
  for (a.channel = 0; a.channel < g.channels; ++a.channel) {
    for (a.rank = 0; a.rank < g.ranks; ++a.rank) {
      for (a.chip = 0; a.chip < g.chips; ++a.chip) {
        for (a.row = 0; a.row < g.rows; ++a.row) {
          for (a.subarray = 0; a.subarray < g.subarrays; ++a.subarray) {
            if (variant == MappingVariant::Listing) {
              for (a.bank = 0; a.bank < g.banks; ++a.bank) {
                if (!is_safe[subarray_index(g, a)])
                  continue;
                for (a.column = 0; a.column < g.columns; ++a.column) {
                  placer.fill_column(a);
                  if (placer.done())
                    return PhysicalLayout(g, MappingPolicy::EnforceSnn, placer.take(), std::move(safe));
                }
              }
            } else {
              for (a.column = 0; a.column < g.columns; ++a.column) {
                for (a.bank = 0; a.bank < g.banks; ++a.bank) {
                  if (!is_safe[subarray_index(g, a)])
                    continue;
                  placer.fill_column(a);
                  if (placer.done())
                    return PhysicalLayout(g, MappingPolicy::EnforceSnn, placer.take(), std::move(safe));
                }
              }
            }
          }
        }
      }
    }
  }
  return PhysicalLayout(g, MappingPolicy::EnforceSnn, placer.take(), std::move(safe));
}

PhysicalLayout map_baseline(const DramGeometry& g, std::size_t data_bytes)
{
  g.validate();
  const auto capacity = linear_capacity(g);
  if (data_bytes > capacity)
    throw CapacityError(data_bytes, capacity);

  std::vector<std::uint64_t> all(g.subarray_count());
  for (std::uint64_t s = 0; s < all.size(); ++s)
    all[s] = s;

  // Flat column order already runs column > row > subarray > bank > chip > rank > channel.
  Placer placer(g, data_bytes);
  for (std::uint64_t c = 0; !placer.done(); ++c)
    placer.fill_column(address_of_column(g, c));
  return PhysicalLayout(g, MappingPolicy::Baseline, placer.take(), std::move(all));
}

AccessTrace generate_trace(const PhysicalLayout& layout, TracePattern pattern)
{
  AccessTrace once;
  const auto placements = layout.placements();
  for (std::size_t i = 0; i < placements.size(); ++i) {
    if (i > 0 && placements[i].address == placements[i - 1].address)
      continue;
    once.accesses.push_back({placements[i].address, AccessOp::Read});
  }
  AccessTrace trace;
  trace.accesses.reserve(once.size() * pattern.passes);
  for (std::uint32_t p = 0; p < pattern.passes; ++p)
    trace.accesses.insert(trace.accesses.end(), once.accesses.begin(), once.accesses.end());
  return trace;
}

void write_layout_csv(std::ostream& out, const PhysicalLayout& layout)
{
  const bool slots = layout.geometry().bytes_per_column > 1;
  out << "byte_index,ch,ra,cp,ba,su,ro,co" << (slots ? ",slot" : "") << '\n';
  const auto placements = layout.placements();
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const auto& a = placements[i].address;
    out << i << ',' << a.channel << ',' << a.rank << ',' << a.chip << ',' << a.bank << ',' << a.subarray << ',' << a.row << ',' << a.column;
    if (slots)
      out << ',' << placements[i].slot;
    out << '\n';
  }
}

void write_trace_csv(std::ostream& out, const AccessTrace& trace)
{
  out << "index,ch,ra,cp,ba,su,ro,co,op\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& [a, op] = trace.accesses[i];
    out << i << ',' << a.channel << ',' << a.rank << ',' << a.chip << ',' << a.bank << ',' << a.subarray << ',' << a.row << ',' << a.column << ','
        << (op == AccessOp::Read ? 'R' : 'W') << '\n';
  }
}

AccessTrace read_trace_csv(std::istream& in)
{
  AccessTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.starts_with("index"))
      continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ','))
      fields.push_back(field);
    if (fields.size() != 9)
      throw DataError("trace CSV line " + std::to_string(line_no) + ": expected 9 fields, got " + std::to_string(fields.size()));
    try {
      Access acc;
      std::uint32_t* dims[] = {&acc.address.channel, &acc.address.rank,     &acc.address.chip,  &acc.address.bank,
                               &acc.address.subarray, &acc.address.row, &acc.address.column};
      for (int d = 0; d < 7; ++d)
        *dims[d] = static_cast<std::uint32_t>(std::stoul(fields[1 + d]));
      if (fields[8] == "R")
        acc.op = AccessOp::Read;
      else if (fields[8] == "W")
        acc.op = AccessOp::Write;
      else
        throw DataError("bad op");
      trace.accesses.push_back(acc);
    } catch (const std::exception&) {
      throw DataError("trace CSV line " + std::to_string(line_no) + ": malformed row '" + line + "'");
    }
  }
  return trace;
}

} // namespace voltsnn
