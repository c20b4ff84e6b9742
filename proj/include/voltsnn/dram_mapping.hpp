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

#ifndef VOLTSNN_DRAM_MAPPING_HPP
#define VOLTSNN_DRAM_MAPPING_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voltsnn/dram_org.hpp"

namespace voltsnn
{

enum class MappingPolicy { EnforceSnn, Baseline };

/// Loop order used by the error-aware policy.
///  - Listing: channel > rank > chip > row > subarray > bank > column; every
///    column of a row is filled before moving to the next bank.
///  - Prose: channel > rank > chip > row > subarray > column > bank; each
///    column step walks across the safe banks (bank-interleaved).
enum class MappingVariant { Listing, Prose };

MappingPolicy parse_mapping_policy(std::string_view name);
MappingVariant parse_mapping_variant(std::string_view name);
std::string to_string(MappingPolicy policy);
std::string to_string(MappingVariant variant);

/// Where one weight byte is stored: a column address plus the byte slot
/// inside that column (always 0 when bytes_per_column == 1).
struct BytePlacement
{
  DramAddress address;
  std::uint32_t slot = 0;

  bool operator==(const BytePlacement&) const = default;
};

class PhysicalLayout
{
public:
  PhysicalLayout(DramGeometry geometry, MappingPolicy policy, std::vector<BytePlacement> placements, std::vector<std::uint64_t> safe_subarrays);

  const DramGeometry& geometry() const noexcept { return geometry_; }
  MappingPolicy policy() const noexcept { return policy_; }
  std::size_t size() const noexcept { return placements_.size(); }
  bool empty() const noexcept { return placements_.empty(); }
  const BytePlacement& operator[](std::size_t byte) const { return placements_[byte]; }
  std::span<const BytePlacement> placements() const noexcept { return placements_; }
  /// Flat subarray indices the policy was allowed to use, ascending.
  std::span<const std::uint64_t> safe_subarrays() const noexcept { return safe_subarrays_; }

  bool operator==(const PhysicalLayout&) const = default;

private:
  DramGeometry geometry_;
  MappingPolicy policy_;
  std::vector<BytePlacement> placements_;
  std::vector<std::uint64_t> safe_subarrays_;
};

/// Error-aware, row-buffer-friendly placement. `subarray_bers` is indexed by
/// flat subarray index; subarrays with BER > ber_th are never used.
/// Throws CapacityError when the safe subarrays cannot hold `data_bytes`.
PhysicalLayout map_enforcesnn(const DramGeometry& geometry, std::span<const double> subarray_bers, double ber_th, std::size_t data_bytes,
                              MappingVariant variant = MappingVariant::Listing);

/// Error-oblivious placement: consecutive columns and rows of bank 0, then
/// bank 1, ...; then the next chip, rank and channel.
PhysicalLayout map_baseline(const DramGeometry& geometry, std::size_t data_bytes);

enum class AccessOp { Read, Write };

struct Access
{
  DramAddress address;
  AccessOp op = AccessOp::Read;

  bool operator==(const Access&) const = default;
};

struct AccessTrace
{
  std::vector<Access> accesses;

  std::size_t size() const noexcept { return accesses.size(); }
  bool empty() const noexcept { return accesses.empty(); }
  bool operator==(const AccessTrace&) const = default;
};

/// sequential_read_all is repeated_epochs(1).
struct TracePattern
{
  std::uint32_t passes = 1;

  static TracePattern sequential_read_all() { return {1}; }
  static TracePattern repeated_epochs(std::uint32_t k) { return {k}; }
};

/// One read per column visit in layout order; consecutive bytes sharing a
/// column are coalesced into one access.
AccessTrace generate_trace(const PhysicalLayout& layout, TracePattern pattern = TracePattern::sequential_read_all());

/// CSV: byte_index,ch,ra,cp,ba,su,ro,co (plus slot when bytes_per_column > 1).
void write_layout_csv(std::ostream& out, const PhysicalLayout& layout);

/// CSV: index,ch,ra,cp,ba,su,ro,co,op  (op is R or W).
void write_trace_csv(std::ostream& out, const AccessTrace& trace);
/// Parses write_trace_csv output; '#' lines and the header are skipped.
/// Throws DataError on malformed rows.
AccessTrace read_trace_csv(std::istream& in);

} // namespace voltsnn

#endif
