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

#ifndef VOLTSNN_DRAM_ERROR_HPP
#define VOLTSNN_DRAM_ERROR_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "voltsnn/dram_mapping.hpp"
#include "voltsnn/dram_org.hpp"
#include "voltsnn/fixedpoint.hpp"

namespace voltsnn
{

/// Uniform-random weak cells (Error Model-0). Each bit-cell of every bank is
/// weak independently with probability `weak_fraction`; a weak cell flips
/// with probability `flip_probability` per injection. Only weak coordinates
/// are stored, as global bit indices:
///   column_index(addr) * bits_per_column + bit_in_column.
class WeakCellMap
{
public:
  /// Throws InvalidValue if either probability lies outside [0, 1].
  static WeakCellMap generate(const DramGeometry& geometry, double weak_fraction, double flip_probability, std::uint64_t seed);
  /// Explicit weak cells (global bit indices), e.g. replayed from a
  /// characterization. weak_fraction becomes count / total bit-cells.
  static WeakCellMap from_cells(const DramGeometry& geometry, std::vector<std::uint64_t> cells, double flip_probability);

  const DramGeometry& geometry() const noexcept { return geometry_; }
  double weak_fraction() const noexcept { return weak_fraction_; }
  double flip_probability() const noexcept { return flip_probability_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double effective_ber() const noexcept { return weak_fraction_ * flip_probability_; }

  /// Sorted global bit indices of every weak cell.
  std::span<const std::uint64_t> cells() const noexcept { return cells_; }
  std::size_t weak_cells_in_subarray(std::uint64_t flat_subarray) const;

private:
  WeakCellMap(DramGeometry g, double f, double p, std::uint64_t seed, std::vector<std::uint64_t> cells)
      : geometry_(g), weak_fraction_(f), flip_probability_(p), seed_(seed), cells_(std::move(cells))
  {
  }

  DramGeometry geometry_;
  double weak_fraction_;
  double flip_probability_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> cells_;
};

/// (weak cells in subarray / bit-cells in subarray) * P. Only the channel..subarray
/// fields of `prefix` are read; throws AddressError if they are out of range.
double subarray_ber(const WeakCellMap& map, const DramAddress& prefix);
/// subarray_ber for every subarray, indexed by flat subarray index.
std::vector<double> subarray_bers(const WeakCellMap& map);

/// Splits a target BER into (F, P) with P fixed: F = BER / P. When BER > P
/// the split degenerates to F = 1, P = BER.
struct FlipPolicy
{
  double flip_probability = 0.5;

  struct Split
  {
    double weak_fraction;
    double flip_probability;
  };
  Split split(double ber) const;
};

struct MaskedBit
{
  DramAddress address;
  std::uint32_t bit = 0;        // bit within the column
  std::size_t byte_index = 0;   // layout byte holding the bit
  std::uint32_t bit_in_byte = 0;

  bool operator==(const MaskedBit&) const = default;
};

/// Bits to flip for one injection event. Every entry is a weak cell that
/// holds data under the layout.
struct ErrorMask
{
  std::vector<MaskedBit> flips;

  std::size_t size() const noexcept { return flips.size(); }
  bool operator==(const ErrorMask&) const = default;
};

/// One Bernoulli(P) draw per weak cell that stores a layout byte, in
/// ascending cell order. Throws InvalidValue if geometries differ.
ErrorMask sample_error_mask(const WeakCellMap& map, const PhysicalLayout& layout, std::uint64_t seed);

/// XORs the mask into the tensor's stored bytes. Element i occupies layout
/// bytes [i*W, (i+1)*W), least significant byte first.
QuantizedTensor apply_error_mask(QuantizedTensor tensor, const PhysicalLayout& layout, const ErrorMask& mask);

/// sample_error_mask + apply_error_mask. Throws InvalidValue when the layout
/// size differs from tensor.byte_size().
QuantizedTensor inject_errors(const QuantizedTensor& tensor, const PhysicalLayout& layout, const WeakCellMap& map, std::uint64_t seed);

/// One line per flipped bit: ch,ra,cp,ba,su,ro,co,bit.
void write_error_mask(std::ostream& out, const ErrorMask& mask);

} // namespace voltsnn

#endif
