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

#include "voltsnn/dram_error.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <unordered_map>

#include "voltsnn/error.hpp"
#include "voltsnn/rng.hpp"

namespace voltsnn
{

namespace
{
void check_probability(double p, const char* what)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidValue(std::string(what) + " " + std::to_string(p) + " outside [0, 1]");
}
} // namespace

WeakCellMap WeakCellMap::generate(const DramGeometry& g, double weak_fraction, double flip_probability, std::uint64_t seed)
{
  g.validate();
  check_probability(weak_fraction, "weak-cell fraction");
  check_probability(flip_probability, "flip probability");

  std::vector<std::uint64_t> cells;
  const std::uint64_t per_bank = g.bits_per_bank();
  if (weak_fraction > 0.0)
    cells.reserve(static_cast<std::size_t>(weak_fraction * static_cast<double>(per_bank * g.bank_count()) * 1.01) + 16);

  for (std::uint64_t bank = 0; bank < g.bank_count() && weak_fraction > 0.0; ++bank) {
    const std::uint64_t base = bank * per_bank;
    if (weak_fraction >= 1.0) {
      for (std::uint64_t b = 0; b < per_bank; ++b)
        cells.push_back(base + b);
      continue;
    }
    // Gaps between independent Bernoulli(F) successes are geometric.
    auto rng = make_rng(seed, {0x7765616bULL, bank});
    std::geometric_distribution<std::uint64_t> gap(weak_fraction);
    for (std::uint64_t pos = gap(rng); pos < per_bank; pos += 1 + gap(rng))
      cells.push_back(base + pos);
  }
  return WeakCellMap(g, weak_fraction, flip_probability, seed, std::move(cells));
}

WeakCellMap WeakCellMap::from_cells(const DramGeometry& g, std::vector<std::uint64_t> cells, double flip_probability)
{
  g.validate();
  check_probability(flip_probability, "flip probability");
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  const std::uint64_t total = g.bits_per_bank() * g.bank_count();
  if (!cells.empty() && cells.back() >= total)
    throw InvalidValue("weak cell " + std::to_string(cells.back()) + " outside the " + std::to_string(total) + "-bit device");
  const double fraction = static_cast<double>(cells.size()) / static_cast<double>(total);
  return WeakCellMap(g, fraction, flip_probability, 0, std::move(cells));
}

std::size_t WeakCellMap::weak_cells_in_subarray(std::uint64_t flat_subarray) const
{
  const auto span = geometry_.bits_per_subarray();
  const auto lo = std::lower_bound(cells_.begin(), cells_.end(), flat_subarray * span);
  const auto hi = std::lower_bound(lo, cells_.end(), (flat_subarray + 1) * span);
  return static_cast<std::size_t>(hi - lo);
}

double subarray_ber(const WeakCellMap& map, const DramAddress& prefix)
{
  DramAddress a = prefix;
  a.row = 0;
  a.column = 0;
  validate_address(map.geometry(), a);
  const auto& g = map.geometry();
  const auto weak = map.weak_cells_in_subarray(subarray_index(g, a));
  return static_cast<double>(weak) / static_cast<double>(g.bits_per_subarray()) * map.flip_probability();
}

std::vector<double> subarray_bers(const WeakCellMap& map)
{
  const auto& g = map.geometry();
  std::vector<double> out(g.subarray_count(), 0.0);
  const auto span = g.bits_per_subarray();
  for (auto cell : map.cells())
    out[cell / span] += 1.0;
  for (auto& v : out)
    v = v / static_cast<double>(span) * map.flip_probability();
  return out;
}

FlipPolicy::Split FlipPolicy::split(double ber) const
{
  check_probability(ber, "BER");
  if (!(flip_probability > 0.0 && flip_probability <= 1.0))
    throw InvalidValue("flip probability must lie in (0, 1]");
  if (ber > flip_probability)
    return {1.0, ber};
  return {ber / flip_probability, flip_probability};
}

ErrorMask sample_error_mask(const WeakCellMap& map, const PhysicalLayout& layout, std::uint64_t seed)
{
  const auto& g = layout.geometry();
  if (!(map.geometry() == g))
    throw InvalidValue("weak-cell map and layout use different DRAM geometries");

  // global byte address -> layout byte index
  std::unordered_map<std::uint64_t, std::size_t> stored;
  stored.reserve(layout.size());
  const auto placements = layout.placements();
  for (std::size_t i = 0; i < placements.size(); ++i)
    stored.emplace(column_index(g, placements[i].address) * g.bytes_per_column + placements[i].slot, i);

  ErrorMask mask;
  auto rng = make_rng(seed, {0x6d61736bULL});
  const double p = map.flip_probability();
  for (auto cell : map.cells()) {
    const auto it = stored.find(cell / 8);
    if (it == stored.end())
      continue;
    if (!bernoulli(rng, p))
      continue;
    const auto bit = static_cast<std::uint32_t>(cell % g.bits_per_column());
    mask.flips.push_back({placements[it->second].address, bit, it->second, bit % 8});
  }
  return mask;
}

QuantizedTensor apply_error_mask(QuantizedTensor tensor, const PhysicalLayout& layout, const ErrorMask& mask)
{
  if (layout.size() != tensor.byte_size())
    throw InvalidValue("layout holds " + std::to_string(layout.size()) + " bytes but the tensor occupies " + std::to_string(tensor.byte_size()));
  const auto width = static_cast<std::size_t>(tensor.format.bytes_per_element());
  const auto bits = static_cast<std::uint32_t>(tensor.format.bit_width());
  for (const auto& flip : mask.flips) {
    const auto element = flip.byte_index / width;
    const auto bit = static_cast<std::uint32_t>(flip.byte_index % width) * 8 + flip.bit_in_byte;
    if (bit < bits) // padding cells carry no data
      tensor.words[element] ^= std::uint32_t{1} << bit;
  }
  return tensor;
}

QuantizedTensor inject_errors(const QuantizedTensor& tensor, const PhysicalLayout& layout, const WeakCellMap& map, std::uint64_t seed)
{
  if (layout.size() != tensor.byte_size())
    throw InvalidValue("layout holds " + std::to_string(layout.size()) + " bytes but the tensor occupies " + std::to_string(tensor.byte_size()));
  return apply_error_mask(tensor, layout, sample_error_mask(map, layout, seed));
}

void write_error_mask(std::ostream& out, const ErrorMask& mask)
{
  out << "ch,ra,cp,ba,su,ro,co,bit\n";
  for (const auto& f : mask.flips) {
    const auto& a = f.address;
    out << a.channel << ',' << a.rank << ',' << a.chip << ',' << a.bank << ',' << a.subarray << ',' << a.row << ',' << a.column << ',' << f.bit << '\n';
  }
}

} // namespace voltsnn
