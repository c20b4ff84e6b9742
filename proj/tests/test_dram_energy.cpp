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

#include <doctest.h>

#include <map>
#include <sstream>
#include <tuple>

#include "voltsnn/dram_energy.hpp"
#include "voltsnn/error.hpp"
#include "voltsnn/rng.hpp"

using namespace voltsnn;

namespace
{
DramAddress at(std::uint32_t bank, std::uint32_t row, std::uint32_t column = 0)
{
  DramAddress a;
  a.bank = bank;
  a.row = row;
  a.column = column;
  return a;
}

std::vector<RowCondition> classify_all(const DramGeometry& g, const std::vector<DramAddress>& addrs)
{
  RowBufferState state(g);
  std::vector<RowCondition> out;
  for (const auto& a : addrs)
    out.push_back(classify_access(state, a));
  return out;
}

// Naive reference: open row keyed by the full bank tuple.
std::vector<RowCondition> reference_classify(const std::vector<DramAddress>& addrs)
{
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t>, std::pair<std::uint32_t, std::uint32_t>> open;
  std::vector<RowCondition> out;
  for (const auto& a : addrs) {
    const auto key = std::make_tuple(a.channel, a.rank, a.chip, a.bank);
    const auto row = std::make_pair(a.subarray, a.row);
    auto it = open.find(key);
    if (it == open.end()) {
      out.push_back(RowCondition::Miss);
      open[key] = row;
    } else if (it->second == row) {
      out.push_back(RowCondition::Hit);
    } else {
      out.push_back(RowCondition::Conflict);
      it->second = row;
    }
  }
  return out;
}

const DramGeometry kTwoBanks{1, 1, 1, 2, 1, 4, 4, 1};
} // namespace

TEST_CASE("row buffer classification")
{
  using C = RowCondition;
  CHECK(classify_all(kTwoBanks, {at(0, 1), at(0, 1)}) == std::vector<C>{C::Miss, C::Hit});
  CHECK(classify_all(kTwoBanks, {at(0, 1), at(0, 2)}) == std::vector<C>{C::Miss, C::Conflict});
  CHECK(classify_all(kTwoBanks, {at(0, 1), at(1, 2)}) == std::vector<C>{C::Miss, C::Miss});
  CHECK(classify_all(kTwoBanks, {at(0, 1, 0), at(0, 1, 3), at(0, 2), at(0, 1)}) == std::vector<C>{C::Miss, C::Hit, C::Conflict, C::Conflict});

  // same row index in a different subarray is a different row
  const DramGeometry g{1, 1, 1, 1, 2, 2, 2, 1};
  DramAddress a, b;
  b.subarray = 1;
  CHECK(classify_all(g, {a, b}) == std::vector<C>{C::Miss, C::Conflict});
}

TEST_CASE("classification matches a naive replay on random traces")
{
  Rng rng = make_rng(17);
  const DramGeometry g{2, 2, 1, 4, 2, 4, 4, 1};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<DramAddress> addrs(64);
    for (auto& a : addrs)
      a = address_of_column(g, rng() % g.column_count());
    REQUIRE(classify_all(g, addrs) == reference_classify(addrs));
  }
}

TEST_CASE("simulate_trace accumulation")
{
  const VoltageConfig v(1.35);
  const auto& t = v.timing();
  CHECK(simulate_trace(AccessTrace{}, v, kTwoBanks) == EnergyReport{});

  RowBufferState warm(kTwoBanks);
  warm.access(at(0, 0));
  AccessTrace hits;
  for (std::uint32_t c = 0; c < 4; ++c)
    hits.accesses.push_back({at(0, 0, c), AccessOp::Read});
  const auto r = simulate_trace(hits, v, warm);
  CHECK(r.counts.hits == 4);
  CHECK(r.energy_nj == doctest::Approx(4 * v.energies().hit));
  CHECK(r.latency_ns == doctest::Approx(4 * t.t_burst));

  const auto low = simulate_trace(hits, v.at(1.025), warm);
  CHECK(low.energy_nj / r.energy_nj == doctest::Approx(energy_scale(v.at(1.025))).epsilon(1e-12));
  CHECK(low.latency_ns == r.latency_ns);
}

TEST_CASE("latency terms and multi-bank overlap")
{
  const VoltageConfig v(1.35);
  const auto& t = v.timing();
  AccessTrace same_bank{{{at(0, 0), AccessOp::Read}, {at(0, 1), AccessOp::Read}}};
  CHECK(simulate_trace(same_bank, v, kTwoBanks).latency_ns == doctest::Approx((t.t_rcd + t.t_burst) + (t.t_rp + t.t_rcd + t.t_burst)));

  // miss in bank 1 right after bank 0: the activate hides behind bank 0's burst
  AccessTrace two_banks{{{at(0, 0), AccessOp::Read}, {at(1, 0), AccessOp::Read}}};
  CHECK(simulate_trace(two_banks, v, kTwoBanks).latency_ns == doctest::Approx((t.t_rcd + t.t_burst) + std::max(t.t_burst, t.t_rcd)));

  AccessTrace with_write{{{at(0, 0), AccessOp::Write}}};
  const VoltageConfig costly_writes(1.35, {}, {}, 2.0, 1.35, 1.5);
  CHECK(simulate_trace(with_write, costly_writes, kTwoBanks).energy_nj == doctest::Approx(1.5 * v.energies().miss));
}

TEST_CASE("invalid addresses report the trace position")
{
  AccessTrace bad{{{at(0, 0), AccessOp::Read}, {at(5, 0), AccessOp::Read}}};
  try {
    simulate_trace(bad, VoltageConfig(), kTwoBanks);
    FAIL("expected AddressError");
  } catch (const AddressError& e) {
    CHECK(e.dimension() == "bank");
    CHECK(std::string(e.what()).find("trace position 1") != std::string::npos);
  }
}

TEST_CASE("compare_reports")
{
  const DramGeometry g{1, 1, 1, 2, 1, 8, 16, 1};
  const auto trace = generate_trace(map_baseline(g, 64));
  const auto r = simulate_trace(trace, VoltageConfig(), g);
  const auto same = compare_reports(r, r);
  CHECK(same.energy_saving == 0.0);
  CHECK(same.speedup == 1.0);
  CHECK_THROWS_AS(compare_reports(r, EnergyReport{}), InvalidValue);
  CHECK_THROWS_AS(compare_reports(EnergyReport{}, r), InvalidValue);
}

TEST_CASE("byte ratio and voltage scaling compose")
{
  const DramGeometry g{1, 1, 1, 8, 16, 128, 128, 1};
  const std::size_t n_weights = 784 * 100;
  const std::vector<double> safe(g.subarray_count(), 0.0);
  const VoltageConfig v(1.35);
  const auto fp32 = simulate_trace(generate_trace(map_baseline(g, n_weights * 4)), v, g);
  const auto fxp8 = simulate_trace(generate_trace(map_baseline(g, n_weights)), v, g);
  CHECK(compare_reports(fp32, fxp8).energy_saving == doctest::Approx(0.75).epsilon(0.005));

  const auto fxp8_low = simulate_trace(generate_trace(map_enforcesnn(g, safe, 1e-2, n_weights)), v.at(1.025), g);
  const double expected = 1.0 - 0.25 * energy_scale(v.at(1.025));
  CHECK(compare_reports(fp32, fxp8_low).energy_saving == doctest::Approx(expected).epsilon(0.005));
  CHECK(expected == doctest::Approx(0.8558).epsilon(2e-4));

  // pure streaming, same policy: 4x bytes, 4x time
  CHECK(compare_reports(fp32, fxp8).speedup == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("streaming one row hits (n_co - 1) / n_co")
{
  const DramGeometry g{1, 1, 1, 1, 1, 1, 64, 1};
  const auto r = simulate_trace(generate_trace(map_baseline(g, 64)), VoltageConfig(), g);
  CHECK(r.hit_rate() == doctest::Approx(63.0 / 64.0));
  CHECK(r.counts.misses == 1);
}

TEST_CASE("energy is non-decreasing in supply voltage and replay is deterministic")
{
  const DramGeometry g{1, 1, 1, 4, 2, 8, 16, 1};
  Rng rng = make_rng(23);
  AccessTrace trace;
  for (int i = 0; i < 2000; ++i)
    trace.accesses.push_back({address_of_column(g, rng() % g.column_count()), AccessOp::Read});
  double prev = 0.0;
  for (double v = 1.025; v <= 1.35; v += 0.025) {
    const auto r = simulate_trace(trace, VoltageConfig(v), g);
    CHECK(r.energy_nj >= prev);
    prev = r.energy_nj;
    CHECK(simulate_trace(trace, VoltageConfig(v), g) == r);
    CHECK(r.counts.total() == trace.size());
  }
}

TEST_CASE("error-aware layout never loses row-buffer hits to the baseline")
{
  Rng rng = make_rng(29);
  auto pick = [&rng](std::uint32_t lo, std::uint32_t hi) { return lo + static_cast<std::uint32_t>(rng() % (hi - lo + 1)); };
  for (int i = 0; i < 100; ++i) {
    const DramGeometry g{1, pick(1, 2), pick(1, 2), pick(2, 8), pick(1, 4), pick(1, 8), pick(2, 32), 1};
    const std::vector<double> safe(g.subarray_count(), 0.0);
    const auto bytes = 1 + static_cast<std::size_t>(rng() % linear_capacity(g));
    const auto base = simulate_trace(generate_trace(map_baseline(g, bytes)), VoltageConfig(), g);
    const auto ours = simulate_trace(generate_trace(map_enforcesnn(g, safe, 0.0, bytes)), VoltageConfig(), g);
    CHECK(ours.hit_rate() >= base.hit_rate());

    // prose spreads a partial stripe over banks, so compare on whole stripes
    const std::size_t stripe = std::size_t{g.banks} * g.columns;
    const std::size_t whole = std::max<std::size_t>(1, bytes / stripe) * stripe;
    const auto prose = simulate_trace(generate_trace(map_enforcesnn(g, safe, 0.0, whole, MappingVariant::Prose)), VoltageConfig(), g);
    CHECK(prose.hit_rate() >= simulate_trace(generate_trace(map_baseline(g, whole)), VoltageConfig(), g).hit_rate());
  }
}

TEST_CASE("energy report serialization")
{
  const DramGeometry g{1, 1, 1, 2, 1, 8, 16, 1};
  const auto r = simulate_trace(generate_trace(map_baseline(g, 100)), VoltageConfig(1.2), g);
  CHECK(energy_report_from_json(to_json(r)) == r);
  std::ostringstream csv;
  write_energy_csv_header(csv);
  write_energy_csv_row(csv, "fxp8", r);
  CHECK(csv.str().starts_with("label,v_supply,hits"));
  CHECK(csv.str().find("\nfxp8,1.2,") != std::string::npos);
}
