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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "voltsnn/commands.hpp"
#include "voltsnn/dram_energy.hpp"
#include "voltsnn/dram_error.hpp"
#include "voltsnn/error.hpp"
#include "voltsnn/fat.hpp"
#include "voltsnn/fixedpoint.hpp"
#include "voltsnn/selection.hpp"

using namespace voltsnn;
namespace fs = std::filesystem;

namespace
{
struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const DramGeometry kGeometry{}; // 8 banks x 16 subarrays x 128 rows x 128 columns
constexpr std::size_t kWeights = 784 * 100;

EnergyReport stream(const WeightFormat& format, MappingPolicy policy, double v)
{
  const std::size_t bytes = kWeights * static_cast<std::size_t>(format.bytes_per_element());
  PhysicalLayout layout = policy == MappingPolicy::Baseline ? map_baseline(kGeometry, bytes) : [&] {
    const auto split = FlipPolicy{0.5}.split(1e-2);
    const auto map = WeakCellMap::generate(kGeometry, split.weak_fraction, split.flip_probability, 2026);
    return map_enforcesnn(kGeometry, subarray_bers(map), 1e-2, bytes);
  }();
  return simulate_trace(generate_trace(layout), VoltageConfig(v), kGeometry);
}

const WeightFormat kFp32 = WeightFormat::fp32();
const WeightFormat kFxp8 = WeightFormat::parse("fxp8_signed_q1_6");

Outcome c1()
{
  const double cut = 1.0 - access_energy(RowCondition::Hit, VoltageConfig(1.025)) / access_energy(RowCondition::Hit, VoltageConfig(1.35));
  bool same = true;
  for (auto cond : {RowCondition::Miss, RowCondition::Conflict})
    same = same && std::abs(1.0 - access_energy(cond, VoltageConfig(1.025)) / access_energy(cond, VoltageConfig(1.35)) - cut) < 1e-12;
  return {same && std::abs(cut - 0.423) <= 0.001, fmt("reduction %.4f%% (target 42.3 +/- 0.1)", 100 * cut)};
}

Outcome c2()
{
  const auto s = compare_reports(stream(kFp32, MappingPolicy::Baseline, 1.35), stream(kFxp8, MappingPolicy::Baseline, 1.35)).energy_saving;
  const auto s2 = compare_reports(stream(kFp32, MappingPolicy::EnforceSnn, 1.35), stream(kFxp8, MappingPolicy::EnforceSnn, 1.35)).energy_saving;
  return {std::abs(s - 0.75) <= 0.005 && std::abs(s2 - 0.75) <= 0.005,
          fmt("saving %.3f%% baseline mapping, %.3f%% error-aware mapping (target 75.0 +/- 0.5)", 100 * s, 100 * s2)};
}

Outcome c3()
{
  const auto s = compare_reports(stream(kFp32, MappingPolicy::Baseline, 1.35), stream(kFxp8, MappingPolicy::EnforceSnn, 1.025)).energy_saving;
  return {s >= 0.84 && s <= 0.87, fmt("saving %.2f%% (band 84-87)", 100 * s)};
}

Outcome c4()
{
  std::vector<double> speedups;
  for (double v : {1.025, 1.2, 1.35})
    speedups.push_back(compare_reports(stream(kFp32, MappingPolicy::Baseline, v), stream(kFxp8, MappingPolicy::EnforceSnn, v)).speedup);
  const bool equal = speedups[0] == speedups[1] && speedups[1] == speedups[2];
  return {kGeometry.banks >= 2 && equal && speedups[0] >= 4.0 && speedups[0] <= 4.3,
          fmt("speed-up %.4fx at 1.025/1.2/1.35 V (band 4.0-4.3), identical=%g", speedups[0], equal)};
}

Outcome c5()
{
  const auto efficient = ber_ladder(1e-4, 1e-2);
  const auto plain = retraining_cost(efficient, {1.0, 1.0});
  const auto composed = retraining_cost(efficient, {0.86, 0.86}, conventional_schedule().bers.size(), {1.0, 1.0});
  return {std::abs(plain.speedup - 7.0 / 3.0) < 1e-12 && std::abs(composed.speedup - 2.713) <= 0.01,
          fmt("%.0f vs %.0f levels: %.4fx; with 0.86 epoch cost: %.4fx (targets 2.333, 2.713 +/- 0.01)", double(efficient.bers.size()),
              double(conventional_schedule().bers.size()), plain.speedup, composed.speedup)};
}

Outcome c6()
{
  Rng rng = make_rng(6);
  auto pick = [&rng](std::uint32_t lo, std::uint32_t hi) { return lo + static_cast<std::uint32_t>(rng() % (hi - lo + 1)); };
  std::size_t audited = 0, capacity = 0, violations = 0, unexpected = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    const DramGeometry g{pick(1, 2), pick(1, 2), pick(1, 2), pick(1, 8), pick(1, 8), pick(1, 8), pick(1, 16), pick(1, 2)};
    std::vector<double> bers(g.subarray_count());
    for (auto& b : bers)
      b = rng() % 8 == 0 ? 0.0 : std::pow(10.0, -1.0 - 7.0 * uniform01(rng));
    const double ber_th = std::pow(10.0, -1.0 - 7.0 * uniform01(rng));
    std::uint64_t safe = 0;
    for (double b : bers)
      safe += b <= ber_th ? g.bytes_per_subarray() : 0;
    const auto bytes = static_cast<std::size_t>(rng() % (safe + 2));
    for (auto variant : {MappingVariant::Listing, MappingVariant::Prose}) {
      try {
        const auto layout = map_enforcesnn(g, bers, ber_th, bytes, variant);
        unexpected += layout.size() != bytes;
        for (const auto& p : layout.placements()) {
          ++audited;
          violations += bers[subarray_index(g, p.address)] > ber_th;
        }
      } catch (const CapacityError&) {
        ++capacity;
        unexpected += bytes <= safe;
      }
    }
  }
  return {violations == 0 && unexpected == 0, fmt("%.0f placements audited, %.0f violations, %.0f capacity refusals (all justified: %g)", double(audited),
                                                  double(violations), double(capacity), unexpected == 0)};
}

Outcome c7()
{
  // 131,072 bytes in baseline layout: 1,048,576 stored bits.
  const DramGeometry g{1, 1, 1, 8, 4, 64, 64, 1};
  const auto bytes = static_cast<std::size_t>(linear_capacity(g));
  const auto layout = map_baseline(g, bytes);
  const double n = static_cast<double>(bytes) * 8.0, p = 1e-3;
  const double sigma = std::sqrt(n * p * (1 - p));
  double worst = 0.0;
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto map = WeakCellMap::generate(g, 1e-2, 1e-1, seed);
    const auto flips = static_cast<double>(sample_error_mask(map, layout, seed + 1000).size());
    const double z = std::abs(flips - n * p) / sigma;
    worst = std::max(worst, z);
    inside += z <= 3.0;
  }
  return {inside == 20, fmt("%.0f bits per seed, %.0f/20 seeds within 3 sigma, worst |z| = %.2f", n, inside, worst)};
}

Outcome c8()
{
  const fs::path root = fs::path(VOLTSNN_DATA_DIR).parent_path();
  const auto out = fs::temp_directory_path() / "voltsnn_acceptance_c8";
  fs::remove_all(out);
  auto config = load_config((root / "configs" / "mnist_n100.json").string());
  config.output_dir = out.string();
  std::ostringstream log;
  for (const char* cmd : {"train", "profile", "fat"})
    run_command(cmd, config, log);

  std::ifstream pin(out / "profile.json"), fin(out / "fat.json");
  const auto profile = nlohmann::json::parse(pin);
  const auto fat = nlohmann::json::parse(fin);
  auto mean = [&](const char* key, double ber) {
    for (const auto& p : fat.at(key))
      if (p.at("ber").get<double>() == ber)
        return p.at("mean").get<double>();
    throw DataError("no comparison entry at BER " + std::to_string(ber));
  };
  const double baseline = profile.at("baseline").get<double>();
  const double fat3 = mean("with_fat", 1e-3), fat2 = mean("with_fat", 1e-2), plain2 = mean("without_fat", 1e-2);
  const bool a = std::abs(fat3 - baseline) <= 0.01;
  const bool b = fat2 >= plain2;
  std::string schedule;
  for (double x : fat.at("schedule").get<std::vector<double>>())
    schedule += (schedule.empty() ? "" : ",") + fmt("%g", x);
  return {a && b, fmt("(a) FAT@1e-3 %.4f vs error-free %.4f; (b) FAT@1e-2 %.4f vs non-FAT %.4f", fat3, baseline, fat2, plain2) +
                      " [schedule " + schedule + ", 5 mask seeds, 2000 test samples]"};
}

Outcome c9()
{
  Rng rng = make_rng(9);
  std::vector<double> mus;
  for (int k = 0; k <= 200; ++k)
    mus.push_back(0.05 * k);
  int bad_argmax = 0, bad_shift = 0;
  for (int set = 0; set < 1000; ++set) {
    std::vector<Candidate> cs;
    const std::size_t count = 2 + rng() % 10;
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned bits = rng() % 2 ? 8 : 32;
      const double acc = 0.5 + 0.45 * uniform01(rng);
      cs.push_back({"c" + std::to_string(i), acc, 78400, bits, 20 + 80 * uniform01(rng), 100.0, 0.0, 1.35});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < cs.size(); ++i)
      best = cs[i].accuracy > cs[best].accuracy ? i : best;
    bad_argmax += cs[select(cs, 0, 0)].accuracy != cs[best].accuracy;
    double previous = 2.0;
    for (double mu : mus) {
      const double m = memory_norm(cs[select(cs, mu, 0)]);
      bad_shift += m > previous;
      previous = m;
    }
  }
  return {bad_argmax == 0 && bad_shift == 0,
          fmt("1000 candidate sets x %.0f mu values: %.0f argmax mismatches, %.0f memory increases", double(mus.size()), bad_argmax, bad_shift)};
}

Outcome c10()
{
  Rng rng = make_rng(10);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = 1000 * uniform01(rng), pc = 500 * uniform01(rng), pr = 200 * uniform01(rng), pg = 700 * uniform01(rng);
    const double g = static_cast<double>(rng() % 16);
    const double kwh = 1.58 * t * (pc + pr + g * pg) / 1000.0, co2 = 0.954 * kwh;
    const auto e = carbon_emission(t, pc, pr, pg, g);
    worst = std::max({worst, std::abs(e.energy_kwh - kwh) / kwh, std::abs(e.co2e - co2) / co2});
  }
  return {worst <= 1e-9, fmt("100 random inputs, worst relative error %.2e", worst)};
}

Outcome c11()
{
  const FixedPointFormat q(true, 1, 6);
  Rng rng = make_rng(11);
  bool idem = true, sat = true, bound = true;
  for (int i = 0; i < 100000; ++i) {
    const double x = -4.0 + 8.0 * uniform01(rng);
    const auto c = quantize(x, q, Rounding::Truncate);
    idem = idem && quantize(dequantize(c, q), q, Rounding::Truncate) == c;
    if (x > q.max_value())
      sat = sat && c == q.max_code();
    if (x < q.min_value())
      sat = sat && c == q.min_code();
    if (x >= 0.0 && x <= q.max_value())
      bound = bound && x - dequantize(c, q) >= 0.0 && x - dequantize(c, q) < std::ldexp(1.0, -6);
  }
  double worst_z = 0.0;
  constexpr int trials = 10000;
  for (double x : {0.1, 0.3337, 0.5 + 1.0 / 256, 0.77, 0.999}) {
    double sum = 0.0;
    for (int t = 0; t < trials; ++t)
      sum += dequantize(quantize(x, q, Rounding::Stochastic, rng), q);
    const double lo = std::floor(x * 64) / 64, frac = (x - lo) * 64;
    const double sd = q.step() * std::sqrt(frac * (1 - frac) / trials);
    worst_z = std::max(worst_z, std::abs(sum / trials - x) / sd);
  }
  return {idem && sat && bound && worst_z <= 3.0,
          fmt("idempotent %g, saturating %g, error < 2^-6 %g, stochastic rounding worst |z| = %.2f", idem, sat, bound, worst_z)};
}

Outcome c12()
{
  const DramGeometry g{2, 2, 1, 4, 2, 4, 4, 1};
  Rng rng = make_rng(12);
  std::size_t mismatches = 0, accesses = 0;
  for (int trace = 0; trace < 100000; ++trace) {
    RowBufferState state(g);
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t>, std::pair<std::uint32_t, std::uint32_t>> open;
    const std::size_t length = 1 + rng() % 32;
    for (std::size_t k = 0; k < length; ++k, ++accesses) {
      const auto a = address_of_column(g, rng() % g.column_count());
      const auto key = std::make_tuple(a.channel, a.rank, a.chip, a.bank);
      const auto row = std::make_pair(a.subarray, a.row);
      RowCondition expected;
      if (auto it = open.find(key); it == open.end())
        expected = RowCondition::Miss;
      else
        expected = it->second == row ? RowCondition::Hit : RowCondition::Conflict;
      open[key] = row;
      mismatches += classify_access(state, a) != expected;
    }
  }
  return {mismatches == 0, fmt("100000 traces, %.0f accesses, %.0f mismatches", double(accesses), double(mismatches))};
}
} // namespace

int main(int argc, char** argv)
{
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"per-access energy reduction at 1.025 V", c1},
      {"FxP8 vs FP32 DRAM energy saving", c2},
      {"combined FxP8 + 1.025 V saving", c3},
      {"error-aware FxP8 vs baseline FP32 throughput", c4},
      {"retraining-cost ratios", c5},
      {"mapping safety audit", c6},
      {"error-injection statistics", c7},
      {"desk-scale FAT accuracy behavior", c8},
      {"selection sanity", c9},
      {"carbon formulas", c10},
      {"quantization properties", c11},
      {"row-buffer oracle equivalence", c12}};

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i)
    wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!wanted.empty() && !wanted.count(id))
      continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria failed\n", failures, wanted.empty() ? criteria.size() : wanted.size());
  return failures == 0 ? 0 : 1;
}
