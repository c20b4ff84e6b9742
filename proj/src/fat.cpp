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

#include "voltsnn/fat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "voltsnn/error.hpp"
#include "voltsnn/parallel.hpp"

namespace voltsnn
{

namespace
{
constexpr std::uint64_t kQuantStream = 0x7175616e;
constexpr std::uint64_t kMapStream = 0x6d6170;
constexpr std::uint64_t kMaskStream = 0x6d61736b;
constexpr std::uint64_t kProfileStream = 0x70726f66;
constexpr std::uint64_t kFatStream = 0x666174;

constexpr std::size_t kConventionalLevels = 7;

// Strips binary noise from products such as 1e-8 * 10^6.
double tidy(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

void check_increasing(std::span<const double> bers, bool allow_zero)
{
  for (std::size_t i = 0; i < bers.size(); ++i) {
    if (!(bers[i] >= 0.0 && bers[i] <= 1.0) || (!allow_zero && bers[i] == 0.0))
      throw InvalidValue("BER " + std::to_string(bers[i]) + " outside the allowed range");
    if (i > 0 && !(bers[i] > bers[i - 1]))
      throw InvalidValue("BER list must be strictly increasing");
  }
}

double mean_of(std::span<const double> xs)
{
  double s = 0.0;
  for (double x : xs)
    s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double stddev_of(std::span<const double> xs)
{
  if (xs.size() < 2)
    return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs)
    s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}
} // namespace

WeightMatrix read_back_weights(const WeightMatrix& weights, const DramStack& stack, double ber, std::uint64_t seed)
{
  Rng qrng = make_rng(seed, {kQuantStream});
  const auto stored = quantize_tensor(weights, stack.format, stack.rounding, qrng);
  if (ber == 0.0)
    return dequantize_tensor(stored);

  const auto split = stack.flips.split(ber);
  const auto map = WeakCellMap::generate(stack.geometry, split.weak_fraction, split.flip_probability, derive_seed(seed, {kMapStream}));
  const auto layout = stack.mapping == MappingPolicy::EnforceSnn
                          ? map_enforcesnn(stack.geometry, subarray_bers(map), stack.ber_th, stored.byte_size(), stack.variant)
                          : map_baseline(stack.geometry, stored.byte_size());
  return dequantize_tensor(inject_errors(stored, layout, map, derive_seed(seed, {kMaskStream})));
}

AccuracyProfile accuracy_profile(const SnnModel& model, std::span<const double> bers, const DramStack& stack, const Dataset& test,
                                 const ProfileOptions& options)
{
  check_increasing(bers, true);
  if (options.trials == 0)
    throw InvalidValue("an accuracy profile needs at least one trial per BER");

  const std::uint64_t eval_seed = derive_seed(options.seed, {kProfileStream});
  AccuracyProfile profile;
  const auto clean = read_back_weights(model.weights(), stack, 0.0, derive_seed(options.seed, {kQuantStream}));
  profile.baseline = evaluate(model, test, {eval_seed, &clean, options.threads});

  const std::size_t runs = bers.size() * options.trials;
  std::vector<double> acc(runs, 0.0);
  // One level of parallelism: across runs when there are several, else inside evaluate.
  const unsigned outer = runs > 1 ? options.threads : 1;
  const unsigned inner = runs > 1 ? 1 : options.threads;
  parallel_for(
      runs,
      [&](std::size_t k) {
        const auto b = k / options.trials;
        const auto t = k % options.trials;
        if (bers[b] == 0.0) {
          acc[k] = profile.baseline;
          return;
        }
        const auto w = read_back_weights(model.weights(), stack, bers[b], derive_seed(options.seed, {kProfileStream, b, t}));
        acc[k] = evaluate(model, test, {eval_seed, &w, inner});
      },
      outer);

  for (std::size_t b = 0; b < bers.size(); ++b) {
    ProfilePoint p;
    p.ber = bers[b];
    p.trials.assign(acc.begin() + static_cast<std::ptrdiff_t>(b * options.trials),
                    acc.begin() + static_cast<std::ptrdiff_t>((b + 1) * options.trials));
    p.mean = mean_of(p.trials);
    p.stddev = stddev_of(p.trials);
    profile.points.push_back(std::move(p));
  }
  return profile;
}

double determine_ber_th(const AccuracyProfile& profile, double max_drop)
{
  double best = -1.0;
  for (const auto& p : profile.points)
    if (p.ber > 0.0 && profile.baseline - p.mean <= max_drop + 1e-12)
      best = std::max(best, p.ber);
  if (best < 0.0)
    throw InvalidValue("every profiled BER degrades accuracy by more than " + std::to_string(max_drop * 100.0) + " points");
  return best;
}

FatSchedule derive_fat_schedule(const AccuracyProfile& profile, double region_a_drop, double max_ber)
{
  std::vector<double> region_a, region_b;
  for (const auto& p : profile.points) {
    if (p.ber <= 0.0 || p.ber > max_ber)
      continue;
    (profile.baseline - p.mean <= region_a_drop + 1e-12 ? region_a : region_b).push_back(p.ber);
  }
  FatSchedule s;
  if (region_a.size() < 2)
    s.warnings.push_back("only " + std::to_string(region_a.size()) + " BER value(s) within the acceptable-accuracy region");
  const auto keep = std::min<std::size_t>(2, region_a.size());
  s.bers.assign(region_a.end() - static_cast<std::ptrdiff_t>(keep), region_a.end());
  s.bers.insert(s.bers.end(), region_b.begin(), region_b.end());
  std::sort(s.bers.begin(), s.bers.end());
  if (s.bers.empty())
    s.warnings.push_back("empty FAT schedule");
  return s;
}

FatSchedule ber_ladder(double lowest, double highest, double ratio)
{
  if (!(lowest > 0.0 && highest >= lowest && highest <= 1.0 && ratio > 1.0))
    throw InvalidValue("BER ladder needs 0 < lowest <= highest <= 1 and ratio > 1");
  FatSchedule s;
  for (int k = 0;; ++k) {
    const double b = tidy(lowest * std::pow(ratio, k));
    if (b > highest * (1.0 + 1e-9))
      break;
    s.bers.push_back(b);
  }
  return s;
}

FatSchedule conventional_schedule() { return ber_ladder(1e-8, 1e-2, 10.0); }

FatSchedule explicit_schedule(std::vector<double> bers)
{
  if (bers.empty())
    throw InvalidValue("explicit FAT schedule is empty");
  check_increasing(bers, false);
  return FatSchedule{std::move(bers), {}};
}

FatResult fault_aware_train(const SnnModel& model0, std::span<const double> schedule, const DramStack& stack, const Dataset& train,
                            const Dataset& test, const FatOptions& options)
{
  check_increasing(schedule, false);
  const std::uint64_t eval_seed = derive_seed(options.seed, {kFatStream});

  FatResult result{model0, 0.0, 0.0, {}};
  if (schedule.empty())
    return result;

  SnnModel baseline = model0;
  if (!baseline.labeled())
    assign_labels(baseline, train, {eval_seed, nullptr, options.threads});
  const auto clean0 = read_back_weights(baseline.weights(), stack, 0.0, eval_seed);
  result.baseline = evaluate(baseline, test, {eval_seed, &clean0, options.threads});

  SnnModel working = model0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto level_seed = derive_seed(options.seed, {kFatStream, i});
    working.set_weights(read_back_weights(working.weights(), stack, schedule[i], level_seed));
    train_epoch(working, train, derive_seed(level_seed, {1}), options.learning_rate_scale);

    FatLevel log;
    log.level = i;
    log.ber = schedule[i];
    log.train_error = 1.0 - assign_labels(working, train, {eval_seed, nullptr, options.threads});
    const auto stored = read_back_weights(working.weights(), stack, 0.0, level_seed);
    log.accuracy = evaluate(working, test, {eval_seed, &stored, options.threads});
    log.collapse = log.accuracy < result.baseline - options.collapse_drop;
    result.levels.push_back(log);

    if (log.accuracy > result.accuracy) {
      result.model = working;
      result.accuracy = log.accuracy;
    }
  }
  return result;
}

RetrainingComparison retraining_cost(const FatSchedule& schedule, EpochCost per_epoch, std::size_t reference_levels,
                                     EpochCost reference_per_epoch)
{
  if (schedule.bers.empty() || reference_levels == 0)
    throw InvalidValue("retraining cost needs non-empty schedules");
  if (!(per_epoch.time > 0 && per_epoch.energy > 0 && reference_per_epoch.time > 0 && reference_per_epoch.energy > 0))
    throw InvalidValue("per-epoch costs must be positive");
  const double n = static_cast<double>(schedule.bers.size());
  const double ref = static_cast<double>(reference_levels);
  return {(ref * reference_per_epoch.time) / (n * per_epoch.time), 1.0 - (n * per_epoch.energy) / (ref * reference_per_epoch.energy)};
}

RetrainingComparison retraining_cost(const FatSchedule& schedule, EpochCost per_epoch)
{
  return retraining_cost(schedule, per_epoch, kConventionalLevels, per_epoch);
}

void write_profile_csv(std::ostream& out, const AccuracyProfile& profile)
{
  out << "ber,mean,stddev,trials\n";
  if (profile.points.empty() || profile.points.front().ber > 0.0)
    out << "0," << profile.baseline << ",0,1\n";
  for (const auto& p : profile.points)
    out << p.ber << ',' << p.mean << ',' << p.stddev << ',' << p.trials.size() << '\n';
}

void write_fat_log_csv(std::ostream& out, const std::vector<FatLevel>& levels)
{
  out << "level,ber,train_error,accuracy,collapse\n";
  for (const auto& l : levels)
    out << l.level << ',' << l.ber << ',' << l.train_error << ',' << l.accuracy << ',' << (l.collapse ? 1 : 0) << '\n';
}

} // namespace voltsnn
