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

#ifndef VOLTSNN_FAT_HPP
#define VOLTSNN_FAT_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "voltsnn/dataset.hpp"
#include "voltsnn/dram_error.hpp"
#include "voltsnn/dram_mapping.hpp"
#include "voltsnn/fixedpoint.hpp"
#include "voltsnn/snn.hpp"

namespace voltsnn
{

/// How weights are stored in approximate DRAM.
struct DramStack
{
  DramGeometry geometry;
  WeightFormat format = WeightFormat::parse("fxp8_signed_q1_6");
  Rounding rounding = Rounding::Truncate;
  MappingPolicy mapping = MappingPolicy::EnforceSnn;
  MappingVariant variant = MappingVariant::Listing;
  double ber_th = 1e-2;
  FlipPolicy flips{0.5};
};

/// Weights as read back after one stay in DRAM at `ber`: quantize, sample a
/// weak-cell map, lay out by the stack's policy, inject one mask, dequantize.
/// At ber = 0 this is a pure quantization round trip.
WeightMatrix read_back_weights(const WeightMatrix& weights, const DramStack& stack, double ber, std::uint64_t seed);

struct ProfilePoint
{
  double ber = 0.0;
  double mean = 0.0;
  double stddev = 0.0; // sample standard deviation over trials
  std::vector<double> trials;
};

struct AccuracyProfile
{
  double baseline = 0.0; // quantized weights, no errors
  std::vector<ProfilePoint> points;
};

struct ProfileOptions
{
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Accuracy of a labeled model on `test` for each BER, with a fresh weak-cell
/// map and mask per trial. `bers` must be strictly increasing and
/// non-negative. Spike trains are shared across all trials so accuracies are
/// paired.
AccuracyProfile accuracy_profile(const SnnModel& model, std::span<const double> bers, const DramStack& stack, const Dataset& test,
                                 const ProfileOptions& options);

/// Largest profiled BER (> 0) whose mean accuracy is at most `max_drop` below
/// the baseline. Throws InvalidValue if no BER qualifies.
double determine_ber_th(const AccuracyProfile& profile, double max_drop = 0.03);

struct FatSchedule
{
  std::vector<double> bers; // strictly increasing
  std::vector<std::string> warnings;
};

/// The two largest BERs with at most `region_a_drop` accuracy loss, followed
/// by every larger profiled BER up to `max_ber`. Warns when fewer than two
/// tolerable BERs exist.
FatSchedule derive_fat_schedule(const AccuracyProfile& profile, double region_a_drop = 0.01,
                                double max_ber = std::numeric_limits<double>::infinity());

/// lowest, lowest*ratio, ... up to highest (inclusive, within rounding).
FatSchedule ber_ladder(double lowest, double highest, double ratio = 10.0);
/// {1e-8, ..., 1e-2}.
FatSchedule conventional_schedule();
/// Throws InvalidValue unless the list is non-empty, positive and strictly increasing.
FatSchedule explicit_schedule(std::vector<double> bers);

struct FatLevel
{
  std::size_t level = 0;
  double ber = 0.0;
  double train_error = 0.0; // 1 - accuracy of the reassigned labels on the train set
  double accuracy = 0.0;    // test accuracy of the stored (quantized) weights
  bool collapse = false;
};

struct FatResult
{
  SnnModel model;
  double accuracy = 0.0;
  double baseline = 0.0;
  std::vector<FatLevel> levels;
};

struct FatOptions
{
  std::uint64_t seed = 0;
  double collapse_drop = 0.20;
  double learning_rate_scale = 1.0; // applied to the STDP rate while retraining
  unsigned threads = 0;
};

/// Fault-aware training. The working model starts as `model0`; each level
/// injects a fresh error map at its BER into the working weights (clamped to
/// [0, 1]), trains one epoch, relabels on `train` and tests. The best-testing
/// working model is kept. With an empty schedule the result is `model0` with
/// accuracy 0.
FatResult fault_aware_train(const SnnModel& model0, std::span<const double> schedule, const DramStack& stack, const Dataset& train,
                            const Dataset& test, const FatOptions& options);

struct EpochCost
{
  double time = 0.0;
  double energy = 0.0;
};

struct RetrainingComparison
{
  double speedup = 1.0;
  double energy_saving = 0.0;
};

/// Cost of `schedule` epochs at `per_epoch` against `reference_levels`
/// epochs at `reference_per_epoch`.
RetrainingComparison retraining_cost(const FatSchedule& schedule, EpochCost per_epoch, std::size_t reference_levels,
                                     EpochCost reference_per_epoch);
/// Against the 7-level conventional schedule at the same per-epoch cost.
RetrainingComparison retraining_cost(const FatSchedule& schedule, EpochCost per_epoch);

/// ber,mean,stddev,trials (baseline as BER 0 on the first row when absent).
void write_profile_csv(std::ostream& out, const AccuracyProfile& profile);
/// level,ber,train_error,accuracy,collapse
void write_fat_log_csv(std::ostream& out, const std::vector<FatLevel>& levels);

} // namespace voltsnn

#endif
