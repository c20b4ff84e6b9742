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

#ifndef VOLTSNN_SNN_HPP
#define VOLTSNN_SNN_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voltsnn/dataset.hpp"
#include "voltsnn/matrix.hpp"
#include "voltsnn/rng.hpp"

namespace voltsnn
{

/// Potentials in mV, times in ms.
struct NeuronParams
{
  double v_rest = -65.0;
  double v_reset = -60.0;
  double v_thresh = -52.0;
  double tau_mem = 100.0;
  double refractory = 5.0;
  double theta_plus = 0.05;  // threshold increment per output spike
  double theta_decay = 1e7;  // time constant of the adaptive threshold

  bool operator==(const NeuronParams&) const = default;
};

/// Weight-dependent STDP applied on every post-synaptic spike:
///   dw = learning_rate * (x_pre - target) * (1 - w)^dependence, w clamped to [0, 1].
struct StdpParams
{
  double learning_rate = 0.1;
  double target = 0.4;
  double dependence = 0.5;
  double tau_pre = 20.0; // pre-synaptic trace time constant

  bool operator==(const StdpParams&) const = default;
};

struct PresentationParams
{
  double duration = 350.0;
  double dt = 1.0;
  double max_rate = 63.75;    // Hz at intensity 1
  double rate_boost = 32.0;   // Hz added when a sample evokes too few spikes
  unsigned min_spikes = 5;
  unsigned max_boosts = 10;

  bool operator==(const PresentationParams&) const = default;
};

enum class Inhibition
{
  Graded,
  WinnerTakeAll
};

Inhibition parse_inhibition(std::string_view name);
std::string to_string(Inhibition mode);

struct SnnConfig
{
  std::size_t inputs = 784;
  std::size_t neurons = 100;
  NeuronParams neuron;
  StdpParams stdp;
  PresentationParams presentation;
  Inhibition inhibition = Inhibition::Graded;
  double inhibition_strength = 50.0; // mV subtracted from the other neurons per output spike
  double inhibition_floor = -100.0;  // inhibition never pushes a potential below this
  double input_gain = 1.0;           // mV per unit weight per input spike
  double mean_weight = 0.1;          // per-neuron incoming mean after each sample; 0 disables
  double init_weight_max = 0.3;

  /// Throws ConfigError on a nonsensical value.
  void validate() const;
  bool operator==(const SnnConfig&) const = default;
};

/// Per-pixel sorted spike times in [0, duration).
struct SpikeTrain
{
  double duration = 0.0;
  std::vector<std::vector<double>> times;

  std::size_t total() const noexcept;
};

/// Poisson spike train per pixel with rate intensity * max_rate.
SpikeTrain encode_rate(std::span<const float> image, double duration, double max_rate, Rng& rng);
SpikeTrain encode_rate(std::span<const float> image, double duration, double max_rate, std::uint64_t seed);

struct LifState
{
  double v = -65.0;
  double theta = 0.0;
  double refractory = 0.0; // remaining ms
};

/// Leak toward rest and integrate `input` (mV); no effect while refractory.
void lif_integrate(LifState& s, double input, double dt, const NeuronParams& p);
/// Threshold check. On a spike: reset, start the refractory period and, if
/// `adapt`, raise theta.
bool lif_fire(LifState& s, const NeuronParams& p, bool adapt = true);
/// Theta decay, integrate, fire.
bool lif_step(LifState& s, double input, double dt, const NeuronParams& p);

/// Decides which neurons above threshold spike this step. Candidates are
/// visited by decreasing overshoot (v - threshold). Each spike lowers every
/// other neuron that has not fired by `strength` (floored at `floor`); a later
/// candidate fires only if still at threshold. In WinnerTakeAll mode only the
/// first candidate fires. Returns the spiking neurons in firing order and
/// updates `v` for the inhibition (spiking neurons keep their potential).
std::vector<std::size_t> resolve_firing(std::span<double> v, std::span<const double> thresholds, double strength, double floor,
                                        Inhibition mode);

/// Applies the STDP rule to the incoming weights (a column) of each neuron in
/// `post`. `pre_traces` has one entry per input.
void stdp_update(WeightMatrix& weights, std::span<const double> pre_traces, std::span<const std::size_t> post, const StdpParams& p);

/// Fully-connected input x neuron network with LIF neurons, adaptive
/// thresholds and lateral inhibition.
class SnnModel
{
public:
  /// Weights uniform in [0, init_weight_max], then normalized.
  SnnModel(const SnnConfig& config, std::uint64_t seed);
  /// Throws InvalidValue if shapes disagree or a weight is outside [0, 1].
  SnnModel(const SnnConfig& config, WeightMatrix weights, std::vector<double> theta);

  const SnnConfig& config() const noexcept { return config_; }
  const WeightMatrix& weights() const noexcept { return weights_; }
  std::span<const double> theta() const noexcept { return theta_; }

  /// Clamps into [0, 1]; throws InvalidValue on a shape mismatch or NaN.
  void set_weights(const WeightMatrix& weights);

  bool labeled() const noexcept { return !labels_.empty(); }
  /// Class per neuron, -1 for neurons that never responded. Throws
  /// InvalidValue before assign_labels.
  const std::vector<int>& label_map() const;
  void set_label_map(std::vector<int> labels);
  void clear_label_map() { labels_.clear(); }

  bool operator==(const SnnModel&) const = default;

private:
  friend void train_epoch(SnnModel& model, const Dataset& data, std::uint64_t seed, double learning_rate_scale);

  void normalize();

  SnnConfig config_;
  WeightMatrix weights_;
  std::vector<double> theta_;
  std::vector<int> labels_;
};

/// One pass over `data` in order with STDP, threshold adaptation and weight
/// normalization. Clears the label map. Deterministic given `seed`.
/// `learning_rate_scale` multiplies the configured STDP learning rate.
void train_epoch(SnnModel& model, const Dataset& data, std::uint64_t seed, double learning_rate_scale = 1.0);

struct EvalOptions
{
  std::uint64_t seed = 0;
  /// Replaces the model's weights (e.g. after error injection); may hold
  /// values outside [0, 1].
  const WeightMatrix* weights = nullptr;
  unsigned threads = 0;
};

/// Output spike counts without learning, samples x neurons row-major.
/// Sample i is encoded from stream (seed, i), so runs are reproducible and
/// paired across weight sets.
std::vector<std::uint32_t> spike_counts(const SnnModel& model, const Dataset& data, const EvalOptions& options = {});

/// Labels each neuron with the class of highest average response and
/// returns the accuracy of the new labels on `labeled` itself.
double assign_labels(SnnModel& model, const Dataset& labeled, const EvalOptions& options = {});

/// Class whose labeled neurons have the highest mean count (ties to the
/// smaller class). Throws InvalidValue if the model is unlabeled.
int predict(const SnnModel& model, std::span<const std::uint32_t> counts);
int infer(const SnnModel& model, std::span<const float> image, const EvalOptions& options = {});

/// Fraction classified correctly. Throws InvalidValue on an empty dataset or
/// an unlabeled model.
double evaluate(const SnnModel& model, const Dataset& data, const EvalOptions& options = {});

} // namespace voltsnn

#endif
