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

#include "voltsnn/snn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "voltsnn/error.hpp"
#include "voltsnn/parallel.hpp"

namespace voltsnn
{

namespace
{
constexpr std::uint64_t kInitStream = 0x696e6974;
constexpr std::uint64_t kTrainStream = 0x747261696e;
constexpr std::uint64_t kEvalStream = 0x6576616c;

void require(bool ok, const std::string& what)
{
  if (!ok)
    throw ConfigError("invalid SNN configuration: " + what);
}

/// Scratch state for presenting one sample to the network.
class Presenter
{
public:
  explicit Presenter(const SnnConfig& c)
      : c_(c), steps_(static_cast<std::size_t>(std::ceil(c.presentation.duration / c.presentation.dt - 1e-9))), state_(c.neurons),
        v_(c.neurons), thresholds_(c.neurons), current_(c.neurons), counts_(c.neurons), traces_(c.inputs), offsets_(steps_ + 1)
  {
  }

  /// Runs until the sample evokes min_spikes output spikes or the rate boosts
  /// run out. `plastic` (== &weights) enables STDP and theta adaptation.
  std::span<const std::uint32_t> run(std::span<const float> image, const WeightMatrix& weights, std::span<double> theta, Rng& rng,
                                     WeightMatrix* plastic)
  {
    const auto& pres = c_.presentation;
    double rate = pres.max_rate;
    for (unsigned attempt = 0;; ++attempt) {
      bin(encode_rate(image, pres.duration, rate, rng));
      const auto total = simulate(weights, theta, plastic);
      if (total >= pres.min_spikes || attempt >= pres.max_boosts)
        break;
      rate += pres.rate_boost;
    }
    return counts_;
  }

private:
  void bin(const SpikeTrain& train)
  {
    const double dt = c_.presentation.dt;
    std::fill(offsets_.begin(), offsets_.end(), 0u);
    auto step_of = [&](double t) { return std::min(steps_ - 1, static_cast<std::size_t>(t / dt)); };
    for (const auto& times : train.times)
      for (double t : times)
        ++offsets_[step_of(t) + 1];
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    pixels_.resize(offsets_.back());
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t p = 0; p < train.times.size(); ++p)
      for (double t : train.times[p])
        pixels_[fill[step_of(t)]++] = static_cast<std::uint32_t>(p);
  }

  std::uint32_t simulate(const WeightMatrix& w, std::span<double> theta, WeightMatrix* plastic)
  {
    const auto& np = c_.neuron;
    const double dt = c_.presentation.dt;
    const bool learn = plastic != nullptr;
    const double trace_decay = std::exp(-dt / c_.stdp.tau_pre);
    const double theta_decay = std::exp(-dt / np.theta_decay);
    const std::size_t n = c_.neurons;

    for (std::size_t j = 0; j < n; ++j)
      state_[j] = LifState{np.v_rest, theta[j], 0.0};
    std::fill(traces_.begin(), traces_.end(), 0.0);
    std::fill(counts_.begin(), counts_.end(), 0u);
    std::uint32_t total = 0;

    for (std::size_t s = 0; s < steps_; ++s) {
      if (learn) {
        for (auto& x : traces_)
          x *= trace_decay;
        for (auto& st : state_)
          st.theta *= theta_decay;
      }
      std::fill(current_.begin(), current_.end(), 0.0);
      for (auto k = offsets_[s]; k < offsets_[s + 1]; ++k) {
        const auto p = pixels_[k];
        const auto row = w.row(p);
        for (std::size_t j = 0; j < n; ++j)
          current_[j] += c_.input_gain * row[j];
        if (learn)
          traces_[p] = 1.0;
      }
      for (std::size_t j = 0; j < n; ++j) {
        lif_integrate(state_[j], current_[j], dt, np);
        v_[j] = state_[j].v;
        thresholds_[j] = np.v_thresh + state_[j].theta;
      }
      const auto fired = resolve_firing(v_, thresholds_, c_.inhibition_strength, c_.inhibition_floor, c_.inhibition);
      for (std::size_t j = 0; j < n; ++j)
        state_[j].v = v_[j];
      for (auto j : fired) {
        lif_fire(state_[j], np, learn);
        ++counts_[j];
      }
      total += static_cast<std::uint32_t>(fired.size());
      if (learn && !fired.empty())
        stdp_update(*plastic, traces_, fired, c_.stdp);
    }
    if (learn)
      for (std::size_t j = 0; j < n; ++j)
        theta[j] = state_[j].theta;
    return total;
  }

  const SnnConfig& c_;
  std::size_t steps_;
  std::vector<LifState> state_;
  std::vector<double> v_, thresholds_, current_;
  std::vector<std::uint32_t> counts_;
  std::vector<double> traces_;
  std::vector<std::uint32_t> offsets_, pixels_;
};
} // namespace

Inhibition parse_inhibition(std::string_view name)
{
  if (name == "graded")
    return Inhibition::Graded;
  if (name == "wta")
    return Inhibition::WinnerTakeAll;
  throw InvalidValue("unknown inhibition mode '" + std::string(name) + "' (expected graded or wta)");
}

std::string to_string(Inhibition mode) { return mode == Inhibition::Graded ? "graded" : "wta"; }

void SnnConfig::validate() const
{
  const auto& np = neuron;
  require(inputs > 0 && neurons > 0, "inputs and neurons must be positive");
  require(np.tau_mem > 0 && np.theta_decay > 0 && np.refractory >= 0, "time constants must be positive");
  require(np.v_rest < np.v_thresh && np.v_reset < np.v_thresh, "v_rest and v_reset must lie below v_thresh");
  require(np.theta_plus >= 0, "theta_plus must be non-negative");
  require(stdp.learning_rate >= 0 && stdp.tau_pre > 0, "STDP learning rate and trace time constant");
  require(stdp.target >= 0 && stdp.target <= 1, "STDP target must lie in [0, 1]");
  require(stdp.dependence > 0, "STDP weight dependence must be positive");
  require(presentation.duration > 0 && presentation.dt > 0 && presentation.dt <= presentation.duration, "duration and dt");
  require(presentation.max_rate >= 0 && presentation.rate_boost >= 0, "input rates must be non-negative");
  require(inhibition_strength >= 0 && inhibition_floor < np.v_reset, "inhibition strength and floor");
  require(input_gain >= 0, "input gain must be non-negative");
  require(mean_weight >= 0 && mean_weight <= 1 && init_weight_max >= 0 && init_weight_max <= 1, "weight scales must lie in [0, 1]");
}

std::size_t SpikeTrain::total() const noexcept
{
  std::size_t n = 0;
  for (const auto& t : times)
    n += t.size();
  return n;
}

SpikeTrain encode_rate(std::span<const float> image, double duration, double max_rate, Rng& rng)
{
  SpikeTrain train{duration, std::vector<std::vector<double>>(image.size())};
  for (std::size_t p = 0; p < image.size(); ++p) {
    const double per_ms = static_cast<double>(image[p]) * max_rate * 1e-3;
    if (!(per_ms > 0.0))
      continue;
    auto& times = train.times[p];
    for (double t = -std::log1p(-uniform01(rng)) / per_ms; t < duration; t += -std::log1p(-uniform01(rng)) / per_ms)
      times.push_back(t);
  }
  return train;
}

SpikeTrain encode_rate(std::span<const float> image, double duration, double max_rate, std::uint64_t seed)
{
  Rng rng = make_rng(seed, {kEvalStream});
  return encode_rate(image, duration, max_rate, rng);
}

void lif_integrate(LifState& s, double input, double dt, const NeuronParams& p)
{
  if (s.refractory > 1e-9) {
    s.refractory -= dt;
    return;
  }
  s.v = p.v_rest + (s.v - p.v_rest) * std::exp(-dt / p.tau_mem) + input;
}

bool lif_fire(LifState& s, const NeuronParams& p, bool adapt)
{
  if (s.refractory > 1e-9 || s.v < p.v_thresh + s.theta)
    return false;
  s.v = p.v_reset;
  s.refractory = p.refractory;
  if (adapt)
    s.theta += p.theta_plus;
  return true;
}

bool lif_step(LifState& s, double input, double dt, const NeuronParams& p)
{
  s.theta *= std::exp(-dt / p.theta_decay);
  lif_integrate(s, input, dt, p);
  return lif_fire(s, p, true);
}

std::vector<std::size_t> resolve_firing(std::span<double> v, std::span<const double> thresholds, double strength, double floor,
                                        Inhibition mode)
{
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (v[j] >= thresholds[j])
      candidates.push_back(j);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] - thresholds[a] > v[b] - thresholds[b]; });

  std::vector<std::size_t> fired;
  std::vector<char> spiked(v.size(), 0);
  for (auto j : candidates) {
    if (v[j] < thresholds[j])
      continue;
    fired.push_back(j);
    spiked[j] = 1;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (!spiked[k])
        v[k] = std::max(floor, v[k] - strength);
    if (mode == Inhibition::WinnerTakeAll)
      break;
  }
  return fired;
}

void stdp_update(WeightMatrix& weights, std::span<const double> pre_traces, std::span<const std::size_t> post, const StdpParams& p)
{
  if (pre_traces.size() != weights.rows())
    throw InvalidValue("pre-synaptic trace count does not match the weight rows");
  for (auto j : post) {
    for (std::size_t i = 0; i < weights.rows(); ++i) {
      float& w = weights(i, j);
      const double room = 1.0 - static_cast<double>(w);
      const double dw = p.learning_rate * (pre_traces[i] - p.target) * (p.dependence == 1.0 ? room : std::pow(room, p.dependence));
      w = static_cast<float>(std::clamp(static_cast<double>(w) + dw, 0.0, 1.0));
    }
  }
}

SnnModel::SnnModel(const SnnConfig& config, std::uint64_t seed)
    : config_(config), weights_(config.inputs, config.neurons), theta_(config.neurons, 0.0)
{
  config_.validate();
  Rng rng = make_rng(seed, {kInitStream});
  for (auto& w : weights_.data())
    w = static_cast<float>(uniform01(rng) * config_.init_weight_max);
  normalize();
}

SnnModel::SnnModel(const SnnConfig& config, WeightMatrix weights, std::vector<double> theta)
    : config_(config), weights_(std::move(weights)), theta_(std::move(theta))
{
  config_.validate();
  if (weights_.rows() != config_.inputs || weights_.cols() != config_.neurons)
    throw InvalidValue("weight matrix shape does not match the network configuration");
  if (theta_.size() != config_.neurons)
    throw InvalidValue("threshold vector size does not match the neuron count");
  for (float w : weights_.data())
    if (!(w >= 0.0f && w <= 1.0f))
      throw InvalidValue("weight " + std::to_string(w) + " outside [0, 1]");
}

void SnnModel::set_weights(const WeightMatrix& weights)
{
  if (weights.rows() != weights_.rows() || weights.cols() != weights_.cols())
    throw InvalidValue("weight matrix shape does not match the model");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const float w = weights.data()[i];
    if (std::isnan(w))
      throw InvalidValue("NaN weight");
    weights_.data()[i] = std::clamp(w, 0.0f, 1.0f);
  }
}

const std::vector<int>& SnnModel::label_map() const
{
  if (labels_.empty())
    throw InvalidValue("model has no label assignment");
  return labels_;
}

void SnnModel::set_label_map(std::vector<int> labels)
{
  if (labels.size() != config_.neurons)
    throw InvalidValue("label map size does not match the neuron count");
  labels_ = std::move(labels);
}

void SnnModel::normalize()
{
  if (config_.mean_weight <= 0.0)
    return;
  const double target = config_.mean_weight * static_cast<double>(config_.inputs);
  std::vector<double> sums(config_.neurons, 0.0);
  for (std::size_t i = 0; i < config_.inputs; ++i) {
    const auto row = weights_.row(i);
    for (std::size_t j = 0; j < config_.neurons; ++j)
      sums[j] += row[j];
  }
  for (auto& s : sums)
    s = s > 0.0 ? target / s : 1.0;
  for (std::size_t i = 0; i < config_.inputs; ++i) {
    auto row = weights_.row(i);
    for (std::size_t j = 0; j < config_.neurons; ++j)
      row[j] = std::clamp(static_cast<float>(row[j] * sums[j]), 0.0f, 1.0f);
  }
}

void train_epoch(SnnModel& model, const Dataset& data, std::uint64_t seed, double learning_rate_scale)
{
  if (!(learning_rate_scale >= 0.0))
    throw InvalidValue("learning-rate scale must be non-negative");
  if (data.empty())
    return;
  if (data.pixels() != model.config_.inputs)
    throw InvalidValue("dataset images have " + std::to_string(data.pixels()) + " pixels, network expects " +
                       std::to_string(model.config_.inputs));
  model.labels_.clear();
  SnnConfig config = model.config_;
  config.stdp.learning_rate *= learning_rate_scale;
  Presenter presenter(config);
  for (std::size_t i = 0; i < data.size(); ++i) {
    Rng rng = make_rng(seed, {kTrainStream, i});
    presenter.run(data.image(i), model.weights_, model.theta_, rng, &model.weights_);
    model.normalize();
  }
}

std::vector<std::uint32_t> spike_counts(const SnnModel& model, const Dataset& data, const EvalOptions& options)
{
  const auto& c = model.config();
  if (!data.empty() && data.pixels() != c.inputs)
    throw InvalidValue("dataset images have " + std::to_string(data.pixels()) + " pixels, network expects " + std::to_string(c.inputs));
  const WeightMatrix& w = options.weights ? *options.weights : model.weights();
  if (w.rows() != c.inputs || w.cols() != c.neurons)
    throw InvalidValue("override weight matrix shape does not match the network");

  std::vector<std::uint32_t> out(data.size() * c.neurons);
  parallel_for(
      data.size(),
      [&](std::size_t i) {
        Presenter presenter(c);
        std::vector<double> theta(model.theta().begin(), model.theta().end());
        Rng rng = make_rng(options.seed, {kEvalStream, i});
        const auto counts = presenter.run(data.image(i), w, theta, rng, nullptr);
        std::copy(counts.begin(), counts.end(), out.begin() + static_cast<std::ptrdiff_t>(i * c.neurons));
      },
      options.threads);
  return out;
}

double assign_labels(SnnModel& model, const Dataset& labeled, const EvalOptions& options)
{
  if (labeled.empty())
    throw InvalidValue("cannot assign labels from an empty dataset");
  const auto n = model.config().neurons;
  const auto classes = static_cast<std::size_t>(labeled.classes());
  const auto counts = spike_counts(model, labeled, options);

  std::vector<double> per_class(n * classes, 0.0);
  std::vector<double> samples(classes, 0.0);
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto y = static_cast<std::size_t>(labeled.label(i));
    samples[y] += 1.0;
    for (std::size_t j = 0; j < n; ++j)
      per_class[j * classes + y] += counts[i * n + j];
  }
  std::vector<int> labels(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    double best = 0.0;
    for (std::size_t y = 0; y < classes; ++y) {
      if (samples[y] == 0.0)
        continue;
      const double mean = per_class[j * classes + y] / samples[y];
      if (mean > best) {
        best = mean;
        labels[j] = static_cast<int>(y);
      }
    }
  }
  model.set_label_map(std::move(labels));

  std::size_t correct = 0;
  for (std::size_t i = 0; i < labeled.size(); ++i)
    if (predict(model, std::span(counts).subspan(i * n, n)) == labeled.label(i))
      ++correct;
  return static_cast<double>(correct) / static_cast<double>(labeled.size());
}

int predict(const SnnModel& model, std::span<const std::uint32_t> counts)
{
  const auto& labels = model.label_map();
  const int classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> sum(static_cast<std::size_t>(std::max(classes, 0)), 0.0), members(sum.size(), 0.0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 0)
      continue;
    sum[static_cast<std::size_t>(labels[j])] += counts[j];
    members[static_cast<std::size_t>(labels[j])] += 1.0;
  }
  int best = -1;
  double best_mean = -1.0;
  for (std::size_t y = 0; y < sum.size(); ++y) {
    if (members[y] == 0.0)
      continue;
    const double mean = sum[y] / members[y];
    if (mean > best_mean) {
      best_mean = mean;
      best = static_cast<int>(y);
    }
  }
  return best;
}

int infer(const SnnModel& model, std::span<const float> image, const EvalOptions& options)
{
  model.label_map(); // fail before simulating
  Dataset one(1, image.size());
  one.add(image, 0);
  return predict(model, spike_counts(model, one, options));
}

double evaluate(const SnnModel& model, const Dataset& data, const EvalOptions& options)
{
  if (data.empty())
    throw InvalidValue("accuracy of an empty dataset is undefined");
  model.label_map();
  const auto n = model.config().neurons;
  const auto counts = spike_counts(model, data, options);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (predict(model, std::span(counts).subspan(i * n, n)) == data.label(i))
      ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

} // namespace voltsnn
