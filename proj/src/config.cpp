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

#include "voltsnn/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "voltsnn/error.hpp"

namespace voltsnn
{

namespace
{
namespace fs = std::filesystem;
using nlohmann::json;

/// Reads one JSON object, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class Section
{
public:
  Section(json j, std::string where) : j_(std::move(j)), where_(std::move(where))
  {
    if (!j_.is_object())
      throw ConfigError(where_ + " must be a JSON object");
  }

  bool has(const std::string& key)
  {
    used_.insert(key);
    return j_.contains(key);
  }

  template <class T> void get(const std::string& key, T& out)
  {
    if (!has(key))
      return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path(key) + " has the wrong type (got " + std::string(j_.at(key).type_name()) + ")");
    }
  }

  const json& raw(const std::string& key) const { return j_.at(key); }

  Section sub(const std::string& key)
  {
    return Section(has(key) ? j_.at(key) : json::object(), path(key));
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const
  {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key))
        throw ConfigError("unknown key '" + path(key) + "'");
  }

private:
  json j_;
  std::string where_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& what)
{
  if (!ok)
    throw ConfigError("invalid configuration: " + what);
}

std::string resolve(const std::string& base, const std::string& p)
{
  if (p.empty())
    return p;
  const fs::path path(p);
  return (path.is_absolute() ? path : fs::path(base) / path).lexically_normal().string();
}

void check_bers(const std::vector<double>& bers, const std::string& what, bool allow_zero, bool allow_empty)
{
  require(allow_empty || !bers.empty(), what + " must not be empty");
  for (std::size_t i = 0; i < bers.size(); ++i) {
    require(bers[i] >= 0.0 && bers[i] <= 1.0 && (allow_zero || bers[i] > 0.0), what + " entries must lie in " + (allow_zero ? "[0, 1]" : "(0, 1]"));
    require(i == 0 || bers[i] > bers[i - 1], what + " must be strictly increasing");
  }
}

template <class F> auto rethrow_as_config(const std::string& what, F&& f)
{
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}
} // namespace

VoltageConfig DramConfig::voltage(double v_supply) const
{
  return VoltageConfig(v_supply, energies, timing, energy_exponent, v_nominal, write_energy_factor);
}

ScheduleMode parse_schedule_mode(std::string_view name)
{
  if (name == "efficient")
    return ScheduleMode::Efficient;
  if (name == "conventional")
    return ScheduleMode::Conventional;
  if (name == "explicit")
    return ScheduleMode::Explicit;
  throw ConfigError("unknown FAT schedule '" + std::string(name) + "' (expected efficient, conventional or explicit)");
}

std::string to_string(ScheduleMode mode)
{
  switch (mode) {
  case ScheduleMode::Efficient:
    return "efficient";
  case ScheduleMode::Conventional:
    return "conventional";
  case ScheduleMode::Explicit:
    return "explicit";
  }
  return "?";
}

json to_json(const SnnConfig& c)
{
  const auto& n = c.neuron;
  const auto& s = c.stdp;
  const auto& p = c.presentation;
  return {{"inputs", c.inputs},
          {"neurons", c.neurons},
          {"inhibition", to_string(c.inhibition)},
          {"inhibition_strength", c.inhibition_strength},
          {"inhibition_floor", c.inhibition_floor},
          {"input_gain", c.input_gain},
          {"mean_weight", c.mean_weight},
          {"init_weight_max", c.init_weight_max},
          {"neuron",
           {{"v_rest", n.v_rest},
            {"v_reset", n.v_reset},
            {"v_thresh", n.v_thresh},
            {"tau_mem", n.tau_mem},
            {"refractory", n.refractory},
            {"theta_plus", n.theta_plus},
            {"theta_decay", n.theta_decay}}},
          {"stdp", {{"learning_rate", s.learning_rate}, {"target", s.target}, {"dependence", s.dependence}, {"tau_pre", s.tau_pre}}},
          {"presentation",
           {{"duration", p.duration},
            {"dt", p.dt},
            {"max_rate", p.max_rate},
            {"rate_boost", p.rate_boost},
            {"min_spikes", p.min_spikes},
            {"max_boosts", p.max_boosts}}}};
}

namespace
{
SnnConfig read_network(Section& sec)
{
  SnnConfig c;
  sec.get("inputs", c.inputs);
  sec.get("neurons", c.neurons);
  if (sec.has("inhibition")) {
    std::string mode;
    sec.get("inhibition", mode);
    c.inhibition = rethrow_as_config(sec.path("inhibition"), [&] { return parse_inhibition(mode); });
  }
  sec.get("inhibition_strength", c.inhibition_strength);
  sec.get("inhibition_floor", c.inhibition_floor);
  sec.get("input_gain", c.input_gain);
  sec.get("mean_weight", c.mean_weight);
  sec.get("init_weight_max", c.init_weight_max);

  auto n = sec.sub("neuron");
  n.get("v_rest", c.neuron.v_rest);
  n.get("v_reset", c.neuron.v_reset);
  n.get("v_thresh", c.neuron.v_thresh);
  n.get("tau_mem", c.neuron.tau_mem);
  n.get("refractory", c.neuron.refractory);
  n.get("theta_plus", c.neuron.theta_plus);
  n.get("theta_decay", c.neuron.theta_decay);
  n.finish();

  auto s = sec.sub("stdp");
  s.get("learning_rate", c.stdp.learning_rate);
  s.get("target", c.stdp.target);
  s.get("dependence", c.stdp.dependence);
  s.get("tau_pre", c.stdp.tau_pre);
  s.finish();

  auto p = sec.sub("presentation");
  p.get("duration", c.presentation.duration);
  p.get("dt", c.presentation.dt);
  p.get("max_rate", c.presentation.max_rate);
  p.get("rate_boost", c.presentation.rate_boost);
  p.get("min_spikes", c.presentation.min_spikes);
  p.get("max_boosts", c.presentation.max_boosts);
  p.finish();

  c.validate();
  return c;
}
} // namespace

SnnConfig snn_config_from_json(const json& j)
{
  Section sec(j, "network");
  auto c = read_network(sec);
  sec.finish();
  return c;
}

ExperimentConfig config_from_json(const json& j, const std::string& base_dir)
{
  ExperimentConfig c;
  Section root(j, "");
  root.get("seed", c.seed);
  root.get("output_dir", c.output_dir);
  c.output_dir = resolve(base_dir, c.output_dir);
  root.get("threads", c.threads);

  {
    auto d = root.sub("dataset");
    auto& ds = c.dataset;
    d.get("toy", ds.toy);
    d.get("toy_side", ds.toy_side);
    d.get("train_images", ds.train_images);
    d.get("train_labels", ds.train_labels);
    d.get("test_images", ds.test_images);
    d.get("test_labels", ds.test_labels);
    d.get("train_samples", ds.train_samples);
    d.get("test_samples", ds.test_samples);
    d.finish();
    for (auto* p : {&ds.train_images, &ds.train_labels, &ds.test_images, &ds.test_labels}) {
      require(ds.toy || !p->empty(), "dataset paths are required unless dataset.toy is set");
      *p = resolve(base_dir, *p);
    }
    require(!ds.toy || ds.toy_side >= 2, "dataset.toy_side must be at least 2");
  }
  {
    auto n = root.sub("network");
    c.network = read_network(n);
    n.finish();
    if (c.dataset.toy)
      require(c.network.inputs == c.dataset.toy_side * c.dataset.toy_side, "network.inputs must equal toy_side squared");
  }
  {
    auto t = root.sub("training");
    t.get("epochs", c.epochs);
    t.finish();
    require(c.epochs >= 1, "training.epochs must be at least 1");
  }
  {
    auto q = root.sub("quantization");
    q.get("format", c.format);
    std::string rounding = to_string(c.rounding);
    q.get("rounding", rounding);
    q.finish();
    rethrow_as_config("quantization.format", [&] { return WeightFormat::parse(c.format); });
    c.rounding = rethrow_as_config("quantization.rounding", [&] { return parse_rounding(rounding); });
  }
  {
    auto d = root.sub("dram");
    auto g = d.sub("geometry");
    auto& geo = c.dram.geometry;
    g.get("channels", geo.channels);
    g.get("ranks", geo.ranks);
    g.get("chips", geo.chips);
    g.get("banks", geo.banks);
    g.get("subarrays", geo.subarrays);
    g.get("rows", geo.rows);
    g.get("columns", geo.columns);
    g.get("bytes_per_column", geo.bytes_per_column);
    g.finish();
    rethrow_as_config("dram.geometry", [&] {
      geo.validate();
      return 0;
    });
    auto e = d.sub("energies_nj");
    e.get("hit", c.dram.energies.hit);
    e.get("miss", c.dram.energies.miss);
    e.get("conflict", c.dram.energies.conflict);
    e.finish();
    auto t = d.sub("timing_ns");
    t.get("t_rcd", c.dram.timing.t_rcd);
    t.get("t_ras", c.dram.timing.t_ras);
    t.get("t_rp", c.dram.timing.t_rp);
    t.get("t_burst", c.dram.timing.t_burst);
    t.finish();
    d.get("v_nominal", c.dram.v_nominal);
    d.get("energy_exponent", c.dram.energy_exponent);
    d.get("write_energy_factor", c.dram.write_energy_factor);
    d.get("flip_probability", c.dram.flip_probability);
    d.finish();
    rethrow_as_config("dram", [&] { return c.dram.voltage(c.dram.v_nominal); });
    require(c.dram.flip_probability > 0.0 && c.dram.flip_probability <= 1.0, "dram.flip_probability must lie in (0, 1]");
  }
  {
    auto m = root.sub("mapping");
    std::string policy = to_string(c.mapping), variant = to_string(c.variant);
    m.get("policy", policy);
    m.get("variant", variant);
    if (m.has("ber_th")) {
      const auto& v = m.raw("ber_th");
      if (v.is_string() && v.get<std::string>() == "profile")
        c.ber_th_from_profile = true;
      else if (v.is_number())
        c.ber_th = v.get<double>();
      else
        throw ConfigError("mapping.ber_th must be a number or \"profile\"");
    }
    m.get("max_accuracy_drop", c.max_accuracy_drop);
    m.finish();
    c.mapping = rethrow_as_config("mapping.policy", [&] { return parse_mapping_policy(policy); });
    c.variant = rethrow_as_config("mapping.variant", [&] { return parse_mapping_variant(variant); });
    require(c.ber_th >= 0.0 && c.ber_th <= 1.0, "mapping.ber_th must lie in [0, 1]");
    require(c.max_accuracy_drop >= 0.0 && c.max_accuracy_drop <= 1.0, "mapping.max_accuracy_drop must lie in [0, 1]");
  }
  {
    auto p = root.sub("profile");
    p.get("bers", c.profile_bers);
    p.get("trials", c.profile_trials);
    std::string policy = to_string(c.profile_mapping);
    p.get("mapping", policy);
    p.finish();
    c.profile_mapping = rethrow_as_config("profile.mapping", [&] { return parse_mapping_policy(policy); });
    check_bers(c.profile_bers, "profile.bers", true, false);
    require(c.profile_trials >= 1, "profile.trials must be at least 1");
  }
  {
    auto f = root.sub("fat");
    std::string mode = to_string(c.schedule);
    f.get("schedule", mode);
    f.get("bers", c.schedule_bers);
    f.get("region_a_drop", c.region_a_drop);
    f.get("learning_rate_scale", c.learning_rate_scale);
    f.get("collapse_drop", c.collapse_drop);
    f.get("epoch_cost", c.epoch_cost);
    f.get("comparison_bers", c.comparison_bers);
    f.finish();
    c.schedule = parse_schedule_mode(mode);
    if (c.schedule == ScheduleMode::Explicit)
      check_bers(c.schedule_bers, "fat.bers", false, false);
    else
      require(c.schedule_bers.empty(), "fat.bers is only used with the explicit schedule");
    require(c.region_a_drop >= 0.0, "fat.region_a_drop must be non-negative");
    require(c.learning_rate_scale > 0.0, "fat.learning_rate_scale must be positive");
    require(c.collapse_drop >= 0.0, "fat.collapse_drop must be non-negative");
    require(c.epoch_cost > 0.0, "fat.epoch_cost must be positive");
    check_bers(c.comparison_bers, "fat.comparison_bers", true, true);
  }
  {
    auto e = root.sub("energy");
    e.get("voltages", c.energy_voltages);
    e.get("formats", c.energy_formats);
    e.get("passes", c.energy_passes);
    e.finish();
    require(!c.energy_voltages.empty() && !c.energy_formats.empty(), "energy.voltages and energy.formats must not be empty");
    for (double v : c.energy_voltages)
      rethrow_as_config("energy.voltages", [&] { return c.dram.voltage(v); });
    for (const auto& f : c.energy_formats)
      rethrow_as_config("energy.formats", [&] { return WeightFormat::parse(f); });
    require(c.energy_passes >= 1, "energy.passes must be at least 1");
  }
  {
    auto s = root.sub("selection");
    s.get("mu", c.mus);
    s.get("epsilon", c.epsilons);
    s.get("operating_voltage", c.operating_voltage);
    s.get("operating_ber", c.operating_ber);
    s.get("results", c.selection_results);
    s.finish();
    require(!c.mus.empty() && !c.epsilons.empty(), "selection.mu and selection.epsilon must not be empty");
    for (double x : c.mus)
      require(x >= 0.0, "selection.mu entries must be non-negative");
    for (double x : c.epsilons)
      require(x >= 0.0, "selection.epsilon entries must be non-negative");
    rethrow_as_config("selection.operating_voltage", [&] { return c.dram.voltage(c.operating_voltage); });
    require(c.operating_ber >= 0.0 && c.operating_ber <= 1.0, "selection.operating_ber must lie in [0, 1]");
    for (auto& r : c.selection_results)
      r = resolve(base_dir, r);
  }
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

json to_json(const ExperimentConfig& c)
{
  const auto& g = c.dram.geometry;
  const auto& ds = c.dataset;
  json fat = {{"schedule", to_string(c.schedule)},
              {"region_a_drop", c.region_a_drop},
              {"learning_rate_scale", c.learning_rate_scale},
              {"collapse_drop", c.collapse_drop},
              {"epoch_cost", c.epoch_cost},
              {"comparison_bers", c.comparison_bers}};
  if (c.schedule == ScheduleMode::Explicit)
    fat["bers"] = c.schedule_bers;
  return {{"seed", c.seed},
          {"output_dir", c.output_dir},
          {"threads", c.threads},
          {"dataset",
           {{"toy", ds.toy},
            {"toy_side", ds.toy_side},
            {"train_images", ds.train_images},
            {"train_labels", ds.train_labels},
            {"test_images", ds.test_images},
            {"test_labels", ds.test_labels},
            {"train_samples", ds.train_samples},
            {"test_samples", ds.test_samples}}},
          {"network", to_json(c.network)},
          {"training", {{"epochs", c.epochs}}},
          {"quantization", {{"format", c.format}, {"rounding", to_string(c.rounding)}}},
          {"dram",
           {{"geometry",
             {{"channels", g.channels},
              {"ranks", g.ranks},
              {"chips", g.chips},
              {"banks", g.banks},
              {"subarrays", g.subarrays},
              {"rows", g.rows},
              {"columns", g.columns},
              {"bytes_per_column", g.bytes_per_column}}},
            {"energies_nj", {{"hit", c.dram.energies.hit}, {"miss", c.dram.energies.miss}, {"conflict", c.dram.energies.conflict}}},
            {"timing_ns",
             {{"t_rcd", c.dram.timing.t_rcd}, {"t_ras", c.dram.timing.t_ras}, {"t_rp", c.dram.timing.t_rp}, {"t_burst", c.dram.timing.t_burst}}},
            {"v_nominal", c.dram.v_nominal},
            {"energy_exponent", c.dram.energy_exponent},
            {"write_energy_factor", c.dram.write_energy_factor},
            {"flip_probability", c.dram.flip_probability}}},
          {"mapping",
           {{"policy", to_string(c.mapping)},
            {"variant", to_string(c.variant)},
            {"ber_th", c.ber_th_from_profile ? json("profile") : json(c.ber_th)},
            {"max_accuracy_drop", c.max_accuracy_drop}}},
          {"profile", {{"bers", c.profile_bers}, {"trials", c.profile_trials}, {"mapping", to_string(c.profile_mapping)}}},
          {"fat", fat},
          {"energy", {{"voltages", c.energy_voltages}, {"formats", c.energy_formats}, {"passes", c.energy_passes}}},
          {"selection",
           {{"mu", c.mus},
            {"epsilon", c.epsilons},
            {"operating_voltage", c.operating_voltage},
            {"operating_ber", c.operating_ber},
            {"results", c.selection_results}}}};
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(config).dump())));
  return buf;
}

} // namespace voltsnn
