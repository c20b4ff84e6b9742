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

#include "voltsnn/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "voltsnn/checkpoint.hpp"
#include "voltsnn/dram_energy.hpp"
#include "voltsnn/dram_error.hpp"
#include "voltsnn/error.hpp"
#include "voltsnn/fat.hpp"
#include "voltsnn/parallel.hpp"
#include "voltsnn/selection.hpp"

namespace voltsnn
{

namespace
{
namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kInitStream = 0x4e4554;
constexpr std::uint64_t kEpochStream = 0x45504f4348;
constexpr std::uint64_t kLabelStream = 0x4c4142;
constexpr std::uint64_t kProfileStream = 0x50524f46;
constexpr std::uint64_t kFatStream = 0x464154;
constexpr std::uint64_t kCompareStream = 0x434d50;
constexpr std::uint64_t kEnergyStream = 0x454e52;

class Run
{
public:
  Run(const ExperimentConfig& config, std::string command) : c(config), command_(std::move(command)), hash_(config_hash(config))
  {
    threads = worker_threads();
    if (config.threads > 0)
      threads = std::min(threads, config.threads);
    fs::create_directories(c.output_dir);
  }

  const ExperimentConfig& c;
  unsigned threads = 1;

  fs::path path(const std::string& name) const { return fs::path(c.output_dir) / name; }

  json provenance() const { return {{"config_hash", hash_}, {"seed", c.seed}, {"command", command_}}; }

  void write_json(const std::string& name, json j) const
  {
    j["provenance"] = provenance();
    write_file(name, j.dump(2) + "\n");
  }

  void write_csv(const std::string& name, const std::string& body) const
  {
    write_file(name, "# config_hash=" + hash_ + " seed=" + std::to_string(c.seed) + " command=" + command_ + "\n" + body);
  }

  /// Written beside the target, then renamed over it.
  void write_file(const std::string& name, const std::string& text) const
  {
    const auto target = path(name);
    fs::create_directories(target.parent_path());
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out)
        throw DataError("cannot write " + tmp.string());
      out << text;
      if (!out.flush())
        throw DataError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
  }

  json read_json(const std::string& name, const std::string& producer) const { return read_json_at(path(name), producer); }

  static json read_json_at(const fs::path& p, const std::string& producer)
  {
    std::ifstream in(p);
    if (!in)
      throw DataError("missing " + p.string() + " (run '" + producer + "' first)");
    try {
      return json::parse(in);
    } catch (const json::parse_error& e) {
      throw DataError(p.string() + ": " + e.what());
    }
  }

  SnnModel load_model(const std::string& name = "model.json") const
  {
    if (!fs::exists(path(name)))
      throw DataError("missing " + path(name).string() + " (run 'train' first)");
    return load_checkpoint(path(name).string());
  }

  std::pair<Dataset, Dataset> datasets() const
  {
    const auto& d = c.dataset;
    Dataset train, test;
    if (d.toy) {
      train = make_toy_dataset(d.train_samples ? d.train_samples : 40, d.toy_side);
      test = make_toy_dataset(d.test_samples ? d.test_samples : 20, d.toy_side);
    } else {
      train = load_idx_dataset(d.train_images, d.train_labels, d.train_samples);
      test = load_idx_dataset(d.test_images, d.test_labels, d.test_samples);
    }
    if (train.pixels() != c.network.inputs || test.pixels() != c.network.inputs)
      throw ConfigError("network.inputs is " + std::to_string(c.network.inputs) + " but the images have " + std::to_string(train.pixels()) +
                        " pixels");
    if (train.empty() || test.empty())
      throw DataError("training and test sets must not be empty");
    return {std::move(train), std::move(test)};
  }

  DramStack stack(MappingPolicy policy, double ber_th) const
  {
    DramStack s;
    s.geometry = c.dram.geometry;
    s.format = WeightFormat::parse(c.format);
    s.rounding = c.rounding;
    s.mapping = policy;
    s.variant = c.variant;
    s.ber_th = ber_th;
    s.flips = FlipPolicy{c.dram.flip_probability};
    return s;
  }

  /// Tolerable subarray BER: fixed in the config or taken from profile.json.
  double ber_th() const
  {
    if (!c.ber_th_from_profile)
      return c.ber_th;
    const auto p = read_json("profile.json", "profile");
    if (p.at("ber_th").is_null())
      throw DataError("profile.json has no tolerable BER; every profiled BER exceeds the allowed accuracy drop");
    return p.at("ber_th").get<double>();
  }

  EvalOptions eval(std::uint64_t stream, const WeightMatrix* w = nullptr) const { return {derive_seed(c.seed, {stream}), w, threads}; }

private:
  std::string command_;
  std::string hash_;
};

json profile_points_json(const AccuracyProfile& p)
{
  json pts = json::array();
  for (const auto& x : p.points)
    pts.push_back({{"ber", x.ber}, {"mean", x.mean}, {"stddev", x.stddev}, {"trials", x.trials}});
  return pts;
}

double mean_at(const json& points, double ber, const std::string& key, const std::string& source)
{
  for (const auto& p : points)
    if (p.at("ber").get<double>() == ber)
      return p.at(key).get<double>();
  throw DataError(source + " has no entry for BER " + std::to_string(ber));
}

/// Weight-read energy of a network stored in one format under one policy.
struct EnergyModel
{
  const Run& run;
  double ber_th;

  AccessTrace trace(std::size_t n_weights, const WeightFormat& fmt, MappingPolicy policy) const
  {
    const auto& geo = run.c.dram.geometry;
    const std::size_t bytes = n_weights * static_cast<std::size_t>(fmt.bytes_per_element());
    const auto pattern = TracePattern::repeated_epochs(run.c.energy_passes);
    if (policy == MappingPolicy::Baseline)
      return generate_trace(map_baseline(geo, bytes), pattern);
    // Placed once, for the weak cells of the operating point.
    const auto split = FlipPolicy{run.c.dram.flip_probability}.split(run.c.operating_ber);
    const auto map = WeakCellMap::generate(geo, split.weak_fraction, split.flip_probability, derive_seed(run.c.seed, {kEnergyStream}));
    return generate_trace(map_enforcesnn(geo, subarray_bers(map), ber_th, bytes, run.c.variant), pattern);
  }

  EnergyReport report(std::size_t n_weights, const WeightFormat& fmt, MappingPolicy policy, double v) const
  {
    return simulate_trace(trace(n_weights, fmt, policy), run.c.dram.voltage(v), run.c.dram.geometry);
  }
};
} // namespace

int exit_code_for(const std::exception& e) noexcept
{
  if (dynamic_cast<const ConfigError*>(&e))
    return kExitConfig;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e))
    return kExitData;
  if (dynamic_cast<const CapacityError*>(&e))
    return kExitCapacity;
  return kExitOther;
}

void cmd_train(const ExperimentConfig& config, std::ostream& log)
{
  Run run(config, "train");
  const auto [train, test] = run.datasets();
  SnnModel model(config.network, derive_seed(config.seed, {kInitStream}));
  for (std::size_t e = 0; e < config.epochs; ++e) {
    train_epoch(model, train, derive_seed(config.seed, {kEpochStream, e}));
    log << "epoch " << e + 1 << "/" << config.epochs << " done\n";
  }
  const double label_acc = assign_labels(model, train, run.eval(kLabelStream));
  const double fp32_acc = evaluate(model, test, run.eval(kProfileStream));
  const auto stack = run.stack(MappingPolicy::Baseline, config.ber_th);
  const auto stored = read_back_weights(model.weights(), stack, 0.0, config.seed);
  const double q_acc = evaluate(model, test, run.eval(kProfileStream, &stored));
  log << "test accuracy: fp32 " << fp32_acc << ", " << config.format << " " << q_acc << "\n";

  run.write_json("model.json", checkpoint_to_json(model));
  run.write_json("train.json", {{"epochs", config.epochs},
                                {"train_samples", train.size()},
                                {"test_samples", test.size()},
                                {"neurons", config.network.neurons},
                                {"n_weights", model.weights().size()},
                                {"train_label_accuracy", label_acc},
                                {"test_accuracy_fp32", fp32_acc},
                                {"format", config.format},
                                {"test_accuracy_quantized", q_acc}});
}

void cmd_profile(const ExperimentConfig& config, std::ostream& log)
{
  Run run(config, "profile");
  const auto model = run.load_model();
  const auto [train, test] = run.datasets();
  (void)train;
  const auto stack = run.stack(config.profile_mapping, config.ber_th);
  const auto prof = accuracy_profile(model, config.profile_bers, stack, test, {config.profile_trials, derive_seed(config.seed, {kProfileStream}), run.threads});

  json ber_th = nullptr;
  std::vector<std::string> warnings;
  try {
    ber_th = determine_ber_th(prof, config.max_accuracy_drop);
  } catch (const InvalidValue& e) {
    warnings.push_back(e.what());
  }
  const double cap = config.ber_th_from_profile ? (ber_th.is_null() ? 0.0 : ber_th.get<double>()) : config.ber_th;
  const auto schedule = derive_fat_schedule(prof, config.region_a_drop, cap);
  warnings.insert(warnings.end(), schedule.warnings.begin(), schedule.warnings.end());
  for (const auto& w : warnings)
    log << "warning: " << w << "\n";
  log << "baseline accuracy " << prof.baseline << "\n";

  std::ostringstream csv;
  write_profile_csv(csv, prof);
  run.write_csv("profile.csv", csv.str());
  run.write_json("profile.json", {{"baseline", prof.baseline},
                                  {"mapping", to_string(config.profile_mapping)},
                                  {"points", profile_points_json(prof)},
                                  {"ber_th", ber_th},
                                  {"efficient_schedule", schedule.bers},
                                  {"warnings", warnings}});
}

void cmd_fat(const ExperimentConfig& config, std::ostream& log)
{
  Run run(config, "fat");
  const auto model0 = run.load_model();
  const double ber_th = run.ber_th();

  FatSchedule schedule;
  switch (config.schedule) {
  case ScheduleMode::Efficient:
    schedule.bers = run.read_json("profile.json", "profile").at("efficient_schedule").get<std::vector<double>>();
    if (schedule.bers.empty())
      throw DataError("the profile yields an empty efficient FAT schedule");
    break;
  case ScheduleMode::Conventional:
    schedule = conventional_schedule();
    break;
  case ScheduleMode::Explicit:
    schedule = explicit_schedule(config.schedule_bers);
    break;
  }

  const auto [train, test] = run.datasets();
  const auto stack = run.stack(config.mapping, ber_th);
  const auto result = fault_aware_train(model0, schedule.bers, stack, train, test,
                                        {derive_seed(config.seed, {kFatStream}), config.collapse_drop, config.learning_rate_scale, run.threads});
  for (const auto& l : result.levels)
    log << "level " << l.level << " BER " << l.ber << ": accuracy " << l.accuracy << (l.collapse ? " (collapse)" : "") << "\n";

  // Both models face the same weak-cell maps and spike trains.
  SnnModel before = model0;
  if (!before.labeled())
    assign_labels(before, train, run.eval(kLabelStream));
  const ProfileOptions popts{config.profile_trials, derive_seed(config.seed, {kCompareStream}), run.threads};
  const auto without = accuracy_profile(before, config.comparison_bers, stack, test, popts);
  const auto with = accuracy_profile(result.model, config.comparison_bers, stack, test, popts);

  std::ostringstream cmp;
  cmp << "ber,without_fat_mean,without_fat_stddev,with_fat_mean,with_fat_stddev\n";
  for (std::size_t i = 0; i < without.points.size(); ++i)
    cmp << without.points[i].ber << ',' << without.points[i].mean << ',' << without.points[i].stddev << ',' << with.points[i].mean << ','
        << with.points[i].stddev << '\n';
  std::ostringstream levels;
  write_fat_log_csv(levels, result.levels);

  const auto cost = retraining_cost(schedule, {config.epoch_cost, config.epoch_cost}, conventional_schedule().bers.size(), {1.0, 1.0});
  json lv = json::array();
  for (const auto& l : result.levels)
    lv.push_back({{"level", l.level}, {"ber", l.ber}, {"train_error", l.train_error}, {"accuracy", l.accuracy}, {"collapse", l.collapse}});

  run.write_json("fat_model.json", checkpoint_to_json(result.model));
  run.write_csv("fat_levels.csv", levels.str());
  run.write_csv("fat_comparison.csv", cmp.str());
  run.write_json("fat.json", {{"schedule_mode", to_string(config.schedule)},
                              {"schedule", schedule.bers},
                              {"ber_th", ber_th},
                              {"mapping", to_string(config.mapping)},
                              {"baseline", result.baseline},
                              {"accuracy", result.accuracy},
                              {"levels", lv},
                              {"without_fat", profile_points_json(without)},
                              {"with_fat", profile_points_json(with)},
                              {"retraining",
                               {{"levels", schedule.bers.size()},
                                {"reference_levels", conventional_schedule().bers.size()},
                                {"epoch_cost", config.epoch_cost},
                                {"speedup", cost.speedup},
                                {"energy_saving", cost.energy_saving}}}});
}

void cmd_energy(const ExperimentConfig& config, std::ostream& log)
{
  Run run(config, "energy");
  const EnergyModel model{run, run.ber_th()};
  const std::size_t n_weights = config.network.inputs * config.network.neurons;
  const auto reference = model.report(n_weights, WeightFormat::fp32(), MappingPolicy::Baseline, config.dram.v_nominal);

  std::ostringstream csv;
  csv << "format,policy,v_supply,hits,misses,conflicts,energy_nj,latency_ns,bytes,throughput_bytes_per_s,energy_saving,speedup\n";
  json rows = json::array();
  for (const auto& name : config.energy_formats) {
    const auto fmt = WeightFormat::parse(name);
    for (auto policy : {MappingPolicy::Baseline, MappingPolicy::EnforceSnn}) {
      const auto trace = model.trace(n_weights, fmt, policy);
      for (double v : config.energy_voltages) {
        const auto r = simulate_trace(trace, config.dram.voltage(v), config.dram.geometry);
        const auto cmp = compare_reports(reference, r);
        csv << fmt.name() << ',' << to_string(policy) << ',' << v << ',' << r.counts.hits << ',' << r.counts.misses << ',' << r.counts.conflicts
            << ',' << r.energy_nj << ',' << r.latency_ns << ',' << r.bytes << ',' << r.throughput_bytes_per_s << ',' << cmp.energy_saving << ','
            << cmp.speedup << '\n';
        rows.push_back({{"format", fmt.name()},
                        {"policy", to_string(policy)},
                        {"v_supply", v},
                        {"report", to_json(r)},
                        {"energy_saving", cmp.energy_saving},
                        {"speedup", cmp.speedup}});
      }
    }
  }
  log << "energy: " << rows.size() << " configurations against fp32/baseline at " << config.dram.v_nominal << " V\n";
  run.write_csv("energy.csv", csv.str());
  run.write_json("energy.json", {{"n_weights", n_weights}, {"reference", to_json(reference)}, {"rows", rows}});
}

void cmd_select(const ExperimentConfig& config, std::ostream& log)
{
  Run run(config, "select");
  const EnergyModel energy{run, run.ber_th()};
  const auto fxp = WeightFormat::parse(config.format);
  const double vn = config.dram.v_nominal, vo = config.operating_voltage, ber = config.operating_ber;

  std::vector<fs::path> dirs{config.output_dir};
  for (const auto& d : config.selection_results)
    dirs.emplace_back(d);

  std::vector<Candidate> cs;
  for (const auto& dir : dirs) {
    const auto train = Run::read_json_at(dir / "train.json", "train");
    const auto profile = Run::read_json_at(dir / "profile.json", "profile");
    const auto fat = Run::read_json_at(dir / "fat.json", "fat");
    const std::string tag = dirs.size() > 1 ? dir.filename().string() + "/" : "";
    const auto n = train.at("n_weights").get<std::size_t>();

    const double e_fp = energy.report(n, WeightFormat::fp32(), MappingPolicy::Baseline, vn).energy_nj;
    const double e_fx = energy.report(n, fxp, config.mapping, vn).energy_nj;
    const double e_fx_low = energy.report(n, fxp, config.mapping, vo).energy_nj;
    const auto bits = static_cast<unsigned>(fxp.bit_width());
    cs.push_back({tag + "fp32_accurate", train.at("test_accuracy_fp32").get<double>(), n, 32, e_fp, e_fp, 0.0, vn});
    cs.push_back({tag + "fxp_accurate", profile.at("baseline").get<double>(), n, bits, e_fx, e_fx, 0.0, vn});
    cs.push_back({tag + "fxp_approx", mean_at(fat.at("without_fat"), ber, "mean", (dir / "fat.json").string()), n, bits, e_fx_low, e_fx, ber, vo});
    cs.push_back({tag + "fxp_approx_fat", mean_at(fat.at("with_fat"), ber, "mean", (dir / "fat.json").string()), n, bits, e_fx_low, e_fx, ber, vo});
  }

  std::vector<std::string> warnings;
  for (const auto& c : cs)
    energy_norm(c, &warnings);
  for (const auto& w : warnings)
    log << "warning: " << w << "\n";

  const auto rows = reward_grid(cs, config.mus, config.epsilons);
  std::ostringstream csv;
  write_reward_csv(csv, cs, rows);
  json grid = json::array();
  for (const auto& r : rows)
    if (r.selected) {
      grid.push_back({{"mu", r.mu}, {"epsilon", r.epsilon}, {"selected", cs[r.candidate].id}, {"reward", r.reward}});
      log << "mu " << r.mu << " epsilon " << r.epsilon << ": " << cs[r.candidate].id << "\n";
    }
  json cj = json::array();
  for (const auto& c : cs)
    cj.push_back(to_json(c));
  run.write_json("candidates.json", {{"candidates", cj}, {"warnings", warnings}});
  run.write_csv("reward.csv", csv.str());
  run.write_json("selection.json", {{"grid", grid}});
}

void cmd_report(const ExperimentConfig& config, std::ostream& log)
{
  Run run(config, "report");
  std::size_t written = 0;
  auto available = [&](const std::string& name) {
    const bool ok = fs::exists(run.path(name));
    if (!ok)
      log << "skipping series from " << name << " (not found)\n";
    return ok;
  };

  if (available("profile.json")) {
    const auto p = run.read_json("profile.json", "profile");
    std::ostringstream out;
    out << "ber,accuracy_mean,accuracy_stddev\n";
    for (const auto& x : p.at("points"))
      out << x.at("ber").get<double>() << ',' << x.at("mean").get<double>() << ',' << x.at("stddev").get<double>() << '\n';
    run.write_csv("plots/accuracy_vs_ber.csv", out.str());
    ++written;
  }
  if (available("fat.json")) {
    const auto f = run.read_json("fat.json", "fat");
    std::ostringstream out;
    out << "ber,without_fat,with_fat\n";
    const auto& a = f.at("without_fat");
    const auto& b = f.at("with_fat");
    for (std::size_t i = 0; i < a.size(); ++i)
      out << a[i].at("ber").get<double>() << ',' << a[i].at("mean").get<double>() << ',' << b[i].at("mean").get<double>() << '\n';
    run.write_csv("plots/fat_accuracy_vs_ber.csv", out.str());
    ++written;
  }
  if (available("energy.json")) {
    const auto e = run.read_json("energy.json", "energy");
    std::ostringstream out;
    out << "format,policy,v_supply,normalized_energy,speedup\n";
    for (const auto& r : e.at("rows"))
      out << r.at("format").get<std::string>() << ',' << r.at("policy").get<std::string>() << ',' << r.at("v_supply").get<double>() << ','
          << 1.0 - r.at("energy_saving").get<double>() << ',' << r.at("speedup").get<double>() << '\n';
    run.write_csv("plots/energy_vs_voltage.csv", out.str());
    ++written;
  }
  if (available("selection.json")) {
    const auto s = run.read_json("selection.json", "select");
    std::ostringstream out;
    out << "mu,epsilon,selected,reward\n";
    for (const auto& g : s.at("grid"))
      out << g.at("mu").get<double>() << ',' << g.at("epsilon").get<double>() << ',' << g.at("selected").get<std::string>() << ','
          << g.at("reward").get<double>() << '\n';
    run.write_csv("plots/selection_grid.csv", out.str());
    ++written;
  }
  if (written == 0)
    throw DataError("nothing to report in " + config.output_dir);
  log << written << " plot series written to " << run.path("plots").string() << "\n";
}

int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& log)
{
  static const std::map<std::string, void (*)(const ExperimentConfig&, std::ostream&)> table{
      {"train", cmd_train}, {"profile", cmd_profile}, {"fat", cmd_fat}, {"energy", cmd_energy}, {"select", cmd_select}, {"report", cmd_report}};
  const auto it = table.find(command);
  if (it == table.end()) {
    log << "unknown command '" << command << "'\n";
    return kExitUsage;
  }
  it->second(config, log);
  return kExitOk;
}

int run_command_file(const std::string& command, const std::string& config_path, std::optional<std::uint64_t> seed,
                     std::optional<std::string> out_dir, std::ostream& log)
{
  try {
    auto config = load_config(config_path);
    if (seed)
      config.seed = *seed;
    if (out_dir)
      config.output_dir = fs::path(*out_dir).lexically_normal().string();
    return run_command(command, config, log);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

} // namespace voltsnn
