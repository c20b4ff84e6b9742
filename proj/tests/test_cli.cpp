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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "voltsnn/checkpoint.hpp"
#include "voltsnn/commands.hpp"
#include "voltsnn/config.hpp"
#include "voltsnn/error.hpp"

using namespace voltsnn;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
fs::path scratch(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / "voltsnn_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json toy_document(const fs::path& out)
{
  return {{"seed", 7},
          {"output_dir", out.string()},
          {"dataset", {{"toy", true}, {"toy_side", 8}, {"train_samples", 40}, {"test_samples", 20}}},
          {"network", {{"inputs", 64}, {"neurons", 8}}},
          {"training", {{"epochs", 1}}},
          {"profile", {{"bers", {0, 1e-4, 1e-3, 1e-2, 1e-1}}, {"trials", 3}}},
          {"fat", {{"comparison_bers", {1e-3, 1e-2}}}}};
}

fs::path write_config(const fs::path& dir, const json& doc)
{
  const auto p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& cmd, const fs::path& config)
{
  std::ostringstream log;
  const int code = run_command_file(cmd, config.string(), std::nullopt, std::nullopt, log);
  if (code != 0)
    MESSAGE(cmd << ": " << log.str());
  return code;
}
} // namespace

TEST_CASE("config defaults, validation and hash")
{
  const json minimal = {{"dataset", {{"train_images", "a"}, {"train_labels", "b"}, {"test_images", "c"}, {"test_labels", "d"}}}};
  CHECK_THROWS_AS(config_from_json(json::object()), ConfigError);
  const auto c = config_from_json(minimal);
  CHECK(c.seed == 1);
  CHECK(c.network.neurons == 100);
  CHECK(c.format == "fxp8_signed_q1_6");
  CHECK(c.mapping == MappingPolicy::EnforceSnn);
  CHECK(c.ber_th == 1e-2);
  CHECK(c.learning_rate_scale == 0.1);
  CHECK(c.mus == std::vector<double>{0, 1, 5, 10});
  CHECK(config_from_json(to_json(c)) == c);
  CHECK(config_hash(c) == config_hash(config_from_json(to_json(c))));
  CHECK(config_hash(c).size() == 16);

  auto other = c;
  other.seed = 2;
  CHECK(config_hash(other) != config_hash(c));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);

  for (const char* bad : {R"({"sed": 1})", R"({"network": {"neuron": {"tau": 5}}})", R"({"seed": "one"})",
                          R"({"quantization": {"format": "fxp7"}})", R"({"profile": {"bers": [0.01, 0.001]}})",
                          R"({"energy": {"voltages": [0.9]}})", R"({"selection": {"mu": [-1]}})", R"({"fat": {"schedule": "explicit"}})",
                          R"({"dataset": {"toy": false, "train_images": ""}})"}) {
    json doc = minimal;
    doc.merge_patch(json::parse(bad));
    CHECK_THROWS_AS_MESSAGE(config_from_json(doc), ConfigError, bad);
  }
  json profile_th = minimal;
  profile_th["mapping"] = {{"ber_th", "profile"}};
  CHECK(config_from_json(profile_th).ber_th_from_profile);

  const auto rel = config_from_json({{"output_dir", "o"}, {"dataset", {{"train_images", "a"}, {"train_labels", "b"}, {"test_images", "c"}, {"test_labels", "d"}}}},
                                    "/base/dir");
  CHECK(rel.output_dir == "/base/dir/o");
  CHECK(rel.dataset.train_images == "/base/dir/a");
}

TEST_CASE("shipped configs parse")
{
  const fs::path root = fs::path(VOLTSNN_DATA_DIR).parent_path() / "configs";
  for (const char* name : {"toy.json", "mnist_n100.json"})
    CHECK_NOTHROW(load_config((root / name).string()));
}

TEST_CASE("checkpoint round trip")
{
  SnnConfig sc;
  sc.inputs = 16;
  sc.neurons = 3;
  SnnModel m(sc, 4);
  m.set_label_map({0, 2, -1});
  const auto back = checkpoint_from_json(checkpoint_to_json(m));
  CHECK(back == m);

  const auto q = checkpoint_from_json(checkpoint_to_json(m, WeightFormat::parse("fxp8_signed_q1_6")));
  for (std::size_t i = 0; i < q.weights().size(); ++i)
    CHECK(std::abs(q.weights().data()[i] - m.weights().data()[i]) < 1.0f / 64);
  CHECK(checkpoint_to_json(m, WeightFormat::parse("fxp8_signed_q1_6"))["weights"]["codes"].get<std::string>().size() == 96);

  auto j = checkpoint_to_json(m);
  j["weights"]["codes"] = "zz";
  CHECK_THROWS_AS(checkpoint_from_json(j), DataError);
  j = checkpoint_to_json(m);
  j["container"] = "other";
  CHECK_THROWS_AS(checkpoint_from_json(j), DataError);
  j = checkpoint_to_json(m);
  j["network"]["extra"] = 1;
  CHECK_THROWS_AS(checkpoint_from_json(j), DataError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.json"), DataError);
}

TEST_CASE("toy pipeline end to end")
{
  const auto dir = scratch("pipeline");
  const auto out = dir / "out";
  const auto config = write_config(dir, toy_document(out));

  const auto start = std::chrono::steady_clock::now();
  for (const char* cmd : {"train", "profile", "fat", "energy", "select", "report"})
    REQUIRE(run(cmd, config) == kExitOk);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("toy pipeline took " << seconds << " s");
  CHECK(seconds < 60.0);

  const auto hash = config_hash(load_config(config.string()));
  std::map<std::string, std::string> first;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file())
      continue;
    const auto text = slurp(entry.path());
    CHECK_MESSAGE(text.find(hash) != std::string::npos, entry.path().string());
    CHECK(text.find("seed") != std::string::npos);
    first[entry.path().string()] = text;
  }
  CHECK(first.size() == 17);

  for (const char* cmd : {"train", "profile", "fat", "energy", "select", "report"})
    REQUIRE(run(cmd, config) == kExitOk);
  for (const auto& [path, text] : first)
    CHECK_MESSAGE(slurp(path) == text, path);

  SUBCASE("energy at nominal voltage, fp32, baseline mapping saves nothing")
  {
    const auto e = json::parse(slurp(out / "energy.json"));
    bool found = false;
    for (const auto& r : e["rows"])
      if (r["format"] == "fp32" && r["policy"] == "baseline" && r["v_supply"] == 1.35) {
        CHECK(r["energy_saving"].get<double>() == 0.0);
        CHECK(r["speedup"].get<double>() == 1.0);
        found = true;
      }
    CHECK(found);
  }
  SUBCASE("mu = epsilon = 0 selects the most accurate candidate")
  {
    const auto cs = json::parse(slurp(out / "candidates.json"))["candidates"];
    double best = 0;
    for (const auto& c : cs)
      best = std::max(best, c["accuracy"].get<double>());
    const auto grid = json::parse(slurp(out / "selection.json"))["grid"];
    REQUIRE(grid[0]["mu"] == 0);
    REQUIRE(grid[0]["epsilon"] == 0);
    for (const auto& c : cs)
      if (c["id"] == grid[0]["selected"])
        CHECK(c["accuracy"].get<double>() == best);
  }
}

TEST_CASE("exit codes")
{
  const auto dir = scratch("exits");
  std::ostringstream log;
  CHECK(run_command_file("train", (dir / "missing.json").string(), std::nullopt, std::nullopt, log) == kExitConfig);

  auto doc = toy_document(dir / "out");
  CHECK(run("profile", write_config(dir, doc)) == kExitData); // no model yet

  doc["bogus"] = 1;
  CHECK(run("train", write_config(dir, doc)) == kExitConfig);

  doc = toy_document(dir / "out");
  doc["dataset"] = {{"train_images", "nope"}, {"train_labels", "nope"}, {"test_images", "nope"}, {"test_labels", "nope"}};
  CHECK(run("train", write_config(dir, doc)) == kExitData);

  // A DRAM too small for the weights.
  doc = toy_document(dir / "out");
  doc["dram"] = {{"geometry", {{"banks", 1}, {"subarrays", 1}, {"rows", 1}, {"columns", 16}}}};
  CHECK(run("energy", write_config(dir, doc)) == kExitCapacity);

  CHECK(run_command("nope", load_config(write_config(dir, toy_document(dir / "out")).string()), log) == kExitUsage);
}

TEST_CASE("command-line binary")
{
  const auto dir = scratch("binary");
  const auto config = write_config(dir, toy_document(dir / "out"));
  const std::string bin = VOLTSNN_CLI;
  CHECK(std::system((bin + " energy --config " + config.string() + " --seed 3 --out " + (dir / "alt").string() + " 2>/dev/null").c_str()) == 0);
  const auto e = json::parse(slurp(dir / "alt" / "energy.json"));
  CHECK(e["provenance"]["seed"] == 3);
  CHECK(std::system((bin + " energy 2>/dev/null").c_str()) != 0);
}
