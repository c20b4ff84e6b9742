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

#include <cmath>
#include <sstream>

#include "voltsnn/dram_energy.hpp"
#include "voltsnn/error.hpp"
#include "voltsnn/rng.hpp"
#include "voltsnn/selection.hpp"

using namespace voltsnn;

namespace
{
Candidate make(std::string id, double acc, unsigned bits, double e_approx, double e_accurate = 100.0)
{
  return Candidate{std::move(id), acc, 78400, bits, e_approx, e_accurate, 0.0, 1.35};
}
} // namespace

TEST_CASE("memory and energy normalization")
{
  CHECK(memory_norm(make("a", 0.9, 8, 1)) == 0.25);
  CHECK(memory_norm(make("a", 0.9, 32, 1)) == 1.0);
  CHECK(memory_norm(make("a", 0.9, 16, 1)) == 0.5);
  auto ref = make("ref", 0.9, 32, 1);
  ref.n_weights = 10;
  CHECK_THROWS_AS(memory_norm(make("a", 0.9, 8, 1), ref), InvalidValue);
  ref.n_weights = 78400;
  ref.bitwidth = 8;
  CHECK_THROWS_AS(memory_norm(make("a", 0.9, 8, 1), ref), InvalidValue);

  CHECK(energy_norm(make("a", 0.9, 8, 100)) == 1.0);
  const VoltageConfig low(1.025);
  CHECK(energy_norm(make("a", 0.9, 8, 100 * energy_scale(low))) == doctest::Approx(0.5766).epsilon(1e-4));
  std::vector<std::string> warnings;
  CHECK(energy_norm(make("hot", 0.9, 8, 120), &warnings) == doctest::Approx(1.2));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("hot") != std::string::npos);
  CHECK_THROWS_AS(energy_norm(make("z", 0.9, 8, 1, 0.0)), InvalidValue);
}

TEST_CASE("reward arithmetic")
{
  CHECK(reward(0.9, 0.25, 0.5, 0, 0) == 0.9);
  CHECK(reward(0.9, 0.25, 0.5, 10, 10) == doctest::Approx(-6.6));
  CHECK_THROWS_AS(reward(0.9, 0.25, 0.5, -1, 0), InvalidValue);
  CHECK_THROWS_AS(reward(0.9, 0.25, 0.5, 0, -0.1), InvalidValue);

  Rng rng = make_rng(5);
  for (int i = 0; i < 200; ++i) {
    const double acc = uniform01(rng), m = uniform01(rng), e = uniform01(rng);
    const double mu = 0.01 + uniform01(rng), eps = 0.01 + uniform01(rng), d = 0.01;
    CHECK(reward(acc, m + d, e, mu, eps) < reward(acc, m, e, mu, eps));
    CHECK(reward(acc, m, e + d, mu, eps) < reward(acc, m, e, mu, eps));
    CHECK(reward(acc + d, m, e, mu, eps) > reward(acc, m, e, mu, eps));
  }
}

TEST_CASE("selection")
{
  const std::vector<Candidate> cs{make("fp32", 0.92, 32, 100), make("fxp8", 0.90, 8, 100), make("fxp8_lowv", 0.89, 8, 57.66)};
  CHECK(select(cs, 0, 0) == 0);
  CHECK(select(cs, 1, 0) == 1);
  CHECK(select(cs, 1, 1) == 2);
  CHECK_THROWS_AS(select(std::span<const Candidate>{}, 0, 0), InvalidValue);

  SUBCASE("ties go to smaller memory, then smaller energy")
  {
    const std::vector<Candidate> tie{make("big", 0.9, 32, 100), make("small", 0.9, 8, 100), make("small_cool", 0.9, 8, 50)};
    CHECK(select(tie, 0, 0) == 2);
  }
  SUBCASE("translation and energy scale invariance")
  {
    Rng rng = make_rng(8);
    for (int t = 0; t < 100; ++t) {
      std::vector<Candidate> r;
      for (int k = 0; k < 6; ++k)
        r.push_back(make("c" + std::to_string(k), 0.5 * uniform01(rng), rng() % 2 ? 8 : 32, 10 + 90 * uniform01(rng)));
      const double mu = 3 * uniform01(rng), eps = 3 * uniform01(rng);
      const auto chosen = select(r, mu, eps);
      auto shifted = r, scaled = r;
      for (auto& c : shifted)
        c.accuracy += 0.25;
      for (auto& c : scaled) {
        c.energy_approx *= 7.5;
        c.energy_accurate *= 7.5;
      }
      CHECK(select(shifted, mu, eps) == chosen);
      CHECK(select(scaled, mu, eps) == chosen);
    }
  }
}

TEST_CASE("grid rows and CSV")
{
  const std::vector<Candidate> cs{make("fp32", 0.92, 32, 100), make("fxp8", 0.90, 8, 60)};
  const std::vector<double> mus{0, 1}, eps{0, 5};
  const auto rows = reward_grid(cs, mus, eps);
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows)
    CHECK(r.reward == cs[r.candidate].accuracy - (r.mu * r.m_norm + r.epsilon * r.e_norm));
  CHECK(rows[0].selected);
  CHECK_FALSE(rows[1].selected);
  std::ostringstream out;
  write_reward_csv(out, cs, rows);
  CHECK(out.str().rfind("candidate,mu,epsilon,m_norm,e_norm,reward,selected\nfp32,0,0,1,1,0.92,1\n", 0) == 0);
}

TEST_CASE("carbon estimate")
{
  CHECK(carbon_emission(0, 50, 25, 250, 1).co2e == 0.0);
  const auto c = carbon_emission(10, 50, 25, 250, 1);
  CHECK(c.energy_kwh == doctest::Approx(5.135).epsilon(1e-12));
  CHECK(c.co2e == doctest::Approx(4.89879).epsilon(1e-12));
  CHECK(carbon_emission(20, 50, 25, 250, 1).co2e == doctest::Approx(2 * c.co2e).epsilon(1e-12));
  CHECK_THROWS_AS(carbon_emission(-1, 1, 1, 1, 1), InvalidValue);
  CHECK_THROWS_AS(carbon_emission(1, 1, 1, 1, -1), InvalidValue);

  Rng rng = make_rng(10);
  for (int i = 0; i < 100; ++i) {
    const double t = 100 * uniform01(rng), pc = 300 * uniform01(rng), pr = 100 * uniform01(rng), pg = 400 * uniform01(rng);
    const double g = static_cast<double>(rng() % 9);
    const double kwh = 1.58 * t * (pc + pr + g * pg) / 1000;
    const auto est = carbon_emission(t, pc, pr, pg, g);
    CHECK(std::abs(est.energy_kwh - kwh) <= 1e-9 * kwh);
    CHECK(std::abs(est.co2e - 0.954 * kwh) <= 1e-9 * 0.954 * kwh);
  }
}

TEST_CASE("candidate JSON")
{
  const auto c = make("x", 0.8, 8, 50);
  CHECK(candidate_from_json(to_json(c)) == c);
  auto j = to_json(c);
  j.erase("accuracy");
  CHECK_THROWS_AS(candidate_from_json(j), DataError);
  j = to_json(c);
  j["accuracy"] = 1.5;
  CHECK_THROWS_AS(candidate_from_json(j), InvalidValue);
}
