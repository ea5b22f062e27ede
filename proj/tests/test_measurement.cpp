// Copyright 2026 The pswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pswap/measurement.hpp"
#include "support.hpp"

using namespace pswap;
using namespace pswap::measurement;

namespace {

constexpr double kPi = std::numbers::pi;

const optics::ModeNetwork& fig1() {
  static const optics::ModeNetwork net = optics::load_network(optics::bundled_path("fig1.net"));
  return net;
}

std::string serialize(const Dataset& d) {
  std::ostringstream os;
  write_dataset(os, d);
  return os.str();
}

}  // namespace

TEST_CASE("setting enumeration") {
  CHECK(enumerate_settings(phase_grid(4, 8)).size() == 2916);
  const std::vector<double> one = {0.0};
  CHECK(enumerate_settings(one).size() == 324);
  CHECK(enumerate_settings(phase_grid(8, 16)).size() == 5508);

  const auto settings = enumerate_settings(one);
  std::set<std::pair<InputSetting, BasisSetting>> cells;
  for (const auto& s : settings) cells.insert({s.input, s.basis});
  CHECK(cells.size() == 324);
  CHECK(settings.front().input.name() == "HH");
  CHECK(all_inputs().size() == 36);
  CHECK(all_bases().size() == 9);
  CHECK(phase_grid(4, 8).back() == doctest::Approx(2 * kPi));
}

TEST_CASE("Born probabilities") {
  const BasisSetting hvhv{Basis::kHV, Basis::kHV};
  auto hv = qmath::DensityMatrix::from_pure(product_state(Polarization::kH, Polarization::kV));
  Quad p = born_probabilities(hv, hvhv);
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(1.0));
  CHECK(p[3] == doctest::Approx(0.0));

  for (const auto& b : all_bases()) {
    Quad q = born_probabilities(qmath::DensityMatrix::maximally_mixed(4), b);
    for (double x : q) CHECK(x == doctest::Approx(0.25).epsilon(1e-14));
  }

  auto singlet = qmath::DensityMatrix::from_pure(bell_basis().psi_minus);
  for (Basis basis : kAllBases) {
    Quad s = born_probabilities(singlet, {basis, basis});
    CHECK(std::abs(s[0]) < 1e-15);
    CHECK(std::abs(s[1]) < 1e-15);
    CHECK(s[2] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s[3] == doctest::Approx(0.5).epsilon(1e-14));
  }

  std::mt19937_64 rng(211);
  for (int trial = 0; trial < 50; ++trial) {
    qmath::DensityMatrix rho(testing::random_density(4, rng));
    for (const auto& b : all_bases()) {
      Quad q = born_probabilities(rho, b);
      CHECK(q[0] + q[1] + q[2] + q[3] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("Poisson sampling") {
  const Quad first = {1.0, 0.0, 0.0, 0.0};
  const DetectorEfficiencies unit = {1.0, 1.0, 1.0, 1.0};
  std::mt19937_64 rng(223);

  SUBCASE("zero flux") {
    Counts c = sample_counts({0.25, 0.25, 0.25, 0.25}, 0.125, 0.0, 15.0, unit, rng);
    for (auto n : c) CHECK(n == 0);
  }
  SUBCASE("large mean concentrates") {
    Counts c = sample_counts(first, 1.0, 1e6, 1.0, unit, rng);
    CHECK(std::abs(static_cast<double>(c[0]) - 1e6) < 5.0 * 1e3);
    CHECK(c[1] == 0);
  }
  SUBCASE("second-block efficiency halves the fourth pair") {
    const Quad uniform = {0.25, 0.25, 0.25, 0.25};
    const DetectorEfficiencies half = {1.0, 1.0, 0.5, 0.5};
    double full_sum = 0.0, half_sum = 0.0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
      auto r1 = setting_stream(s, 0), r2 = setting_stream(s, 0);
      full_sum += static_cast<double>(sample_counts(uniform, 1.0, 4000.0, 1.0, unit, r1)[3]);
      half_sum += static_cast<double>(sample_counts(uniform, 1.0, 4000.0, 1.0, half, r2)[3]);
    }
    // Means 1000 and 500: the sums over 200 seeds have sigma ~450 and ~320.
    CHECK(full_sum / seeds == doctest::Approx(1000.0).epsilon(0.01));
    CHECK(half_sum / full_sum == doctest::Approx(0.5).epsilon(0.02));
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS(sample_counts(first, -1.0, 1.0, 1.0, unit, rng));
    CHECK_THROWS(sample_counts(first, 1.0, -1.0, 1.0, unit, rng));
    CHECK_THROWS(sample_counts({-0.5, 1.5, 0.0, 0.0}, 1.0, 1.0, 1.0, unit, rng));
    CHECK_THROWS(sample_counts({0.5, 0.0, 0.0, 0.0}, 1.0, 1.0, 1.0, unit, rng));
    CHECK_THROWS(sample_counts(first, 1.0, 1.0, 1.0, {1.0, -0.1, 1.0, 1.0}, rng));
  }
}

TEST_CASE("efficiency compensation") {
  CoincidenceRecord rec;
  rec.counts = {7, 11, 13, 17};
  rec.efficiencies = {1.0, 1.0, 1.0, 1.0};
  Quad same = compensate(rec);
  for (int k = 0; k < 4; ++k) CHECK(same[k] == static_cast<double>(rec.counts[k]));

  Quad scaled = compensate(Counts{100, 100, 100, 100}, Quad{1.0, 1.0, 0.5, 0.5});
  CHECK(scaled == Quad{100.0, 100.0, 200.0, 200.0});

  // Pair products follow the (D1H&D2H, D1V&D2V, D1H&D2V, D1V&D2H) order.
  CHECK(pair_efficiencies({1.0, 0.95, 0.9, 0.85}) ==
        Quad{1.0 * 0.9, 0.95 * 0.85, 1.0 * 0.85, 0.95 * 0.9});

  rec.efficiencies = {1.0, 0.0, 1.0, 1.0};
  CHECK_THROWS(compensate(rec));
  CHECK_THROWS(compensate(Counts{1, 1, 1, 1}, Quad{1.0, 1.0, 0.0, 1.0}));
}

TEST_CASE("compensated counts track Born probabilities") {
  // Mean 4e4 coincidences per setting, imbalanced detectors.
  const DetectorEfficiencies eta = kDefaultEfficiencies;
  const Quad pair = pair_efficiencies(eta);
  std::mt19937_64 rng(227);
  int within = 0, total = 0;
  for (int trial = 0; trial < 40; ++trial) {
    qmath::DensityMatrix rho(testing::random_density(4, rng));
    for (const auto& b : all_bases()) {
      const Quad p = born_probabilities(rho, b);
      const double n = 4e4;
      Counts c = sample_counts(p, 1.0, n, 1.0, eta, rng);
      Quad w = compensate(c, pair);
      for (int k = 0; k < 4; ++k) {
        const double mean = n * p[k];
        const double sigma = std::sqrt(n * p[k] * pair[k]) / pair[k];
        ++total;
        if (std::abs(w[k] - mean) <= 3.0 * sigma + 1e-9) ++within;
      }
    }
  }
  // Three-sigma coverage is 99.7%; allow a generous margin for 1440 draws.
  CHECK(static_cast<double>(within) / total > 0.99);
}

TEST_CASE("dataset generation") {
  const std::vector<double> phis = {0.0, kPi / 2};
  GenerationConfig cfg;
  cfg.seed = 17;
  const auto imp = optics::Imperfections::laboratory();
  const Dataset d = generate_dataset(fig1(), phis, imp, cfg);
  CHECK(d.records.size() == 648);
  CHECK(d.covers_grid(phis));
  const std::vector<double> other = {kPi};
  CHECK_FALSE(d.covers_grid(other));
  CHECK(d.select(kPi / 2).size() == 324);
  CHECK(d.select(0.0, {Polarization::kH, Polarization::kV}).size() == 9);

  SUBCASE("reproducible byte for byte") {
    CHECK(serialize(d) == serialize(generate_dataset(fig1(), phis, imp, cfg)));
    GenerationConfig other_seed = cfg;
    other_seed.seed = 18;
    CHECK(serialize(d) != serialize(generate_dataset(fig1(), phis, imp, other_seed)));
  }
  SUBCASE("order independent streams") {
    // Generating one phase alone reproduces the first block.
    const std::vector<double> first = {0.0};
    const Dataset part = generate_dataset(fig1(), first, imp, cfg);
    for (std::size_t i = 0; i < part.records.size(); ++i)
      CHECK(part.records[i].counts == d.records[i].counts);
  }
  SUBCASE("mean coincidences per setting") {
    double sum = 0.0;
    auto ideal = optics::Imperfections::ideal();
    GenerationConfig unit = cfg;
    unit.efficiencies = {1.0, 1.0, 1.0, 1.0};
    const Dataset clean = generate_dataset(fig1(), phis, ideal, unit);
    for (const auto& r : clean.records) sum += static_cast<double>(r.counts[0] + r.counts[1] + r.counts[2] + r.counts[3]);
    CHECK(sum / clean.records.size() == doctest::Approx(200.0).epsilon(0.02));
  }
}

TEST_CASE("exact observations") {
  const std::vector<double> phis = {0.0};
  const auto obs = exact_observations(fig1(), phis, optics::Imperfections::ideal());
  CHECK(obs.size() == 324);
  for (const auto& o : obs) {
    CHECK(o.weights[0] + o.weights[1] + o.weights[2] + o.weights[3] ==
          doctest::Approx(0.125).epsilon(1e-12));
  }
  auto jittery = optics::Imperfections::laboratory();
  CHECK_THROWS(exact_observations(fig1(), phis, jittery));
}

TEST_CASE("dataset serialization") {
  const std::vector<double> phis = {kPi / 4};
  GenerationConfig cfg;
  cfg.seed = 99;
  cfg.duration = 7.5;
  const Dataset d = generate_dataset(fig1(), phis, optics::Imperfections::laboratory(), cfg);
  const std::string text = serialize(d);
  std::istringstream in(text);
  const Dataset back = read_dataset(in);
  CHECK(serialize(back) == text);
  CHECK(back.seed == 99);
  CHECK(back.flux == d.flux);
  CHECK(back.imperfections.hom_overlap == d.imperfections.hom_overlap);
  CHECK(back.imperfections.phase_jitter_sigma == d.imperfections.phase_jitter_sigma);
  REQUIRE(back.records.size() == d.records.size());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    CHECK(back.records[i].setting.phi == d.records[i].setting.phi);
    CHECK(back.records[i].counts == d.records[i].counts);
    CHECK(back.records[i].duration == 7.5);
    CHECK(back.records[i].efficiencies == d.records[i].efficiencies);
  }

  auto bad = [](const std::string& s) {
    std::istringstream is(s);
    CHECK_THROWS_AS(read_dataset(is), DatasetError);
  };
  bad("");
  bad("not json\n");
  const std::string header = text.substr(0, text.find('\n') + 1);
  bad(header + "0.5 H V HV HV 1 2 3\n");
  bad(header + "0.5 H Q HV HV 1 2 3 4 15 1 1 1 1\n");
  bad(header + "0.5 H V HV ZZ 1 2 3 4 15 1 1 1 1\n");
  bad(header + "0.5 H V HV HV 1 -2 3 4 15 1 1 1 1\n");
  bad(header + "abc H V HV HV 1 2 3 4 15 1 1 1 1\n");
}
