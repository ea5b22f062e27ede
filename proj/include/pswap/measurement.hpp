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

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pswap/gate_algebra.hpp"
#include "pswap/optics_sim.hpp"
#include "pswap/qmath.hpp"

namespace pswap::measurement {

/** Analysis basis of one detector block; the first state exits the PBS "H" port. */
enum class Basis { kHV, kXY, kRL };

inline constexpr std::array<Basis, 3> kAllBases = {Basis::kHV, Basis::kXY, Basis::kRL};

std::string_view basis_name(Basis b);
std::optional<Basis> parse_basis(std::string_view name);
/** (H, V), (X, Y) or (R, L). */
std::pair<Polarization, Polarization> basis_states(Basis b);

struct InputSetting {
  Polarization first;
  Polarization second;
  auto operator<=>(const InputSetting&) const = default;

  qmath::PureState state() const { return product_state(first, second); }
  std::string name() const;
};

struct BasisSetting {
  Basis first;
  Basis second;
  auto operator<=>(const BasisSetting&) const = default;
};

/** One measurement configuration; phi is the nominal (commanded) phase. */
struct Setting {
  InputSetting input;
  BasisSetting basis;
  double phi;
};

/** The 36 product inputs, first photon outermost, in H,V,X,Y,R,L order. */
std::vector<InputSetting> all_inputs();
/** The 9 basis pairs, first block outermost, in HV,XY,RL order. */
std::vector<BasisSetting> all_bases();
/** phi outermost, then input, then basis. 36 * 9 settings per phase. */
std::vector<Setting> enumerate_settings(std::span<const double> phis);
/** k * pi / divisor for k = 0..last. */
std::vector<double> phase_grid(int divisor, int last);

/**
 * Detector-pair order used for every count quadruple:
 * (D1H&D2H, D1V&D2V, D1H&D2V, D1V&D2H). In a rotated basis "H" and "V"
 * stand for the first and second basis state of that block.
 */
inline constexpr std::array<std::string_view, 4> kDetectorPairs = {
    "D1H&D2H", "D1V&D2V", "D1H&D2V", "D1V&D2H"};

using Quad = std::array<double, 4>;
using Counts = std::array<std::uint64_t, 4>;

/** Per-detector efficiencies ordered (D1H, D1V, D2H, D2V). */
using DetectorEfficiencies = std::array<double, 4>;

inline constexpr DetectorEfficiencies kDefaultEfficiencies = {1.0, 0.95, 0.9, 0.85};
inline constexpr double kDefaultDuration = 15.0;
/** Pairs per second; gives a mean of 200 ideal coincidences per 15 s setting. */
inline constexpr double kDefaultFlux = 1600.0 / kDefaultDuration;

/** Product projection vectors for the four detector pairs. */
std::array<CVector, 4> outcome_vectors(const BasisSetting& basis);
Quad born_probabilities(const qmath::DensityMatrix& rho, const BasisSetting& basis);

/** Efficiency products for the four detector pairs. */
Quad pair_efficiencies(const DetectorEfficiencies& eta);

/** Independent Poisson draws, mean flux * duration * p_success * prob_k * eta_pair(k). */
Counts sample_counts(const Quad& probs, double p_success, double flux, double duration,
                     const DetectorEfficiencies& eta, std::mt19937_64& rng);

struct CoincidenceRecord {
  Setting setting;
  Counts counts{};
  double duration = kDefaultDuration;
  DetectorEfficiencies efficiencies = kDefaultEfficiencies;
};

Quad compensate(const Counts& counts, const Quad& pair_eff);
/** Counts divided by the efficiency product of each detector pair. */
Quad compensate(const CoincidenceRecord& record);

/** Tomography input: one setting with non-negative outcome weights. */
struct Observation {
  InputSetting input;
  BasisSetting basis;
  double phi;
  Quad weights;
};

std::vector<Observation> to_observations(std::span<const CoincidenceRecord> records);

struct GenerationConfig {
  double flux = kDefaultFlux;
  double duration = kDefaultDuration;
  DetectorEfficiencies efficiencies = kDefaultEfficiencies;
  std::uint64_t seed = 1;
};

struct Dataset {
  std::vector<CoincidenceRecord> records;
  std::uint64_t seed = 0;
  double flux = 0.0;
  optics::Imperfections imperfections;

  /** True if every (input, basis) cell occurs exactly once for each phase. */
  bool covers_grid(std::span<const double> phis) const;
  std::vector<CoincidenceRecord> select(double phi) const;
  std::vector<CoincidenceRecord> select(double phi, const InputSetting& input) const;
};

/** Random stream for setting `index`, independent of evaluation order. */
std::mt19937_64 setting_stream(std::uint64_t seed, std::uint64_t index);

/**
 * Simulates every setting of enumerate_settings(phis). Each setting draws
 * its phase error and then its counts from setting_stream(seed, index).
 */
Dataset generate_dataset(const optics::ModeNetwork& net, std::span<const double> phis,
                         const optics::Imperfections& imp, const GenerationConfig& config);

/**
 * Infinite-statistics observations: weights are p_success * probability,
 * i.e. expected counts per unit of flux * duration. Requires zero jitter.
 */
std::vector<Observation> exact_observations(const optics::ModeNetwork& net,
                                            std::span<const double> phis,
                                            const optics::Imperfections& imp);

class DatasetError : public std::runtime_error {
 public:
  explicit DatasetError(const std::string& what) : std::runtime_error("dataset: " + what) {}
};

/** Header line of JSON metadata, then one whitespace-separated record per line. */
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

}  // namespace pswap::measurement
