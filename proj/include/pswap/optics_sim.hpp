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

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pswap/choi.hpp"
#include "pswap/gate_algebra.hpp"
#include "pswap/netlist.hpp"
#include "pswap/qmath.hpp"

namespace pswap::optics {

inline constexpr std::string_view kPhaseParameter = "phi";
inline constexpr std::string_view kAttenuationParameter = "atten";

/**
 * Deviations from the ideal gate.
 *
 * hom_overlap (v): photon b carries an internal state overlapping photon a's
 * with probability v; the orthogonal part does not two-photon interfere.
 * arm_overlap (mu): with probability 1 - mu the two arms entering the
 * recombiner beam splitter carry orthogonal which-arm labels.
 * phase_jitter_sigma: standard deviation of the per-setting phase error,
 * used only when generating data.
 * lower_arm_attenuation: binds the `atten` parameter of the network.
 */
struct Imperfections {
  double hom_overlap = 1.0;
  double arm_overlap = 1.0;
  double phase_jitter_sigma = 0.0;
  double lower_arm_attenuation = 1.0;
  std::string recombiner = "BS2";

  static Imperfections ideal() { return {}; }
  /** v = 0.97, mu = 0.98, sigma = 3% of a fringe period. */
  static Imperfections laboratory();

  void validate() const;
  bool is_ideal() const;
};

using Bindings = std::map<std::string, double, std::less<>>;

/** Zero `mode` immediately before `element` acts. */
struct Blocking {
  std::string element;
  std::string mode;
};

/** Single-photon mode transfer matrix, entries(out, in), loss ports included. */
struct ModeMatrix {
  CMatrix entries;
  std::vector<std::string> modes;

  Complex at(std::string_view out, std::string_view in) const;
  double unitarity_defect() const;  // ||M^dagger M - I||_F
};

ModeMatrix transfer_matrix(const ModeNetwork& net, const Bindings& bindings,
                           const Imperfections& imp = Imperfections::ideal(),
                           std::span<const Blocking> blocks = {});

struct ProcessTerm {
  double weight;
  CMatrix op;  // 4x4 on the HH,HV,VH,VV polarization basis
};

/** Post-selected map rho -> sum_k w_k A_k rho A_k^dagger (unnormalized). */
class ConditionalProcess {
 public:
  explicit ConditionalProcess(std::vector<ProcessTerm> terms);

  const std::vector<ProcessTerm>& terms() const { return terms_; }
  /** Present when the map is a single operator: sqrt(w) A. */
  std::optional<CMatrix> exact_operator() const;
  CMatrix apply_unnormalized(const CMatrix& rho) const;
  double success_probability(const CMatrix& rho) const;
  ChoiMatrix to_choi() const;

 private:
  std::vector<ProcessTerm> terms_;
};

/** Two photons enter photon_inputs() and are detected one per post-selected mode. */
ConditionalProcess conditional_gate(const ModeNetwork& net, const Bindings& bindings,
                                    const Imperfections& imp);
/** Binds phi and atten from the arguments. */
ConditionalProcess conditional_gate(const ModeNetwork& net, GatePhase phi,
                                    const Imperfections& imp);

class PostselectionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProcessOutput {
  qmath::DensityMatrix rho;
  double p_success;
};

/** Throws PostselectionFailure when the success probability is below 1e-14. */
ProcessOutput apply_process(const ConditionalProcess& proc, const qmath::DensityMatrix& rho_in);

struct HomPoint {
  double overlap;
  double coincidence;
  double visibility;  // (baseline - coincidence) / baseline
};

struct HomScan {
  double baseline;  // coincidence probability for distinguishable photons
  std::vector<HomPoint> points;
};

/** Coincidence probability versus overlap v for two H-polarized photons. */
HomScan hom_scan(const ModeNetwork& net, std::span<const double> overlaps,
                 const Bindings& bindings = {}, std::span<const Blocking> blocks = {});

/** Beam blocked between BS3 and BS2 in the bundled interferometer. */
std::vector<Blocking> fig1_alignment_block();

/**
 * Single-photon detection probability at the second post-selected mode for
 * a photon entering the first input, swept over phi.
 */
std::vector<double> single_photon_fringe(const ModeNetwork& net, std::span<const double> phases,
                                         const Imperfections& imp);
double fringe_visibility(std::span<const double> intensities);

}  // namespace pswap::optics
