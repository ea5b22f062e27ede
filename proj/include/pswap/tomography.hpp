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
#include <vector>

#include "json.hpp"
#include "pswap/choi.hpp"
#include "pswap/measurement.hpp"
#include "pswap/qmath.hpp"

namespace pswap::tomography {

class TomographyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MlConfig {
  int max_iterations = 100000;
  /** Convergence threshold on the per-count log-likelihood change. */
  double stop_delta = 1e-10;
  /** Step fraction toward the full R rho R update; 1 is the undiluted step. */
  double dilution = 0.5;
  bool record_history = false;

  void validate() const;
};

struct MlDiagnostics {
  int iterations = 0;
  /** Per-count log-likelihood sum_j f_j ln(p_j / sum_k p_k), f normalized. */
  double log_likelihood = 0.0;
  bool converged = false;
  /** ||H^{-1} R rho - rho||_F at the returned iterate (unit-trace rho). */
  double residual = 0.0;
  int backtracks = 0;
  /**
   * Cumulative log-likelihood gain after each accepted step, measured from
   * the starting point; non-decreasing by construction.
   */
  std::vector<double> history;
};

/**
 * Rank-one effects |v_j><v_j| with observed weights f_j, solved by the
 * diluted R rho R fixed-point iteration. Steps that would lower the
 * likelihood are retried with half the dilution, so the likelihood
 * sequence is non-decreasing. Convergence requires both the likelihood
 * change below stop_delta and the extremal-equation residual below
 * 10 * stop_delta.
 */
struct MlSolution {
  CMatrix rho;  // unit trace
  MlDiagnostics diagnostics;
};

MlSolution maximize_likelihood(std::span<const CVector> effects, std::span<const double> weights,
                               const MlConfig& config);

struct StateEstimate {
  qmath::DensityMatrix rho;
  MlDiagnostics diagnostics;
};

/** Observations must share one input and phase and cover all 9 basis pairs. */
StateEstimate ml_state(std::span<const measurement::Observation> observations,
                       const MlConfig& config = {});
StateEstimate ml_state(std::span<const measurement::CoincidenceRecord> records,
                       const MlConfig& config = {});

struct ProcessEstimate {
  ChoiMatrix chi;
  MlDiagnostics diagnostics;
};

/**
 * Process reconstruction for a single phase from the full 36 x 9 grid.
 * No trace-preservation constraint is imposed. When `exposure`
 * (flux * duration) is known, chi is scaled so that Tr[rho_out] is the
 * absolute success probability; otherwise Tr[chi] = 4.
 */
ProcessEstimate ml_process(std::span<const measurement::Observation> observations,
                           const MlConfig& config = {},
                           std::optional<double> exposure = std::nullopt);
ProcessEstimate ml_process(const measurement::Dataset& data, double phi,
                           const MlConfig& config = {});

/** Tr[chi chi_id] / (Tr[chi] Tr[chi_id]). */
double process_fidelity(const ChoiMatrix& chi, const ChoiMatrix& chi_id);

/** Matrix as rows of [re, im] pairs. */
nlohmann::ordered_json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::ordered_json report_json(const CMatrix& matrix, const MlDiagnostics& diagnostics,
                                   const std::map<std::string, double>& metrics);

}  // namespace pswap::tomography
