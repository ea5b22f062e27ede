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

#include "pswap/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace pswap::tomography {

namespace {

using measurement::BasisSetting;
using measurement::InputSetting;
using measurement::Observation;

constexpr int kMaxBacktracks = 60;
constexpr double kTinyProbability = 1e-300;

struct Problem {
  CMatrix effects;           // d x n, column j is v_j
  Eigen::VectorXd weights;   // normalized to sum 1, zeros allowed
  CMatrix h_inverse;         // (sum_j v_j v_j^dagger)^{-1}
  CMatrix h;
};

Problem build_problem(std::span<const CVector> effects, std::span<const double> weights) {
  if (effects.empty() || effects.size() != weights.size()) {
    throw TomographyError("maximize_likelihood: need one weight per effect");
  }
  const Eigen::Index d = effects[0].size();
  Problem p;
  p.effects.resize(d, static_cast<Eigen::Index>(effects.size()));
  p.weights.resize(static_cast<Eigen::Index>(weights.size()));
  double total = 0.0;
  for (std::size_t j = 0; j < effects.size(); ++j) {
    if (effects[j].size() != d) throw TomographyError("maximize_likelihood: ragged effects");
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) {
      throw TomographyError("maximize_likelihood: weights must be finite and non-negative");
    }
    p.effects.col(static_cast<Eigen::Index>(j)) = effects[j];
    p.weights[static_cast<Eigen::Index>(j)] = weights[j];
    total += weights[j];
  }
  if (!(total > 0.0)) throw TomographyError("maximize_likelihood: no counts");
  p.weights /= total;
  p.h = p.effects * p.effects.adjoint();
  const Eigen::VectorXd spectrum = qmath::hermitian_eigen(p.h).values;
  if (spectrum.minCoeff() <= 1e-9 * spectrum.maxCoeff()) {
    throw TomographyError("maximize_likelihood: measurements are not informationally complete");
  }
  p.h_inverse = p.h.inverse();
  return p;
}

struct Evaluation {
  double log_likelihood;
  Eigen::VectorXd probs;
  double norm;  // Tr[H rho]
};

Evaluation evaluate(const Problem& p, const CMatrix& rho) {
  const CMatrix w = rho * p.effects;
  Evaluation e;
  e.probs.resize(p.effects.cols());
  for (Eigen::Index j = 0; j < p.effects.cols(); ++j) {
    e.probs[j] = std::max(p.effects.col(j).dot(w.col(j)).real(), kTinyProbability);
  }
  e.norm = (p.h * rho).trace().real();
  double ll = 0.0;
  for (Eigen::Index j = 0; j < p.effects.cols(); ++j) {
    if (p.weights[j] > 0.0) ll += p.weights[j] * std::log(e.probs[j] / e.norm);
  }
  e.log_likelihood = ll;
  return e;
}

// L(next) - L(prev) for next ~ t rho t^dagger with t = I + step * B. The
// probability changes come straight from the expansion
//   t rho t^dagger - rho = step (B rho + rho B^dagger) + step^2 B rho B^dagger,
// so they keep full relative precision even when the step barely moves rho.
double likelihood_gain(const Problem& p, const Evaluation& prev, const CMatrix& rho,
                       const CMatrix& b, double step) {
  const CMatrix b_rho = b * rho;
  const CMatrix delta = step * (b_rho + b_rho.adjoint()) + step * step * (b_rho * b.adjoint());
  const double norm_change = (p.h * delta).trace().real();
  double gain = -std::log1p(norm_change / prev.norm);
  const CMatrix w = delta * p.effects;
  for (Eigen::Index j = 0; j < p.weights.size(); ++j) {
    if (p.weights[j] > 0.0) {
      const double change = p.effects.col(j).dot(w.col(j)).real();
      gain += p.weights[j] * std::log1p(change / prev.probs[j]);
    }
  }
  return gain;
}

CMatrix r_operator(const Problem& p, const Evaluation& e) {
  Eigen::VectorXd scale(p.effects.cols());
  for (Eigen::Index j = 0; j < p.effects.cols(); ++j) scale[j] = p.weights[j] / e.probs[j];
  return p.effects * scale.asDiagonal() * p.effects.adjoint();
}

CMatrix unit_trace(const CMatrix& m) {
  const CMatrix herm = 0.5 * (m + m.adjoint());
  return herm / herm.trace().real();
}

// Normalization Tr[H rho] = 1 makes R rho = H rho the extremal equation.
CMatrix h_normalized(const Problem& p, const CMatrix& rho) {
  return rho / (p.h * rho).trace().real();
}

void check_single_setting(std::span<const Observation> obs) {
  if (obs.empty()) throw TomographyError("ml_state: no observations");
  std::set<BasisSetting> bases;
  for (const auto& o : obs) {
    if (o.input != obs[0].input || o.phi != obs[0].phi) {
      throw TomographyError("ml_state: observations mix inputs or phases");
    }
    bases.insert(o.basis);
  }
  if (bases.size() != 9) {
    throw TomographyError("ml_state: insufficient basis coverage (" +
                          std::to_string(bases.size()) + " of 9 basis pairs)");
  }
}

}  // namespace

void MlConfig::validate() const {
  if (max_iterations <= 0) throw std::invalid_argument("MlConfig: max_iterations must be positive");
  if (!(stop_delta > 0.0)) throw std::invalid_argument("MlConfig: stop_delta must be positive");
  if (!(dilution > 0.0 && dilution <= 1.0)) {
    throw std::invalid_argument("MlConfig: dilution must lie in (0, 1]");
  }
}

MlSolution maximize_likelihood(std::span<const CVector> effects, std::span<const double> weights,
                               const MlConfig& config) {
  config.validate();
  const Problem p = build_problem(effects, weights);
  const Eigen::Index d = p.effects.rows();
  const CMatrix identity = CMatrix::Identity(d, d);

  CMatrix rho = h_normalized(p, identity);
  Evaluation eval = evaluate(p, rho);
  MlDiagnostics diag;
  double trajectory = eval.log_likelihood;
  if (config.record_history) diag.history.push_back(trajectory);

  auto residual_of = [&](const CMatrix& r, const CMatrix& state) {
    const CMatrix unit = unit_trace(state);
    return (p.h_inverse * r * unit - unit).norm();
  };

  CMatrix r = r_operator(p, eval);
  double dilution = config.dilution;
  while (diag.iterations < config.max_iterations) {
    ++diag.iterations;
    const CMatrix step_base = p.h_inverse * r - identity;
    bool accepted = false;
    CMatrix next;
    Evaluation next_eval;
    double step = dilution;
    double gain = 0.0;
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt) {
      const CMatrix t = identity + step * step_base;
      next = h_normalized(p, t * rho * t.adjoint());
      next = 0.5 * (next + next.adjoint()).eval();
      next_eval = evaluate(p, next);
      gain = likelihood_gain(p, eval, rho, step_base, step);
      if (next.allFinite() && gain >= 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++diag.backtracks;
    }
    if (!accepted) {
      // No ascent left at working precision; converged only if stationary.
      diag.converged = residual_of(r, rho) < 10.0 * config.stop_delta;
      break;
    }
    rho = std::move(next);
    eval = std::move(next_eval);
    r = r_operator(p, eval);
    trajectory += gain;
    if (config.record_history) diag.history.push_back(trajectory);
    if (gain < config.stop_delta && residual_of(r, rho) < 10.0 * config.stop_delta) {
      diag.converged = true;
      break;
    }
  }
  diag.log_likelihood = eval.log_likelihood;
  diag.residual = residual_of(r, rho);
  return {unit_trace(rho), std::move(diag)};
}

StateEstimate ml_state(std::span<const Observation> observations, const MlConfig& config) {
  check_single_setting(observations);
  std::vector<CVector> effects;
  std::vector<double> weights;
  for (const auto& o : observations) {
    const auto vectors = measurement::outcome_vectors(o.basis);
    for (std::size_t k = 0; k < 4; ++k) {
      effects.push_back(vectors[k]);
      weights.push_back(o.weights[k]);
    }
  }
  MlSolution sol = maximize_likelihood(effects, weights, config);
  return {qmath::DensityMatrix(std::move(sol.rho)), std::move(sol.diagnostics)};
}

StateEstimate ml_state(std::span<const measurement::CoincidenceRecord> records,
                       const MlConfig& config) {
  const auto obs = measurement::to_observations(records);
  return ml_state(obs, config);
}

ProcessEstimate ml_process(std::span<const Observation> observations, const MlConfig& config,
                           std::optional<double> exposure) {
  if (observations.empty()) throw TomographyError("ml_process: no observations");
  std::set<std::pair<InputSetting, BasisSetting>> cells;
  for (const auto& o : observations) {
    if (o.phi != observations[0].phi) throw TomographyError("ml_process: observations mix phases");
    if (!cells.insert({o.input, o.basis}).second) {
      throw TomographyError("ml_process: duplicate setting " + o.input.name());
    }
  }
  if (cells.size() != 36 * 9) {
    throw TomographyError("ml_process: grid incomplete (" + std::to_string(cells.size()) +
                          " of 324 settings)");
  }
  std::vector<CVector> effects;
  std::vector<double> weights;
  double total = 0.0;
  for (const auto& o : observations) {
    // rho_in^T = |psi^*><psi^*| in the fixed basis.
    const CVector in = o.input.state().amplitudes().conjugate();
    const auto vectors = measurement::outcome_vectors(o.basis);
    for (std::size_t k = 0; k < 4; ++k) {
      effects.push_back(qmath::kron(in, vectors[k]));
      weights.push_back(o.weights[k]);
      total += o.weights[k];
    }
  }
  MlSolution sol = maximize_likelihood(effects, weights, config);

  // Expected weight of effect j is lambda * <v_j|chi|v_j> with
  // lambda = total / Tr[H chi]; H = 81 I for the full grid.
  CMatrix h = CMatrix::Zero(16, 16);
  for (const auto& v : effects) h += v * v.adjoint();
  const double h_trace = (h * sol.rho).trace().real();
  if (exposure && *exposure > 0.0) {
    const double factor = total / (h_trace * *exposure);
    return {ChoiMatrix(sol.rho * factor, ChoiScale::kSuccessProbability),
            std::move(sol.diagnostics)};
  }
  return {ChoiMatrix(sol.rho * 4.0, ChoiScale::kInputDimension), std::move(sol.diagnostics)};
}

ProcessEstimate ml_process(const measurement::Dataset& data, double phi, const MlConfig& config) {
  const auto records = data.select(phi);
  if (records.empty()) throw TomographyError("ml_process: no records at this phase");
  const double duration = records.front().duration;
  for (const auto& r : records) {
    if (r.duration != duration) {
      throw TomographyError("ml_process: records with unequal durations");
    }
  }
  const auto obs = measurement::to_observations(records);
  std::optional<double> exposure;
  if (data.flux > 0.0) exposure = data.flux * duration;
  return ml_process(obs, config, exposure);
}

double process_fidelity(const ChoiMatrix& chi, const ChoiMatrix& chi_id) {
  const double t1 = chi.trace();
  const double t2 = chi_id.trace();
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("process_fidelity: zero trace");
  const double overlap = (chi.matrix() * chi_id.matrix()).trace().real();
  return std::clamp(overlap / (t1 * t2), 0.0, 1.0);
}

nlohmann::ordered_json matrix_to_json(const CMatrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != n) throw std::runtime_error("matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& pair = row.at(static_cast<std::size_t>(c));
      m(r, c) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  }
  return m;
}

nlohmann::ordered_json report_json(const CMatrix& matrix, const MlDiagnostics& diagnostics,
                                   const std::map<std::string, double>& metrics) {
  nlohmann::ordered_json j;
  j["dimension"] = matrix.rows();
  j["matrix"] = matrix_to_json(matrix);
  j["iterations"] = diagnostics.iterations;
  j["log_likelihood"] = diagnostics.log_likelihood;
  j["converged"] = diagnostics.converged;
  j["residual"] = diagnostics.residual;
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metrics) m[k] = v;
  j["metrics"] = std::move(m);
  return j;
}

}  // namespace pswap::tomography
