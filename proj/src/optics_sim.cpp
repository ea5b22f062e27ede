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

#include "pswap/optics_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pswap::optics {

namespace {

constexpr Complex kI(0.0, 1.0);
constexpr double kNegligibleOperator = 1e-14;
constexpr double kMinSuccess = 1e-14;

double resolve(const Value& v, const Bindings& bindings, const OpticalElement& e) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  const auto& name = std::get<ParamRef>(v).name;
  auto it = bindings.find(name);
  if (it == bindings.end()) {
    throw NetlistError(NetlistErrorCode::kUnboundParameter, e.line, 1,
                       "parameter '" + name + "' of element " + e.label + " is not bound");
  }
  return it->second;
}

void require_unit_interval(double x, const OpticalElement& e, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw NetlistError(NetlistErrorCode::kValueOutOfRange, e.line, 1,
                       std::string(what) + " of element " + e.label + " is " +
                           std::to_string(x) + ", outside [0, 1]");
  }
}

// Full-space relabeling for a beam splitter: in[k] -> out[k]; output modes
// that were not inputs hand their (vacuum) contents back to the freed inputs.
std::vector<std::size_t> routing(const ModeNetwork& net, const BeamSplitter& bs) {
  const std::size_t n = net.modes().size();
  std::vector<std::size_t> sigma(n);
  for (std::size_t k = 0; k < n; ++k) sigma[k] = k;
  std::array<std::size_t, 2> in{net.mode_index(bs.in[0]), net.mode_index(bs.in[1])};
  std::array<std::size_t, 2> out{net.mode_index(bs.out[0]), net.mode_index(bs.out[1])};
  std::vector<std::size_t> displaced;
  std::vector<std::size_t> freed;
  for (std::size_t o : out) {
    if (o != in[0] && o != in[1]) displaced.push_back(o);
  }
  for (std::size_t i : in) {
    if (i != out[0] && i != out[1]) freed.push_back(i);
  }
  sigma[in[0]] = out[0];
  sigma[in[1]] = out[1];
  for (std::size_t k = 0; k < displaced.size(); ++k) sigma[displaced[k]] = freed[k];
  return sigma;
}

CMatrix two_photon_operator(Complex direct, Complex exchanged) {
  return direct * CMatrix::Identity(4, 4) + exchanged * swap_operator();
}

struct PathSplit {
  // Amplitude matrices grouped by the which-arm label a path acquires.
  std::vector<CMatrix> labelled;
  CMatrix coherent;
};

PathSplit split_by_arm(const ModeNetwork& net, const Bindings& bindings,
                       const Imperfections& imp) {
  PathSplit split;
  split.coherent = transfer_matrix(net, bindings, imp).entries;
  if (imp.arm_overlap >= 1.0) return split;
  const OpticalElement* rec = net.find_element(imp.recombiner);
  const auto* bs = rec ? std::get_if<BeamSplitter>(&rec->kind) : nullptr;
  if (bs == nullptr) {
    throw std::invalid_argument("arm_overlap < 1 needs a recombiner beam splitter named '" +
                                imp.recombiner + "'");
  }
  const std::array<Blocking, 1> block_first = {Blocking{imp.recombiner, bs->in[0]}};
  const std::array<Blocking, 1> block_second = {Blocking{imp.recombiner, bs->in[1]}};
  const CMatrix without_first = transfer_matrix(net, bindings, imp, block_first).entries;
  const CMatrix without_second = transfer_matrix(net, bindings, imp, block_second).entries;
  const CMatrix via_first = split.coherent - without_first;
  const CMatrix via_second = split.coherent - without_second;
  split.labelled = {split.coherent - via_first - via_second, via_first, via_second};
  return split;
}

void add_term(std::vector<ProcessTerm>& terms, double weight, CMatrix op) {
  if (weight <= 0.0 || op.norm() < kNegligibleOperator) return;
  terms.push_back({weight, std::move(op)});
}

// Terms for one coherence class given amplitude matrices for the photon
// detected in out1 (x) and in out2 (y).
void add_pair_terms(std::vector<ProcessTerm>& terms, double weight, double v,
                    const CMatrix& x, const CMatrix& y, std::size_t a, std::size_t b,
                    std::size_t o1, std::size_t o2) {
  const Complex direct = x(o1, a) * y(o2, b);
  const Complex exchanged = x(o1, b) * y(o2, a);
  add_term(terms, weight * v, two_photon_operator(direct, exchanged));
  add_term(terms, weight * (1.0 - v), two_photon_operator(direct, 0.0));
  add_term(terms, weight * (1.0 - v), two_photon_operator(0.0, exchanged));
}

}  // namespace

Imperfections Imperfections::laboratory() {
  Imperfections imp;
  imp.hom_overlap = 0.97;
  imp.arm_overlap = 0.98;
  imp.phase_jitter_sigma = 0.03 * 2.0 * std::numbers::pi;
  return imp;
}

void Imperfections::validate() const {
  auto unit = [](double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
  };
  unit(hom_overlap, "hom_overlap");
  unit(arm_overlap, "arm_overlap");
  unit(lower_arm_attenuation, "lower_arm_attenuation");
  if (!(phase_jitter_sigma >= 0.0) || !std::isfinite(phase_jitter_sigma)) {
    throw std::invalid_argument("phase_jitter_sigma must be finite and non-negative");
  }
}

bool Imperfections::is_ideal() const {
  return hom_overlap == 1.0 && arm_overlap == 1.0 && phase_jitter_sigma == 0.0 &&
         lower_arm_attenuation == 1.0;
}

Complex ModeMatrix::at(std::string_view out, std::string_view in) const {
  auto index = [&](std::string_view m) {
    auto it = std::find(modes.begin(), modes.end(), m);
    if (it == modes.end()) throw std::invalid_argument("unknown mode " + std::string(m));
    return static_cast<Eigen::Index>(it - modes.begin());
  };
  return entries(index(out), index(in));
}

double ModeMatrix::unitarity_defect() const {
  const auto n = entries.rows();
  return (entries.adjoint() * entries - CMatrix::Identity(n, n)).norm();
}

ModeMatrix transfer_matrix(const ModeNetwork& net, const Bindings& bindings,
                           const Imperfections& imp, std::span<const Blocking> blocks) {
  imp.validate();
  const auto n = static_cast<Eigen::Index>(net.modes().size());
  CMatrix m = CMatrix::Identity(n, n);
  for (const auto& e : net.elements()) {
    for (const auto& blk : blocks) {
      if (blk.element == e.label) m.row(net.mode_index(blk.mode)).setZero();
    }
    if (const auto* bs = std::get_if<BeamSplitter>(&e.kind)) {
      const double r = resolve(bs->reflectance, bindings, e);
      require_unit_interval(r, e, "reflectance");
      const std::vector<std::size_t> sigma = routing(net, *bs);
      CMatrix routed(n, n);
      for (Eigen::Index k = 0; k < n; ++k) routed.row(sigma[k]) = m.row(k);
      const auto o1 = static_cast<Eigen::Index>(net.mode_index(bs->out[0]));
      const auto o2 = static_cast<Eigen::Index>(net.mode_index(bs->out[1]));
      const double t = std::sqrt(1.0 - r);
      const Complex ir = kI * std::sqrt(r);
      const Eigen::RowVectorXcd first = routed.row(o1);
      const Eigen::RowVectorXcd second = routed.row(o2);
      routed.row(o1) = t * first + ir * second;
      routed.row(o2) = ir * first + t * second;
      m = std::move(routed);
    } else if (const auto* ph = std::get_if<PhaseShift>(&e.kind)) {
      const double phase = resolve(ph->phase, bindings, e);
      if (!std::isfinite(phase)) {
        throw NetlistError(NetlistErrorCode::kValueOutOfRange, e.line, 1,
                           "phase of element " + e.label + " is not finite");
      }
      m.row(net.mode_index(ph->mode)) *= std::polar(1.0, phase);
    } else {
      const auto& att = std::get<Attenuator>(e.kind);
      const double t = resolve(att.transmittance, bindings, e);
      require_unit_interval(t, e, "transmittance");
      m.row(net.mode_index(att.mode)) *= t;
    }
  }
  return {std::move(m), net.modes()};
}

ConditionalProcess::ConditionalProcess(std::vector<ProcessTerm> terms)
    : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!(t.weight > 0.0)) throw std::invalid_argument("ConditionalProcess: weights must be positive");
    if (t.op.rows() != 4 || t.op.cols() != 4) {
      throw std::invalid_argument("ConditionalProcess: operators must be 4x4");
    }
  }
}

std::optional<CMatrix> ConditionalProcess::exact_operator() const {
  if (terms_.size() != 1) return std::nullopt;
  return std::sqrt(terms_[0].weight) * terms_[0].op;
}

CMatrix ConditionalProcess::apply_unnormalized(const CMatrix& rho) const {
  CMatrix out = CMatrix::Zero(4, 4);
  for (const auto& t : terms_) out += t.weight * t.op * rho * t.op.adjoint();
  return out;
}

double ConditionalProcess::success_probability(const CMatrix& rho) const {
  return apply_unnormalized(rho).trace().real();
}

ChoiMatrix ConditionalProcess::to_choi() const {
  std::vector<double> w;
  std::vector<CMatrix> ops;
  for (const auto& t : terms_) {
    w.push_back(t.weight);
    ops.push_back(t.op);
  }
  return ChoiMatrix::from_operators(w, ops, ChoiScale::kSuccessProbability);
}

ConditionalProcess conditional_gate(const ModeNetwork& net, const Bindings& bindings,
                                    const Imperfections& imp) {
  imp.validate();
  if (!net.postselect()) {
    throw NetlistError(NetlistErrorCode::kPostselect, 0, 0,
                       "network has no post-selection pattern");
  }
  const auto [in_a, in_b] = net.photon_inputs();
  const std::size_t a = net.mode_index(in_a);
  const std::size_t b = net.mode_index(in_b);
  const std::size_t o1 = net.mode_index(net.postselect()->first);
  const std::size_t o2 = net.mode_index(net.postselect()->second);

  const PathSplit split = split_by_arm(net, bindings, imp);
  const double v = imp.hom_overlap;
  const double mu = imp.arm_overlap;
  std::vector<ProcessTerm> terms;
  add_pair_terms(terms, mu, v, split.coherent, split.coherent, a, b, o1, o2);
  for (const auto& x : split.labelled) {
    for (const auto& y : split.labelled) {
      add_pair_terms(terms, 1.0 - mu, v, x, y, a, b, o1, o2);
    }
  }
  return ConditionalProcess(std::move(terms));
}

ConditionalProcess conditional_gate(const ModeNetwork& net, GatePhase phi,
                                    const Imperfections& imp) {
  Bindings bindings{{std::string(kPhaseParameter), phi.radians()},
                    {std::string(kAttenuationParameter), imp.lower_arm_attenuation}};
  if (imp.lower_arm_attenuation != 1.0) {
    const auto names = net.parameter_names();
    if (std::find(names.begin(), names.end(), kAttenuationParameter) == names.end()) {
      throw std::invalid_argument("network has no 'atten' parameter to attenuate");
    }
  }
  return conditional_gate(net, bindings, imp);
}

ProcessOutput apply_process(const ConditionalProcess& proc, const qmath::DensityMatrix& rho_in) {
  if (rho_in.dim() != 4) throw std::invalid_argument("apply_process: need a two-qubit state");
  const CMatrix out = proc.apply_unnormalized(rho_in.matrix());
  const double p = out.trace().real();
  if (!(p >= kMinSuccess)) {
    throw PostselectionFailure("post-selection never succeeds for this input");
  }
  return {qmath::DensityMatrix(out / p), p};
}

HomScan hom_scan(const ModeNetwork& net, std::span<const double> overlaps,
                 const Bindings& bindings, std::span<const Blocking> blocks) {
  if (!net.postselect()) {
    throw NetlistError(NetlistErrorCode::kPostselect, 0, 0,
                       "network has no post-selection pattern");
  }
  const auto [in_a, in_b] = net.photon_inputs();
  const std::size_t a = net.mode_index(in_a);
  const std::size_t b = net.mode_index(in_b);
  const std::size_t o1 = net.mode_index(net.postselect()->first);
  const std::size_t o2 = net.mode_index(net.postselect()->second);
  const CMatrix m = transfer_matrix(net, bindings, Imperfections::ideal(), blocks).entries;

  // Both photons H: direct and exchanged paths lead to the same state.
  const Complex direct = m(o1, a) * m(o2, b);
  const Complex exchanged = m(o1, b) * m(o2, a);
  auto coincidence = [&](double v) {
    return v * std::norm(direct + exchanged) +
           (1.0 - v) * (std::norm(direct) + std::norm(exchanged));
  };
  HomScan scan;
  scan.baseline = coincidence(0.0);
  for (double v : overlaps) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("hom_scan: overlap outside [0, 1]");
    const double c = coincidence(v);
    const double vis = scan.baseline > 0.0 ? (scan.baseline - c) / scan.baseline : 0.0;
    scan.points.push_back({v, c, vis});
  }
  return scan;
}

std::vector<Blocking> fig1_alignment_block() { return {{"BS2", "mid_u"}}; }

std::vector<double> single_photon_fringe(const ModeNetwork& net, std::span<const double> phases,
                                         const Imperfections& imp) {
  if (!net.postselect()) {
    throw NetlistError(NetlistErrorCode::kPostselect, 0, 0,
                       "network has no post-selection pattern");
  }
  const std::size_t a = net.mode_index(net.photon_inputs().first);
  const std::size_t o = net.mode_index(net.postselect()->second);
  std::vector<double> out;
  for (double phi : phases) {
    Bindings bindings{{std::string(kPhaseParameter), phi},
                      {std::string(kAttenuationParameter), imp.lower_arm_attenuation}};
    const PathSplit split = split_by_arm(net, bindings, imp);
    double p = imp.arm_overlap * std::norm(split.coherent(o, a));
    for (const auto& x : split.labelled) p += (1.0 - imp.arm_overlap) * std::norm(x(o, a));
    out.push_back(p);
  }
  return out;
}

double fringe_visibility(std::span<const double> intensities) {
  if (intensities.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(intensities.begin(), intensities.end());
  return *hi + *lo > 0.0 ? (*hi - *lo) / (*hi + *lo) : 0.0;
}

}  // namespace pswap::optics
