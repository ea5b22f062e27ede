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

#include "pswap/pipelines.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pswap::pipelines {

namespace {

using measurement::InputSetting;
using measurement::Observation;

std::string num(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

optics::Imperfections ideal_with_attenuation(const optics::Imperfections& imp) {
  optics::Imperfections out;
  out.lower_arm_attenuation = imp.lower_arm_attenuation;
  out.recombiner = imp.recombiner;
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

CVector random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(4);
  for (auto& c : v) c = Complex(g(rng), g(rng));
  return v / v.norm();
}

}  // namespace

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kGateCheck: return "gate-check";
    case Mode::kTomoState: return "tomo-state";
    case Mode::kTomoProcess: return "tomo-process";
    case Mode::kEfScan: return "ef-scan";
    case Mode::kHomScan: return "hom-scan";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::kGateCheck, Mode::kTomoState, Mode::kTomoProcess, Mode::kEfScan,
                 Mode::kHomScan})
    if (mode_name(m) == name) return m;
  return std::nullopt;
}

void RunConfig::validate() const {
  imperfections.validate();
  ml.validate();
  if (!(generation.flux > 0.0) || !std::isfinite(generation.flux))
    throw std::invalid_argument("flux must be positive");
  if (!(generation.duration > 0.0) || !std::isfinite(generation.duration))
    throw std::invalid_argument("duration must be positive");
  for (double e : generation.efficiencies)
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("efficiencies must lie in (0, 1]");
  for (double phi : phases)
    if (!std::isfinite(phi)) throw std::invalid_argument("phases must be finite");
  if (!std::filesystem::exists(netlist))
    throw std::invalid_argument("netlist not found: " + netlist.string());
  if (dataset && !std::filesystem::exists(*dataset))
    throw std::invalid_argument("dataset not found: " + dataset->string());
}

std::vector<double> default_phases(Mode mode) {
  switch (mode) {
    case Mode::kGateCheck: {
      std::vector<double> out;
      for (int k = 0; k < 20; ++k) out.push_back(2.0 * std::numbers::pi * k / 20.0);
      return out;
    }
    case Mode::kEfScan: return measurement::phase_grid(8, 16);
    case Mode::kHomScan: return {0.0};
    default: return measurement::phase_grid(4, 8);
  }
}

std::vector<double> effective_phases(const RunConfig& config) {
  return config.phases.empty() ? default_phases(config.mode) : config.phases;
}

Acquisition acquire(const optics::ModeNetwork& net, const RunConfig& config) {
  Acquisition acq;
  std::vector<double> phis = effective_phases(config);

  if (config.dataset) {
    std::ifstream in(*config.dataset, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + config.dataset->string());
    measurement::Dataset data = measurement::read_dataset(in);
    if (config.phases.empty()) {
      phis.clear();
      for (const auto& r : data.records)
        if (std::find(phis.begin(), phis.end(), r.setting.phi) == phis.end())
          phis.push_back(r.setting.phi);
    }
    for (double phi : phis) {
      auto records = data.select(phi);
      if (records.empty()) throw std::runtime_error("dataset has no records at phi=" + num(phi));
      double duration = records.front().duration;
      std::optional<double> exposure = data.flux * duration;
      for (const auto& r : records)
        if (r.duration != duration) exposure.reset();
      acq.phases.push_back({phi, measurement::to_observations(records), exposure});
    }
    acq.dataset = std::move(data);
    return acq;
  }

  if (config.exact) {
    optics::Imperfections imp = config.imperfections;
    imp.phase_jitter_sigma = 0.0;  // expectation values carry no per-setting noise
    for (double phi : phis) {
      const double one[] = {phi};
      acq.phases.push_back({phi, measurement::exact_observations(net, one, imp), 1.0});
    }
    return acq;
  }

  measurement::Dataset data =
      measurement::generate_dataset(net, phis, config.imperfections, config.generation);
  for (double phi : phis) {
    acq.phases.push_back({phi, measurement::to_observations(data.select(phi)),
                          config.generation.flux * config.generation.duration});
  }
  acq.dataset = std::move(data);
  return acq;
}

std::vector<GateCheckRow> run_gate_check(const optics::ModeNetwork& net, const RunConfig& config) {
  const optics::Imperfections imp = ideal_with_attenuation(config.imperfections);
  const double t = imp.lower_arm_attenuation;
  std::mt19937_64 rng(config.generation.seed);
  std::vector<CVector> probes;
  for (int i = 0; i < 100; ++i) probes.push_back(random_state(rng));
  for (InputSetting in : measurement::all_inputs()) probes.push_back(in.state().amplitudes());

  std::vector<GateCheckRow> rows;
  for (double phi : effective_phases(config)) {
    GatePhase gp(phi);
    auto proc = optics::conditional_gate(net, gp, imp);
    auto op = proc.exact_operator();
    GateCheckRow row{phi, std::numeric_limits<double>::infinity(), 0.0, 0.0, false};
    if (op) {
      CMatrix expected = partial_symmetrizer(gp, t) / (2.0 * std::numbers::sqrt2);
      if (t == 1.0) {
        row.operator_distance = qmath::phase_aligned_distance(*op, expected);
      } else {
        // Only the shape is fixed when the singlet is damped.
        row.operator_distance =
            qmath::phase_aligned_distance(*op / op->norm(), expected / expected.norm());
      }
      row.p_min = std::numeric_limits<double>::infinity();
      row.p_max = 0.0;
      for (const CVector& psi : probes) {
        CVector out = *op * psi;
        double p = out.squaredNorm();
        row.p_min = std::min(row.p_min, p);
        row.p_max = std::max(row.p_max, p);
      }
      row.passed = row.operator_distance < 1e-10;
      if (t == 1.0)
        row.passed = row.passed && std::abs(row.p_min - 0.125) < 1e-10 &&
                     std::abs(row.p_max - 0.125) < 1e-10;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<StateRow> reconstruct_states(const PhaseData& data, const tomography::MlConfig& ml,
                                         std::span<const InputSetting> inputs) {
  const CMatrix u = partial_swap_unitary(GatePhase(data.phi));
  std::vector<StateRow> rows;
  for (const InputSetting& in : inputs) {
    std::vector<Observation> subset;
    for (const Observation& o : data.observations)
      if (o.input == in) subset.push_back(o);
    auto est = tomography::ml_state(subset, ml);
    CVector target = u * in.state().amplitudes();
    auto metrics = qmath::state_metrics(est.rho, qmath::PureState::normalized(target));
    double eof = qmath::eof_two_qubit(est.rho);
    rows.push_back({data.phi, in, metrics, eof, std::move(est)});
  }
  return rows;
}

Table1 run_table1(const Acquisition& acquisition, const tomography::MlConfig& ml) {
  Table1 table;
  const auto inputs = measurement::all_inputs();
  for (const PhaseData& pd : acquisition.phases) {
    auto states = reconstruct_states(pd, ml, inputs);
    std::vector<double> f, p;
    for (const auto& s : states) {
      f.push_back(s.metrics.fidelity);
      p.push_back(s.metrics.purity);
    }
    auto proc = tomography::ml_process(pd.observations, ml, pd.exposure);
    double f_chi = tomography::process_fidelity(proc.chi, ideal_choi(GatePhase(pd.phi)));
    table.rows.push_back({pd.phi, mean(f), *std::min_element(f.begin(), f.end()), mean(p),
                          *std::min_element(p.begin(), p.end()), f_chi});
    table.processes.push_back(std::move(proc));
    table.states.push_back(std::move(states));
  }
  return table;
}

Table1 run_table1(const optics::ModeNetwork& net, const RunConfig& config) {
  return run_table1(acquire(net, config), config.ml);
}

std::vector<Table1Row> reference_table1() {
  constexpr double pi = std::numbers::pi;
  return {
      {0.0, 0.960, 0.930, 0.957, 0.917, 0.946},
      {pi / 4, 0.942, 0.892, 0.938, 0.863, 0.928},
      {pi / 2, 0.924, 0.876, 0.895, 0.804, 0.906},
      {3 * pi / 4, 0.929, 0.878, 0.908, 0.820, 0.914},
      {pi, 0.956, 0.929, 0.956, 0.904, 0.942},
      {5 * pi / 4, 0.943, 0.882, 0.939, 0.848, 0.930},
      {3 * pi / 2, 0.910, 0.849, 0.900, 0.790, 0.888},
      {7 * pi / 4, 0.941, 0.875, 0.923, 0.831, 0.923},
      {2 * pi, 0.959, 0.926, 0.959, 0.901, 0.945},
  };
}

std::vector<InputSetting> ef_scan_inputs() {
  using P = Polarization;
  return {{P::kX, P::kX}, {P::kY, P::kX}, {P::kH, P::kX}, {P::kR, P::kX}};
}

EfInput ef_input_for(const InputSetting& input, double phi) {
  const CVector& psi = polarization_state(input.first).amplitudes();
  const CVector& second = polarization_state(input.second).amplitudes();
  CVector perp = orthogonal_state(polarization_state(input.first)).amplitudes();
  return EfInput(psi.dot(second), perp.dot(second), GatePhase(phi));
}

std::vector<EfRow> run_ef_scan(const optics::ModeNetwork& net, const RunConfig& config) {
  return run_ef_scan(acquire(net, config), config.ml);
}

std::vector<EfRow> run_ef_scan(const Acquisition& acq, const tomography::MlConfig& ml) {
  const auto inputs = ef_scan_inputs();
  std::vector<EfRow> rows;
  for (const PhaseData& pd : acq.phases) {
    for (const StateRow& s : reconstruct_states(pd, ml, inputs))
      rows.push_back({pd.phi, s.input, s.eof, analytic_ef(ef_input_for(s.input, pd.phi))});
  }
  return rows;
}

std::vector<HomRow> run_hom_scan(const optics::ModeNetwork& net, const RunConfig& config) {
  std::set<double> grid;
  for (int k = 0; k <= 20; ++k) grid.insert(k / 20.0);
  grid.insert(config.imperfections.hom_overlap);
  std::vector<double> overlaps(grid.begin(), grid.end());

  optics::Bindings bindings;
  for (const auto& name : net.parameter_names()) {
    if (name == optics::kPhaseParameter) bindings[name] = effective_phases(config).front();
    else if (name == optics::kAttenuationParameter)
      bindings[name] = config.imperfections.lower_arm_attenuation;
  }
  std::vector<optics::Blocking> blocks;
  if (net.find_element("BS2") && net.has_mode("mid_u")) blocks = optics::fig1_alignment_block();

  auto scan = optics::hom_scan(net, overlaps, bindings, blocks);
  std::vector<HomRow> rows;
  for (const auto& p : scan.points) rows.push_back({p.overlap, p.coincidence, p.visibility});
  return rows;
}

void write_gate_check_csv(std::ostream& out, std::span<const GateCheckRow> rows) {
  out << "phi,operator_distance,p_min,p_max,passed\n";
  for (const auto& r : rows)
    out << num(r.phi) << ',' << num(r.operator_distance) << ',' << num(r.p_min) << ','
        << num(r.p_max) << ',' << (r.passed ? "true" : "false") << '\n';
}

void write_table1_csv(std::ostream& out, std::span<const Table1Row> rows) {
  out << "phi,F_av,F_min,P_av,P_min,F_chi\n";
  for (const auto& r : rows)
    out << num(r.phi) << ',' << num(r.f_av) << ',' << num(r.f_min) << ',' << num(r.p_av) << ','
        << num(r.p_min) << ',' << num(r.f_chi) << '\n';
}

void write_states_csv(std::ostream& out, std::span<const StateRow> rows) {
  out << "phi,input,fidelity,purity,trace_distance,E_f,iterations,converged\n";
  for (const auto& r : rows)
    out << num(r.phi) << ',' << r.input.name() << ',' << num(r.metrics.fidelity) << ','
        << num(r.metrics.purity) << ',' << num(r.metrics.trace_distance) << ',' << num(r.eof)
        << ',' << r.estimate.diagnostics.iterations << ','
        << (r.estimate.diagnostics.converged ? "true" : "false") << '\n';
}

void write_ef_csv(std::ostream& out, std::span<const EfRow> rows) {
  out << "phi,input,E_f_reconstructed,E_f_analytic\n";
  for (const auto& r : rows)
    out << num(r.phi) << ',' << r.input.name() << ',' << num(r.ef_reconstructed) << ','
        << num(r.ef_analytic) << '\n';
}

void write_hom_csv(std::ostream& out, std::span<const HomRow> rows) {
  out << "overlap,coincidence,visibility\n";
  for (const auto& r : rows)
    out << num(r.overlap) << ',' << num(r.coincidence) << ',' << num(r.visibility) << '\n';
}

nlohmann::ordered_json manifest(const RunConfig& config, const std::string& netlist_text) {
  nlohmann::ordered_json j;
  j["tool"] = "pswap";
  j["version"] = kVersion;
  j["mode"] = mode_name(config.mode);
  j["netlist"] = {{"path", config.netlist.string()}, {"text", netlist_text}};
  j["phases"] = effective_phases(config);
  const auto& imp = config.imperfections;
  j["imperfections"] = {{"hom_overlap", imp.hom_overlap},
                        {"arm_overlap", imp.arm_overlap},
                        {"phase_jitter_sigma", imp.phase_jitter_sigma},
                        {"lower_arm_attenuation", imp.lower_arm_attenuation},
                        {"recombiner", imp.recombiner}};
  j["flux"] = config.generation.flux;
  j["duration"] = config.generation.duration;
  j["efficiencies"] = config.generation.efficiencies;
  j["seed"] = config.generation.seed;
  j["exact"] = config.exact;
  j["dataset"] = config.dataset ? nlohmann::ordered_json(config.dataset->string()) : nullptr;
  j["ml"] = {{"max_iterations", config.ml.max_iterations},
             {"stop_delta", config.ml.stop_delta},
             {"dilution", config.ml.dilution}};
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  return j;
}

RunReport execute(const RunConfig& config) {
  config.validate();
  const std::string text = read_text(config.netlist);
  const optics::ModeNetwork net = optics::parse_network(text);
  std::filesystem::create_directories(config.out_dir);

  RunReport report;
  auto emit = [&](const std::string& name, auto&& writer) {
    auto path = config.out_dir / name;
    auto out = open_output(path);
    writer(out);
    report.outputs.push_back(path);
  };

  emit("manifest.json", [&](std::ostream& o) { o << manifest(config, text).dump(2) << '\n'; });

  if (config.mode == Mode::kHomScan) {
    auto rows = run_hom_scan(net, config);
    emit("hom_scan.csv", [&](std::ostream& o) { write_hom_csv(o, rows); });
    std::vector<double> fringe_phases;
    for (int k = 0; k < 64; ++k) fringe_phases.push_back(2.0 * std::numbers::pi * k / 64.0);
    auto fringe = optics::single_photon_fringe(net, fringe_phases, config.imperfections);
    emit("fringe.csv", [&](std::ostream& o) {
      o << "phi,intensity\n";
      for (std::size_t k = 0; k < fringe.size(); ++k)
        o << num(fringe_phases[k]) << ',' << num(fringe[k]) << '\n';
    });
    for (const auto& r : rows)
      if (r.overlap == config.imperfections.hom_overlap)
        report.messages.push_back("HOM visibility at v=" + num(r.overlap) + ": " +
                                  num(r.visibility));
    report.messages.push_back("fringe visibility: " + num(optics::fringe_visibility(fringe)));
    return report;
  }

  // Gate check precedes any tomography; its phases are the run's phases.
  auto gate_rows = run_gate_check(net, config);
  bool gate_ok = std::all_of(gate_rows.begin(), gate_rows.end(),
                             [](const GateCheckRow& r) { return r.passed; });
  if (config.mode == Mode::kGateCheck) {
    emit("gate_check.csv", [&](std::ostream& o) { write_gate_check_csv(o, gate_rows); });
  }
  for (const auto& r : gate_rows)
    if (!r.passed)
      report.messages.push_back("gate check failed at phi=" + num(r.phi) +
                                " (distance " + num(r.operator_distance) + ", p in [" +
                                num(r.p_min) + ", " + num(r.p_max) + "])");
  if (!gate_ok) {
    report.passed = false;
    return report;
  }
  report.messages.push_back("gate check passed at " + std::to_string(gate_rows.size()) +
                            " phases");
  if (config.mode == Mode::kGateCheck) return report;

  Acquisition acq = acquire(net, config);
  if (acq.dataset && !config.dataset) {
    emit("dataset.txt", [&](std::ostream& o) { measurement::write_dataset(o, *acq.dataset); });
  }

  switch (config.mode) {
    case Mode::kTomoState: {
      std::vector<StateRow> rows;
      nlohmann::ordered_json states = nlohmann::ordered_json::array();
      const auto inputs = measurement::all_inputs();
      for (const PhaseData& pd : acq.phases) {
        for (auto& r : reconstruct_states(pd, config.ml, inputs)) {
          states.push_back({{"phi", r.phi},
                            {"input", r.input.name()},
                            {"report", tomography::report_json(
                                           r.estimate.rho.matrix(), r.estimate.diagnostics,
                                           {{"fidelity", r.metrics.fidelity},
                                            {"purity", r.metrics.purity},
                                            {"trace_distance", r.metrics.trace_distance},
                                            {"E_f", r.eof}})}});
          rows.push_back(std::move(r));
        }
      }
      emit("states.csv", [&](std::ostream& o) { write_states_csv(o, rows); });
      emit("states.json", [&](std::ostream& o) { o << states.dump(2) << '\n'; });
      break;
    }
    case Mode::kTomoProcess: {
      Table1 table = run_table1(acq, config.ml);
      emit("table1.csv", [&](std::ostream& o) { write_table1_csv(o, table.rows); });
      auto ref = reference_table1();
      emit("table1_reference.csv", [&](std::ostream& o) { write_table1_csv(o, ref); });
      for (std::size_t k = 0; k < table.processes.size(); ++k) {
        const auto& proc = table.processes[k];
        auto j = tomography::report_json(proc.chi.matrix(), proc.diagnostics,
                                         {{"phi", table.rows[k].phi},
                                          {"F_chi", table.rows[k].f_chi},
                                          {"trace", proc.chi.trace()}});
        j["scale"] = to_string(proc.chi.scale());
        emit("process_" + std::to_string(k) + ".json",
             [&](std::ostream& o) { o << j.dump(2) << '\n'; });
      }
      break;
    }
    case Mode::kEfScan: {
      auto rows = run_ef_scan(acq, config.ml);
      emit("ef_scan.csv", [&](std::ostream& o) { write_ef_csv(o, rows); });
      break;
    }
    default: break;
  }
  return report;
}

}  // namespace pswap::pipelines
