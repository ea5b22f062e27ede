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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pswap/measurement.hpp"
#include "pswap/optics_sim.hpp"
#include "pswap/tomography.hpp"

namespace pswap::pipelines {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Mode { kGateCheck, kTomoState, kTomoProcess, kEfScan, kHomScan };

std::string_view mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct RunConfig {
  Mode mode = Mode::kTomoProcess;
  std::filesystem::path netlist = optics::bundled_path("fig1.net");
  std::vector<double> phases;  // empty: the mode's default grid
  optics::Imperfections imperfections = optics::Imperfections::laboratory();
  measurement::GenerationConfig generation;
  /** Infinite statistics instead of Poisson counts. */
  bool exact = false;
  /** Read records from this dataset instead of simulating them. */
  std::optional<std::filesystem::path> dataset;
  tomography::MlConfig ml;
  std::filesystem::path out_dir = ".";

  void validate() const;
};

/** kpi/4 for k = 0..8 for tomography, kpi/8 for k = 0..16 for ef-scan. */
std::vector<double> default_phases(Mode mode);
std::vector<double> effective_phases(const RunConfig& config);

/** Observations for one nominal phase plus the exposure that scales chi. */
struct PhaseData {
  double phi;
  std::vector<measurement::Observation> observations;
  std::optional<double> exposure;
};

struct Acquisition {
  std::vector<PhaseData> phases;
  std::optional<measurement::Dataset> dataset;  // absent for exact data
};

Acquisition acquire(const optics::ModeNetwork& net, const RunConfig& config);

struct GateCheckRow {
  double phi;
  double operator_distance;  // phase-aligned ||A - c (Pi_+ + t e^{i phi} Pi_-)||_F
  double p_min;
  double p_max;
  bool passed;
};

/**
 * Lowers the network with ideal overlaps (keeping the configured
 * attenuation) and compares the conditional operator with
 * (Pi_+ + t e^{i phi} Pi_-) / (2 sqrt 2); for t = 1 also requires the
 * success probability to be 1/8 for random inputs.
 */
std::vector<GateCheckRow> run_gate_check(const optics::ModeNetwork& net, const RunConfig& config);

struct StateRow {
  double phi;
  measurement::InputSetting input;
  qmath::StateMetrics metrics;
  double eof;
  tomography::StateEstimate estimate;
};

/** ml_state for each input against the ideal target U_phi|in>. */
std::vector<StateRow> reconstruct_states(const PhaseData& data, const tomography::MlConfig& ml,
                                         std::span<const measurement::InputSetting> inputs);

struct Table1Row {
  double phi;
  double f_av;
  double f_min;
  double p_av;
  double p_min;
  double f_chi;
};

struct Table1 {
  std::vector<Table1Row> rows;
  std::vector<tomography::ProcessEstimate> processes;
  std::vector<std::vector<StateRow>> states;
};

Table1 run_table1(const optics::ModeNetwork& net, const RunConfig& config);
Table1 run_table1(const Acquisition& acquisition, const tomography::MlConfig& ml);

/** Laboratory values for comparison only. */
std::vector<Table1Row> reference_table1();

struct EfRow {
  double phi;
  measurement::InputSetting input;
  double ef_reconstructed;
  double ef_analytic;
};

/** Inputs |X>|X>, |Y>|X>, |H>|X>, |R>|X>. */
std::vector<measurement::InputSetting> ef_scan_inputs();
std::vector<EfRow> run_ef_scan(const optics::ModeNetwork& net, const RunConfig& config);
std::vector<EfRow> run_ef_scan(const Acquisition& acquisition, const tomography::MlConfig& ml);

/** |psi>(alpha|psi> + beta|psi_perp>) decomposition of a product input. */
EfInput ef_input_for(const measurement::InputSetting& input, double phi);

struct HomRow {
  double overlap;
  double coincidence;
  double visibility;
};

std::vector<HomRow> run_hom_scan(const optics::ModeNetwork& net, const RunConfig& config);

void write_gate_check_csv(std::ostream& out, std::span<const GateCheckRow> rows);
void write_table1_csv(std::ostream& out, std::span<const Table1Row> rows);
void write_states_csv(std::ostream& out, std::span<const StateRow> rows);
void write_ef_csv(std::ostream& out, std::span<const EfRow> rows);
void write_hom_csv(std::ostream& out, std::span<const HomRow> rows);

nlohmann::ordered_json manifest(const RunConfig& config, const std::string& netlist_text);

struct RunReport {
  /** False when a gate-check assertion failed; no tomography is run then. */
  bool passed = true;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> messages;
};

/**
 * Runs config.mode and writes its artifacts plus manifest.json into
 * config.out_dir. Tomography modes run the gate check first.
 */
RunReport execute(const RunConfig& config);

}  // namespace pswap::pipelines
