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

// Command-line front end: one subcommand per pipeline.

#include <charconv>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pswap/pipelines.hpp"

namespace {

using pswap::pipelines::Mode;
using pswap::pipelines::RunConfig;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kParse = 3,
  kPipeline = 4,
  kAssertion = 5,
};

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 success, 2 usage error, 3 netlist or dataset parse error,\n"
    "4 pipeline error, 5 gate-check assertion failure.";

/** "0.5", "pi", "3pi/4", "-pi/8", "2*pi" or "1.2/3". */
double parse_phase(std::string text) {
  std::erase_if(text, [](char c) { return c == ' ' || c == '*'; });
  if (text.empty()) throw std::invalid_argument("empty phase");
  double scale = 1.0;
  std::string numer = text, denom;
  if (auto slash = text.find('/'); slash != std::string::npos) {
    numer = text.substr(0, slash);
    denom = text.substr(slash + 1);
  }
  if (auto p = numer.find("pi"); p != std::string::npos) {
    if (p + 2 != numer.size()) throw std::invalid_argument("bad phase: " + text);
    numer.erase(p);
    scale = std::numbers::pi;
    if (numer.empty() || numer == "+") numer = "1";
    else if (numer == "-") numer = "-1";
  }
  auto to_double = [&](const std::string& s) {
    double v = 0.0;
    const char* first = s.data() + (s.starts_with('+') ? 1 : 0);
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      throw std::invalid_argument("bad phase: " + text);
    return v;
  };
  double value = to_double(numer) * scale;
  if (!denom.empty()) {
    double d = to_double(denom);
    if (d == 0.0) throw std::invalid_argument("bad phase: " + text);
    value /= d;
  }
  return value;
}

/** "D:K" -> k pi / D for k = 0..K. */
std::vector<double> parse_grid(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("grid must be DIVISOR:LAST");
  int divisor = 0, last = 0;
  auto parse_int = [&](std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw std::invalid_argument("grid must be DIVISOR:LAST");
  };
  parse_int(std::string_view(text).substr(0, colon), divisor);
  parse_int(std::string_view(text).substr(colon + 1), last);
  if (divisor <= 0 || last < 0) throw std::invalid_argument("grid needs DIVISOR > 0, LAST >= 0");
  return pswap::measurement::phase_grid(divisor, last);
}

struct Options {
  std::string net;
  std::vector<std::string> phi;
  std::string phi_grid;
  double flux = pswap::measurement::kDefaultFlux;
  double duration = pswap::measurement::kDefaultDuration;
  std::uint64_t seed = 1;
  double v = 0.97;
  double mu = 0.98;
  double jitter = 0.03;  // fraction of a 2 pi fringe period
  double atten = 1.0;
  std::vector<double> eta{pswap::measurement::kDefaultEfficiencies.begin(),
                          pswap::measurement::kDefaultEfficiencies.end()};
  std::string out = ".";
  std::string data;
  bool exact = false;
  bool ideal = false;
  int max_iterations = pswap::tomography::MlConfig{}.max_iterations;
  double stop_delta = pswap::tomography::MlConfig{}.stop_delta;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--net", o.net, "Netlist file (default: bundled fig1.net)");
  auto* phi = sub->add_option("--phi", o.phi, "Phase values, e.g. 0,pi/2,3pi/4")->delimiter(',');
  sub->add_option("--phi-grid", o.phi_grid, "Phase grid DIVISOR:LAST giving k*pi/DIVISOR")
      ->excludes(phi);
  sub->add_option("--flux", o.flux, "Photon pairs per second at the gate input")
      ->capture_default_str();
  sub->add_option("--duration", o.duration, "Seconds per measurement setting")
      ->capture_default_str();
  sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sub->add_option("--v", o.v, "Two-photon overlap (HOM visibility)")->capture_default_str();
  sub->add_option("--mu", o.mu, "Arm overlap at the recombiner")->capture_default_str();
  sub->add_option("--jitter", o.jitter, "Phase jitter sigma as a fraction of 2 pi")
      ->capture_default_str();
  sub->add_option("--atten", o.atten, "Lower-arm amplitude transmittance t")
      ->capture_default_str();
  sub->add_option("--eta", o.eta, "Detector efficiencies D1H,D1V,D2H,D2V")
      ->delimiter(',')
      ->expected(4);
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  sub->add_option("--data", o.data, "Analyse this dataset instead of simulating one");
  sub->add_flag("--exact", o.exact, "Use exact probabilities instead of sampled counts");
  sub->add_flag("--ideal", o.ideal, "Ideal gate: v = mu = 1, no jitter (overrides --v/--mu/--jitter)");
  sub->add_option("--max-iter", o.max_iterations, "Maximum ML iterations")
      ->capture_default_str();
  sub->add_option("--stop-delta", o.stop_delta, "ML log-likelihood convergence threshold")
      ->capture_default_str();
}

RunConfig to_config(const Options& o, Mode mode) {
  RunConfig c;
  c.mode = mode;
  if (!o.net.empty()) c.netlist = o.net;
  if (!o.phi_grid.empty()) c.phases = parse_grid(o.phi_grid);
  for (const auto& p : o.phi) c.phases.push_back(parse_phase(p));
  c.imperfections.hom_overlap = o.ideal ? 1.0 : o.v;
  c.imperfections.arm_overlap = o.ideal ? 1.0 : o.mu;
  c.imperfections.phase_jitter_sigma = o.ideal ? 0.0 : o.jitter * 2.0 * std::numbers::pi;
  c.imperfections.lower_arm_attenuation = o.atten;
  c.generation.flux = o.flux;
  c.generation.duration = o.duration;
  c.generation.seed = o.seed;
  for (std::size_t k = 0; k < 4; ++k) c.generation.efficiencies[k] = o.eta.at(k);
  c.exact = o.exact;
  if (!o.data.empty()) c.dataset = o.data;
  c.ml.max_iterations = o.max_iterations;
  c.ml.stop_delta = o.stop_delta;
  c.out_dir = o.out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-optical partial-SWAP gate: simulation and tomography pipelines"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pswap::pipelines::kVersion));

  Options opts;
  const std::pair<Mode, const char*> commands[] = {
      {Mode::kGateCheck, "Check that the network implements the partial-SWAP operator"},
      {Mode::kTomoState, "Reconstruct the 36 output states for each phase"},
      {Mode::kTomoProcess, "Reconstruct the process matrix; writes table1.csv"},
      {Mode::kEfScan, "Entanglement of formation versus phase for four inputs"},
      {Mode::kHomScan, "Two-photon dip and single-photon fringe"},
  };
  for (const auto& [mode, help] : commands) {
    auto* sub = app.add_subcommand(std::string(pswap::pipelines::mode_name(mode)), help);
    sub->footer(kExitCodeHelp);
    add_common(sub, opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  Mode mode{};
  for (const auto* sub : app.get_subcommands())
    mode = *pswap::pipelines::parse_mode(sub->get_name());

  RunConfig config;
  try {
    config = to_config(opts, mode);
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    auto report = pswap::pipelines::execute(config);
    for (const auto& m : report.messages) std::cout << m << '\n';
    for (const auto& p : report.outputs) std::cout << "wrote " << p.string() << '\n';
    return report.passed ? kOk : kAssertion;
  } catch (const pswap::optics::NetlistError& e) {
    std::cerr << "netlist error: " << e.what() << '\n';
    return kParse;
  } catch (const pswap::measurement::DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPipeline;
  }
}
