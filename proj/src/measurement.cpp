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

#include "pswap/measurement.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pswap::measurement {

namespace {

using qmath::DensityMatrix;

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DatasetError("invalid number '" + s + "'");
  }
  return x;
}

std::uint64_t parse_count(const std::string& s) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DatasetError("invalid count '" + s + "'");
  }
  return x;
}

Polarization parse_polarization_field(const std::string& s) {
  if (s.size() == 1) {
    if (auto p = parse_polarization(s[0])) return *p;
  }
  throw DatasetError("invalid polarization '" + s + "'");
}

Basis parse_basis_field(const std::string& s) {
  if (auto b = parse_basis(s)) return *b;
  throw DatasetError("invalid basis '" + s + "'");
}

std::uint64_t cell_key(const InputSetting& in, const BasisSetting& b) {
  return ((static_cast<std::uint64_t>(in.first) * 6 + static_cast<std::uint64_t>(in.second)) * 3 +
          static_cast<std::uint64_t>(b.first)) *
             3 +
         static_cast<std::uint64_t>(b.second);
}

}  // namespace

std::string_view basis_name(Basis b) {
  static constexpr std::array<std::string_view, 3> names = {"HV", "XY", "RL"};
  return names[static_cast<std::size_t>(b)];
}

std::optional<Basis> parse_basis(std::string_view name) {
  for (Basis b : kAllBases) {
    if (basis_name(b) == name) return b;
  }
  return std::nullopt;
}

std::pair<Polarization, Polarization> basis_states(Basis b) {
  switch (b) {
    case Basis::kHV:
      return {Polarization::kH, Polarization::kV};
    case Basis::kXY:
      return {Polarization::kX, Polarization::kY};
    case Basis::kRL:
      break;
  }
  return {Polarization::kR, Polarization::kL};
}

std::string InputSetting::name() const {
  return {polarization_letter(first), polarization_letter(second)};
}

std::vector<InputSetting> all_inputs() {
  std::vector<InputSetting> out;
  for (Polarization a : kAllPolarizations)
    for (Polarization b : kAllPolarizations) out.push_back({a, b});
  return out;
}

std::vector<BasisSetting> all_bases() {
  std::vector<BasisSetting> out;
  for (Basis a : kAllBases)
    for (Basis b : kAllBases) out.push_back({a, b});
  return out;
}

std::vector<Setting> enumerate_settings(std::span<const double> phis) {
  const auto inputs = all_inputs();
  const auto bases = all_bases();
  std::vector<Setting> out;
  out.reserve(phis.size() * inputs.size() * bases.size());
  for (double phi : phis)
    for (const auto& in : inputs)
      for (const auto& b : bases) out.push_back({in, b, phi});
  return out;
}

std::vector<double> phase_grid(int divisor, int last) {
  if (divisor <= 0 || last < 0) throw std::invalid_argument("phase_grid: bad arguments");
  std::vector<double> out;
  for (int k = 0; k <= last; ++k) out.push_back(k * std::numbers::pi / divisor);
  return out;
}

std::array<CVector, 4> outcome_vectors(const BasisSetting& basis) {
  const auto [h1, v1] = basis_states(basis.first);
  const auto [h2, v2] = basis_states(basis.second);
  auto vec = [](Polarization a, Polarization b) {
    return qmath::kron(polarization_state(a).amplitudes(), polarization_state(b).amplitudes());
  };
  return {vec(h1, h2), vec(v1, v2), vec(h1, v2), vec(v1, h2)};
}

Quad born_probabilities(const DensityMatrix& rho, const BasisSetting& basis) {
  if (rho.dim() != 4) throw std::invalid_argument("born_probabilities: need a 4x4 state");
  const auto vectors = outcome_vectors(basis);
  Quad p{};
  for (std::size_t k = 0; k < 4; ++k) {
    p[k] = std::max(0.0, (vectors[k].adjoint() * rho.matrix() * vectors[k])(0, 0).real());
  }
  return p;
}

Quad pair_efficiencies(const DetectorEfficiencies& eta) {
  return {eta[0] * eta[2], eta[1] * eta[3], eta[0] * eta[3], eta[1] * eta[2]};
}

Counts sample_counts(const Quad& probs, double p_success, double flux, double duration,
                     const DetectorEfficiencies& eta, std::mt19937_64& rng) {
  if (p_success < 0.0 || flux < 0.0 || duration < 0.0) {
    throw std::invalid_argument("sample_counts: negative rate, duration or probability");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("sample_counts: negative probability");
    total += p;
  }
  for (double e : eta) {
    if (e < 0.0) throw std::invalid_argument("sample_counts: negative efficiency");
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("sample_counts: probabilities must sum to 1");
  }
  const Quad pair = pair_efficiencies(eta);
  Counts counts{};
  for (std::size_t k = 0; k < 4; ++k) {
    const double mean = flux * duration * p_success * probs[k] * pair[k];
    if (mean > 0.0) {
      std::poisson_distribution<std::uint64_t> poisson(mean);
      counts[k] = poisson(rng);
    }
  }
  return counts;
}

Quad compensate(const Counts& counts, const Quad& pair_eff) {
  Quad out{};
  for (std::size_t k = 0; k < 4; ++k) {
    if (!(pair_eff[k] > 0.0)) throw std::invalid_argument("compensate: zero efficiency");
    out[k] = static_cast<double>(counts[k]) / pair_eff[k];
  }
  return out;
}

Quad compensate(const CoincidenceRecord& record) {
  for (double e : record.efficiencies) {
    if (!(e > 0.0)) throw std::invalid_argument("compensate: zero efficiency");
  }
  return compensate(record.counts, pair_efficiencies(record.efficiencies));
}

std::vector<Observation> to_observations(std::span<const CoincidenceRecord> records) {
  std::vector<Observation> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back({r.setting.input, r.setting.basis, r.setting.phi, compensate(r)});
  }
  return out;
}

bool Dataset::covers_grid(std::span<const double> phis) const {
  const std::size_t cells = all_inputs().size() * all_bases().size();
  for (double phi : phis) {
    std::map<std::uint64_t, int> seen;
    for (const auto& r : records) {
      if (r.setting.phi == phi) ++seen[cell_key(r.setting.input, r.setting.basis)];
    }
    if (seen.size() != cells) return false;
    for (const auto& [key, n] : seen) {
      if (n != 1) return false;
    }
  }
  return true;
}

std::vector<CoincidenceRecord> Dataset::select(double phi) const {
  std::vector<CoincidenceRecord> out;
  for (const auto& r : records) {
    if (r.setting.phi == phi) out.push_back(r);
  }
  return out;
}

std::vector<CoincidenceRecord> Dataset::select(double phi, const InputSetting& input) const {
  std::vector<CoincidenceRecord> out;
  for (const auto& r : records) {
    if (r.setting.phi == phi && r.setting.input == input) out.push_back(r);
  }
  return out;
}

std::mt19937_64 setting_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Dataset generate_dataset(const optics::ModeNetwork& net, std::span<const double> phis,
                         const optics::Imperfections& imp, const GenerationConfig& config) {
  imp.validate();
  Dataset data;
  data.seed = config.seed;
  data.flux = config.flux;
  data.imperfections = imp;
  const std::vector<Setting> settings = enumerate_settings(phis);
  data.records.reserve(settings.size());

  // Without jitter the process depends only on the nominal phase.
  std::map<double, optics::ConditionalProcess> cache;
  for (std::size_t index = 0; index < settings.size(); ++index) {
    const Setting& s = settings[index];
    std::mt19937_64 rng = setting_stream(config.seed, index);
    double phi = s.phi;
    if (imp.phase_jitter_sigma > 0.0) {
      std::normal_distribution<double> jitter(0.0, imp.phase_jitter_sigma);
      phi += jitter(rng);
    }
    if (imp.phase_jitter_sigma > 0.0) cache.clear();
    auto it = cache.find(phi);
    if (it == cache.end()) {
      it = cache.emplace(phi, optics::conditional_gate(net, GatePhase(phi), imp)).first;
    }
    CoincidenceRecord rec;
    rec.setting = s;
    rec.duration = config.duration;
    rec.efficiencies = config.efficiencies;
    const DensityMatrix rho_in = DensityMatrix::from_pure(s.input.state());
    const CMatrix out = it->second.apply_unnormalized(rho_in.matrix());
    const double p = out.trace().real();
    if (p > 0.0) {
      const Quad probs = born_probabilities(DensityMatrix(out / p), s.basis);
      const double sum = probs[0] + probs[1] + probs[2] + probs[3];
      const Quad normalized = {probs[0] / sum, probs[1] / sum, probs[2] / sum, probs[3] / sum};
      rec.counts = sample_counts(normalized, p, config.flux, config.duration,
                                 config.efficiencies, rng);
    }
    data.records.push_back(rec);
  }
  return data;
}

namespace {
constexpr double kExactWeightFloor = 1e-14;
}  // namespace

std::vector<Observation> exact_observations(const optics::ModeNetwork& net,
                                            std::span<const double> phis,
                                            const optics::Imperfections& imp) {
  if (imp.phase_jitter_sigma != 0.0) {
    throw std::invalid_argument("exact_observations: phase jitter must be zero");
  }
  std::vector<Observation> out;
  const auto bases = all_bases();
  for (double phi : phis) {
    const optics::ConditionalProcess proc = optics::conditional_gate(net, GatePhase(phi), imp);
    for (const auto& in : all_inputs()) {
      const CMatrix rho_out = proc.apply_unnormalized(DensityMatrix::from_pure(in.state()).matrix());
      for (const auto& b : bases) {
        const auto vectors = outcome_vectors(b);
        Quad w{};
        for (std::size_t k = 0; k < 4; ++k) {
          const double p = (vectors[k].adjoint() * rho_out * vectors[k])(0, 0).real();
          // Values this small are rounding residue of exact zeros.
          w[k] = p < kExactWeightFloor ? 0.0 : p;
        }
        out.push_back({in, b, phi, w});
      }
    }
  }
  return out;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  const auto& imp = data.imperfections;
  nlohmann::ordered_json meta;
  meta["format"] = "pswap-dataset";
  meta["version"] = 1;
  meta["seed"] = data.seed;
  meta["flux"] = data.flux;
  meta["imperfections"] = {{"hom_overlap", imp.hom_overlap},
                           {"arm_overlap", imp.arm_overlap},
                           {"phase_jitter_sigma", imp.phase_jitter_sigma},
                           {"lower_arm_attenuation", imp.lower_arm_attenuation},
                           {"recombiner", imp.recombiner}};
  meta["fields"] = {"phi", "in1", "in2", "b1", "b2", "c1", "c2", "c3", "c4",
                    "duration", "eta1", "eta2", "eta3", "eta4"};
  out << meta.dump() << '\n';
  for (const auto& r : data.records) {
    const Setting& s = r.setting;
    out << format_double(s.phi) << ' ' << polarization_letter(s.input.first) << ' '
        << polarization_letter(s.input.second) << ' ' << basis_name(s.basis.first) << ' '
        << basis_name(s.basis.second);
    for (auto c : r.counts) out << ' ' << c;
    out << ' ' << format_double(r.duration);
    for (double e : r.efficiencies) out << ' ' << format_double(e);
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DatasetError("missing header");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("bad header: ") + e.what());
  }
  if (!meta.is_object() || meta.value("format", "") != "pswap-dataset" ||
      meta.value("version", 0) != 1) {
    throw DatasetError("unsupported header");
  }
  Dataset data;
  try {
    data.seed = meta.at("seed").get<std::uint64_t>();
    data.flux = meta.at("flux").get<double>();
    const auto& imp = meta.at("imperfections");
    data.imperfections.hom_overlap = imp.at("hom_overlap").get<double>();
    data.imperfections.arm_overlap = imp.at("arm_overlap").get<double>();
    data.imperfections.phase_jitter_sigma = imp.at("phase_jitter_sigma").get<double>();
    data.imperfections.lower_arm_attenuation = imp.at("lower_arm_attenuation").get<double>();
    data.imperfections.recombiner = imp.at("recombiner").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("bad header: ") + e.what());
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string tok; fields >> tok;) f.push_back(tok);
    if (f.size() != 14) {
      throw DatasetError("line " + std::to_string(line_no) + " has " +
                               std::to_string(f.size()) + " fields, expected 14");
    }
    CoincidenceRecord r;
    r.setting.phi = parse_double(f[0]);
    r.setting.input = {parse_polarization_field(f[1]), parse_polarization_field(f[2])};
    r.setting.basis = {parse_basis_field(f[3]), parse_basis_field(f[4])};
    for (std::size_t k = 0; k < 4; ++k) r.counts[k] = parse_count(f[5 + k]);
    r.duration = parse_double(f[9]);
    for (std::size_t k = 0; k < 4; ++k) r.efficiencies[k] = parse_double(f[10 + k]);
    data.records.push_back(r);
  }
  return data;
}

}  // namespace pswap::measurement
