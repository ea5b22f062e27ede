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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pswap::optics {

enum class NetlistErrorCode {
  kSyntax,
  kUnknownMode,
  kDuplicateDeclaration,
  kArityMismatch,
  kUnboundParameter,
  kCycle,
  kMultipleWrites,
  kValueOutOfRange,
  kPostselect,
};

std::string_view to_string(NetlistErrorCode code);

/** Diagnostic with a 1-based source position (0 when not tied to a line). */
class NetlistError : public std::runtime_error {
 public:
  NetlistError(NetlistErrorCode code, int line, int column, const std::string& message);

  NetlistErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  NetlistErrorCode code_;
  int line_;
  int column_;
};

struct ParamRef {
  std::string name;
  bool operator==(const ParamRef&) const = default;
};

/** Literal number or `param:NAME`, resolved when the network is lowered. */
using Value = std::variant<double, ParamRef>;

struct BeamSplitter {
  std::array<std::string, 2> in;
  std::array<std::string, 2> out;
  Value reflectance;
};

struct PhaseShift {
  std::string mode;
  Value phase;
};

struct Attenuator {
  std::string mode;
  Value transmittance;  // amplitude transmittance
};

struct OpticalElement {
  std::string label;
  std::variant<BeamSplitter, PhaseShift, Attenuator> kind;
  int line = 0;
};

/**
 * Interferometer netlist: declared spatial modes, optical elements in
 * propagation order, and the coincidence post-selection pair.
 *
 * Modes behave as wire segments. A beam splitter consumes its input modes
 * and produces its output modes; writing into a fresh mode or back into its
 * own inputs (in place) is allowed, writing into an already-consumed mode is
 * a cycle, and producing a live mode twice is a multiple write.
 */
class ModeNetwork {
 public:
  ModeNetwork(std::vector<std::string> modes, std::vector<OpticalElement> elements,
              std::optional<std::pair<std::string, std::string>> postselect);

  const std::vector<std::string>& modes() const { return modes_; }
  const std::vector<OpticalElement>& elements() const { return elements_; }
  const std::optional<std::pair<std::string, std::string>>& postselect() const {
    return postselect_;
  }

  std::size_t mode_index(std::string_view name) const;
  bool has_mode(std::string_view name) const;
  const OpticalElement* find_element(std::string_view label) const;

  /** Modes that are never produced by an element, in declaration order. */
  const std::vector<std::string>& source_modes() const { return sources_; }
  /** The two photon input modes: the first two source modes. */
  std::pair<std::string, std::string> photon_inputs() const;
  std::vector<std::string> parameter_names() const;

 private:
  void validate();

  std::vector<std::string> modes_;
  std::vector<OpticalElement> elements_;
  std::optional<std::pair<std::string, std::string>> postselect_;
  std::vector<std::string> sources_;
};

ModeNetwork parse_network(std::string_view text);
ModeNetwork load_network(const std::filesystem::path& path);

/** Location of data files shipped with the library (fig1.net, ...). */
std::filesystem::path bundled_path(std::string_view file);

}  // namespace pswap::optics
