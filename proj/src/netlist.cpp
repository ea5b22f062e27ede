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

#include "pswap/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pswap::optics {

std::string_view to_string(NetlistErrorCode code) {
  switch (code) {
    case NetlistErrorCode::kSyntax:
      return "syntax";
    case NetlistErrorCode::kUnknownMode:
      return "unknown-mode";
    case NetlistErrorCode::kDuplicateDeclaration:
      return "duplicate-declaration";
    case NetlistErrorCode::kArityMismatch:
      return "arity-mismatch";
    case NetlistErrorCode::kUnboundParameter:
      return "unbound-parameter";
    case NetlistErrorCode::kCycle:
      return "cycle";
    case NetlistErrorCode::kMultipleWrites:
      return "multiple-writes";
    case NetlistErrorCode::kValueOutOfRange:
      return "value-out-of-range";
    case NetlistErrorCode::kPostselect:
      return "postselect";
  }
  return "unknown";
}

namespace {

std::string format_message(NetlistErrorCode code, int line, int column,
                           const std::string& message) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ", column " << column << ": ";
  os << message << " [" << to_string(code) << "]";
  return os.str();
}

struct Token {
  std::string text;
  int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    tokens.push_back({std::string(line.substr(start, i - start)),
                      static_cast<int>(start) + 1});
  }
  return tokens;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    std::string_view piece = s.substr(start, comma == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : comma - start);
    while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.front())))
      piece.remove_prefix(1);
    while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.back())))
      piece.remove_suffix(1);
    parts.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

class LineParser {
 public:
  LineParser(int line, std::vector<Token> tokens)
      : line_(line), tokens_(std::move(tokens)) {}

  [[noreturn]] void fail(NetlistErrorCode code, int column,
                         const std::string& message) const {
    throw NetlistError(code, line_, column, message);
  }

  const std::vector<Token>& tokens() const { return tokens_; }

  /** key=value arguments after the label; rejects unknown or repeated keys. */
  std::map<std::string, Token> keyed(std::size_t first,
                                     const std::set<std::string>& allowed) const {
    std::map<std::string, Token> out;
    for (std::size_t k = first; k < tokens_.size(); ++k) {
      const Token& t = tokens_[k];
      const std::size_t eq = t.text.find('=');
      if (eq == std::string::npos || eq == 0) {
        fail(NetlistErrorCode::kSyntax, t.column, "expected key=value, got '" + t.text + "'");
      }
      std::string key = t.text.substr(0, eq);
      if (!allowed.contains(key)) {
        fail(NetlistErrorCode::kSyntax, t.column, "unexpected argument '" + key + "'");
      }
      if (out.contains(key)) {
        fail(NetlistErrorCode::kSyntax, t.column, "repeated argument '" + key + "'");
      }
      out.emplace(std::move(key),
                  Token{t.text.substr(eq + 1), t.column + static_cast<int>(eq) + 1});
    }
    return out;
  }

  const Token& require(const std::map<std::string, Token>& args, const std::string& key,
                       int column) const {
    auto it = args.find(key);
    if (it == args.end()) fail(NetlistErrorCode::kSyntax, column, "missing '" + key + "='");
    return it->second;
  }

  std::vector<std::string> mode_list(const Token& t, std::size_t arity,
                                     const std::string& what) const {
    std::vector<std::string> names = split_commas(t.text);
    if (names.size() != arity) {
      fail(NetlistErrorCode::kArityMismatch, t.column,
           what + " expects " + std::to_string(arity) + " mode(s), got " +
               std::to_string(names.size()));
    }
    for (const auto& n : names) {
      if (!is_identifier(n)) {
        fail(NetlistErrorCode::kSyntax, t.column, "invalid mode name '" + n + "'");
      }
    }
    return names;
  }

  Value value(const Token& t, double lo, double hi) const {
    constexpr std::string_view kParam = "param:";
    if (t.text.starts_with(kParam)) {
      std::string name = t.text.substr(kParam.size());
      if (!is_identifier(name)) {
        fail(NetlistErrorCode::kSyntax, t.column, "invalid parameter name '" + name + "'");
      }
      return ParamRef{std::move(name)};
    }
    double v = 0.0;
    const char* begin = t.text.data();
    const char* end = begin + t.text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      fail(NetlistErrorCode::kSyntax, t.column, "invalid number '" + t.text + "'");
    }
    if (v < lo || v > hi) {
      fail(NetlistErrorCode::kValueOutOfRange, t.column,
           "value " + t.text + " outside [" + std::to_string(lo) + ", " +
               std::to_string(hi) + "]");
    }
    return v;
  }

 private:
  int line_;
  std::vector<Token> tokens_;
};

constexpr double kUnbounded = 1e300;

}  // namespace

NetlistError::NetlistError(NetlistErrorCode code, int line, int column,
                           const std::string& message)
    : std::runtime_error(format_message(code, line, column, message)),
      code_(code),
      line_(line),
      column_(column) {}

ModeNetwork::ModeNetwork(std::vector<std::string> modes,
                         std::vector<OpticalElement> elements,
                         std::optional<std::pair<std::string, std::string>> postselect)
    : modes_(std::move(modes)),
      elements_(std::move(elements)),
      postselect_(std::move(postselect)) {
  validate();
}

void ModeNetwork::validate() {
  std::set<std::string> declared;
  for (const auto& m : modes_) {
    if (!declared.insert(m).second) {
      throw NetlistError(NetlistErrorCode::kDuplicateDeclaration, 0, 0,
                         "mode '" + m + "' declared twice");
    }
  }

  enum class Wire { kUnused, kSource, kProduced, kConsumed };
  std::map<std::string, Wire> wire;
  for (const auto& m : modes_) wire[m] = Wire::kUnused;
  std::set<std::string> labels;
  std::set<std::string> produced;

  auto check_known = [&](const OpticalElement& e, const std::string& m) {
    if (!declared.contains(m)) {
      throw NetlistError(NetlistErrorCode::kUnknownMode, e.line, 1,
                         "element " + e.label + " references undeclared mode '" + m + "'");
    }
  };
  auto read = [&](const OpticalElement& e, const std::string& m) {
    check_known(e, m);
    Wire& w = wire[m];
    if (w == Wire::kConsumed) {
      throw NetlistError(NetlistErrorCode::kCycle, e.line, 1,
                         "element " + e.label + " reads mode '" + m +
                             "' after it was consumed upstream");
    }
    if (w == Wire::kUnused) w = Wire::kSource;
  };

  for (const auto& e : elements_) {
    if (!labels.insert(e.label).second) {
      throw NetlistError(NetlistErrorCode::kDuplicateDeclaration, e.line, 1,
                         "element label '" + e.label + "' used twice");
    }
    if (const auto* bs = std::get_if<BeamSplitter>(&e.kind)) {
      if (bs->in[0] == bs->in[1] || bs->out[0] == bs->out[1]) {
        throw NetlistError(NetlistErrorCode::kArityMismatch, e.line, 1,
                           "beam splitter " + e.label + " needs two distinct modes per side");
      }
      for (const auto& m : bs->in) read(e, m);
      for (const auto& m : bs->out) {
        check_known(e, m);
        const bool in_place = m == bs->in[0] || m == bs->in[1];
        if (in_place) continue;
        Wire& w = wire[m];
        if (w == Wire::kConsumed) {
          throw NetlistError(NetlistErrorCode::kCycle, e.line, 1,
                             "beam splitter " + e.label + " feeds back into consumed mode '" +
                                 m + "'");
        }
        if (w != Wire::kUnused) {
          throw NetlistError(NetlistErrorCode::kMultipleWrites, e.line, 1,
                             "mode '" + m + "' is already carrying a signal");
        }
        w = Wire::kProduced;
        produced.insert(m);
      }
      for (const auto& m : bs->in) {
        if (m != bs->out[0] && m != bs->out[1]) wire[m] = Wire::kConsumed;
      }
    } else if (const auto* ph = std::get_if<PhaseShift>(&e.kind)) {
      read(e, ph->mode);
    } else {
      read(e, std::get<Attenuator>(e.kind).mode);
    }
  }

  if (postselect_) {
    const auto& [a, b] = *postselect_;
    for (const auto& m : {a, b}) {
      if (!declared.contains(m)) {
        throw NetlistError(NetlistErrorCode::kUnknownMode, 0, 0,
                           "post-selection references undeclared mode '" + m + "'");
      }
    }
    if (a == b) {
      throw NetlistError(NetlistErrorCode::kPostselect, 0, 0,
                         "post-selection needs two distinct modes");
    }
  }

  sources_.clear();
  for (const auto& m : modes_) {
    if (!produced.contains(m)) sources_.push_back(m);
  }
}

std::size_t ModeNetwork::mode_index(std::string_view name) const {
  auto it = std::find(modes_.begin(), modes_.end(), name);
  if (it == modes_.end()) {
    throw NetlistError(NetlistErrorCode::kUnknownMode, 0, 0,
                       "unknown mode '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - modes_.begin());
}

bool ModeNetwork::has_mode(std::string_view name) const {
  return std::find(modes_.begin(), modes_.end(), name) != modes_.end();
}

const OpticalElement* ModeNetwork::find_element(std::string_view label) const {
  for (const auto& e : elements_) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

std::pair<std::string, std::string> ModeNetwork::photon_inputs() const {
  if (sources_.size() < 2) {
    throw NetlistError(NetlistErrorCode::kArityMismatch, 0, 0,
                       "network needs at least two input modes");
  }
  return {sources_[0], sources_[1]};
}

std::vector<std::string> ModeNetwork::parameter_names() const {
  std::set<std::string> names;
  auto collect = [&](const Value& v) {
    if (const auto* p = std::get_if<ParamRef>(&v)) names.insert(p->name);
  };
  for (const auto& e : elements_) {
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, BeamSplitter>) collect(k.reflectance);
          if constexpr (std::is_same_v<T, PhaseShift>) collect(k.phase);
          if constexpr (std::is_same_v<T, Attenuator>) collect(k.transmittance);
        },
        e.kind);
  }
  return {names.begin(), names.end()};
}

ModeNetwork parse_network(std::string_view text) {
  std::vector<std::string> modes;
  std::map<std::string, int> mode_lines;
  std::vector<OpticalElement> elements;
  std::optional<std::pair<std::string, std::string>> postselect;
  int postselect_line = 0;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const std::size_t hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    LineParser p(line_no, tokenize(raw));
    const auto& tok = p.tokens();
    if (tok.empty()) continue;
    const std::string& keyword = tok[0].text;

    if (keyword == "mode") {
      if (tok.size() < 2) p.fail(NetlistErrorCode::kSyntax, tok[0].column, "mode needs a name");
      const int col = tok[1].column;
      std::string joined;
      for (std::size_t k = 1; k < tok.size(); ++k) joined += tok[k].text;
      for (auto& name : split_commas(joined)) {
        if (!is_identifier(name)) {
          p.fail(NetlistErrorCode::kSyntax, col, "invalid mode name '" + name + "'");
        }
        if (mode_lines.contains(name)) {
          p.fail(NetlistErrorCode::kDuplicateDeclaration, col,
                 "mode '" + name + "' already declared on line " +
                     std::to_string(mode_lines[name]));
        }
        mode_lines[name] = line_no;
        modes.push_back(std::move(name));
      }
      continue;
    }

    if (keyword == "postselect") {
      if (tok.size() != 3 || tok[1].text != "coincidence") {
        p.fail(NetlistErrorCode::kSyntax, tok[0].column,
               "expected 'postselect coincidence <modeA>,<modeB>'");
      }
      if (postselect) {
        p.fail(NetlistErrorCode::kDuplicateDeclaration, tok[0].column,
               "post-selection already declared on line " + std::to_string(postselect_line));
      }
      auto pair = p.mode_list(tok[2], 2, "postselect");
      for (const auto& m : pair) {
        if (!mode_lines.contains(m)) {
          p.fail(NetlistErrorCode::kUnknownMode, tok[2].column, "unknown mode '" + m + "'");
        }
      }
      if (pair[0] == pair[1]) {
        p.fail(NetlistErrorCode::kPostselect, tok[2].column,
               "post-selection needs two distinct modes");
      }
      postselect = std::make_pair(pair[0], pair[1]);
      postselect_line = line_no;
      continue;
    }

    if (keyword != "bs" && keyword != "phase" && keyword != "att") {
      p.fail(NetlistErrorCode::kSyntax, tok[0].column, "unknown directive '" + keyword + "'");
    }
    if (tok.size() < 2 || tok[1].text.find('=') != std::string::npos) {
      p.fail(NetlistErrorCode::kSyntax, tok[0].column, keyword + " needs a label");
    }
    OpticalElement element;
    element.label = tok[1].text;
    element.line = line_no;

    auto check_modes = [&](const Token& t, const std::vector<std::string>& names) {
      for (const auto& m : names) {
        if (!mode_lines.contains(m)) {
          p.fail(NetlistErrorCode::kUnknownMode, t.column, "unknown mode '" + m + "'");
        }
      }
    };

    if (keyword == "bs") {
      auto args = p.keyed(2, {"in", "out", "r"});
      const Token& in = p.require(args, "in", tok[0].column);
      const Token& out = p.require(args, "out", tok[0].column);
      auto ins = p.mode_list(in, 2, "bs in=");
      auto outs = p.mode_list(out, 2, "bs out=");
      const Token& r = p.require(args, "r", tok[0].column);
      check_modes(in, ins);
      check_modes(out, outs);
      element.kind = BeamSplitter{{ins[0], ins[1]}, {outs[0], outs[1]}, p.value(r, 0.0, 1.0)};
    } else if (keyword == "phase") {
      auto args = p.keyed(2, {"on", "value"});
      const Token& on = p.require(args, "on", tok[0].column);
      auto mode = p.mode_list(on, 1, "phase on=");
      check_modes(on, mode);
      const Token& v = p.require(args, "value", tok[0].column);
      element.kind = PhaseShift{mode[0], p.value(v, -kUnbounded, kUnbounded)};
    } else {
      auto args = p.keyed(2, {"on", "t"});
      const Token& on = p.require(args, "on", tok[0].column);
      auto mode = p.mode_list(on, 1, "att on=");
      check_modes(on, mode);
      const Token& t = p.require(args, "t", tok[0].column);
      element.kind = Attenuator{mode[0], p.value(t, 0.0, 1.0)};
    }
    elements.push_back(std::move(element));
  }

  return ModeNetwork(std::move(modes), std::move(elements), std::move(postselect));
}

ModeNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open netlist " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

std::filesystem::path bundled_path(std::string_view file) {
  return std::filesystem::path(PSWAP_DATA_DIR) / file;
}

}  // namespace pswap::optics
