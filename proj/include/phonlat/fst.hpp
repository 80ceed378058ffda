// Copyright 2026 The Phonlat Authors
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
//
// Weighted finite-state transducer with dense integer states and attached
// input/output symbol tables.  Label id 0 is reserved for epsilon in both
// tapes.  A final weight of semiring zero (+inf) means "not final".
//
// Text format:
//   line 1:            <start> <semiring>        start is -1 for an empty machine
//   arc lines:         <src> <ilabel> <olabel> <weight> <dst>
//   final lines:       <state> <weight>
//   "isymbols" marker, then <symbol> <id> lines in ascending id order
//   "osymbols" marker, likewise
// Weights are printed with 9 significant digits.  States referenced nowhere
// else are serialized as a final line with weight inf so that parsing the
// output reproduces the machine exactly.

#ifndef PHONLAT_FST_HPP_
#define PHONLAT_FST_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phonlat/semiring.hpp"
#include "phonlat/symbol_table.hpp"
#include "phonlat/util.hpp"

namespace phonlat {

using StateId = std::int32_t;
constexpr StateId kNoState = -1;

struct Arc {
  int ilabel = kEpsilonLabel;
  int olabel = kEpsilonLabel;
  Weight weight;
  StateId next_state = kNoState;
};

// One accepted path: its arcs in order, total weight including the final
// weight, and the epsilon-free input/output label strings.
struct Path {
  std::vector<Arc> arcs;
  Weight total_weight;
  std::vector<int> istring;
  std::vector<int> ostring;
};

class Wfst {
 public:
  explicit Wfst(Semiring ring) : ring_(ring) {}

  Semiring ring() const { return ring_; }

  StateId add_state() {
    arcs_.emplace_back();
    finals_.push_back(kInfinity);
    return static_cast<StateId>(arcs_.size() - 1);
  }

  StateId num_states() const { return static_cast<StateId>(arcs_.size()); }

  void set_start(StateId s) {
    check_state(s);
    start_ = s;
  }

  StateId start() const { return start_; }

  void add_arc(StateId src, const Arc& arc) {
    check_state(src);
    check_state(arc.next_state);
    if (arc.ilabel < 0 || arc.ilabel >= isymbols.size()) {
      throw Error("arc ilabel " + std::to_string(arc.ilabel) +
                  " outside input symbol table of size " +
                  std::to_string(isymbols.size()));
    }
    if (arc.olabel < 0 || arc.olabel >= osymbols.size()) {
      throw Error("arc olabel " + std::to_string(arc.olabel) +
                  " outside output symbol table of size " +
                  std::to_string(osymbols.size()));
    }
    check_weight(arc.weight);
    arcs_[src].push_back(arc);
  }

  void set_final(StateId s, const Weight& w) {
    check_state(s);
    check_weight(w);
    finals_[s] = w.value;
  }

  Weight final_weight(StateId s) const {
    check_state(s);
    return Weight(finals_[s], ring_);
  }

  bool is_final(StateId s) const {
    check_state(s);
    return std::isfinite(finals_[s]);
  }

  const std::vector<Arc>& arcs(StateId s) const {
    check_state(s);
    return arcs_[s];
  }

  std::size_t num_arcs() const {
    std::size_t n = 0;
    for (const auto& a : arcs_) n += a.size();
    return n;
  }

  SymbolTable isymbols;
  SymbolTable osymbols;

  friend bool operator==(const Wfst& a, const Wfst& b) {
    if (a.ring_ != b.ring_ || a.start_ != b.start_ ||
        a.finals_ != b.finals_ || a.isymbols != b.isymbols ||
        a.osymbols != b.osymbols) {
      return false;
    }
    if (a.arcs_.size() != b.arcs_.size()) return false;
    for (std::size_t s = 0; s < a.arcs_.size(); ++s) {
      const auto& xa = a.arcs_[s];
      const auto& xb = b.arcs_[s];
      if (xa.size() != xb.size()) return false;
      for (std::size_t i = 0; i < xa.size(); ++i) {
        if (xa[i].ilabel != xb[i].ilabel || xa[i].olabel != xb[i].olabel ||
            xa[i].weight.value != xb[i].weight.value ||
            xa[i].next_state != xb[i].next_state) {
          return false;
        }
      }
    }
    return true;
  }
  friend bool operator!=(const Wfst& a, const Wfst& b) { return !(a == b); }

  std::string to_text() const {
    std::string out;
    out += std::to_string(start_) + " " + semiring_name(ring_) + "\n";
    std::vector<bool> referenced(arcs_.size(), false);
    if (start_ != kNoState) referenced[start_] = true;
    for (StateId s = 0; s < num_states(); ++s) {
      for (const Arc& a : arcs_[s]) {
        referenced[s] = true;
        referenced[a.next_state] = true;
        out += std::to_string(s) + " " + std::to_string(a.ilabel) + " " +
               std::to_string(a.olabel) + " " + format_weight(a.weight.value) +
               " " + std::to_string(a.next_state) + "\n";
      }
    }
    for (StateId s = 0; s < num_states(); ++s) {
      if (std::isfinite(finals_[s])) {
        out += std::to_string(s) + " " + format_weight(finals_[s]) + "\n";
      } else if (!referenced[s]) {
        out += std::to_string(s) + " inf\n";
      }
    }
    out += "isymbols\n";
    for (int i = 0; i < isymbols.size(); ++i) {
      out += isymbols.name(i) + " " + std::to_string(i) + "\n";
    }
    out += "osymbols\n";
    for (int i = 0; i < osymbols.size(); ++i) {
      out += osymbols.name(i) + " " + std::to_string(i) + "\n";
    }
    return out;
  }

  static Wfst from_text(const std::string& text,
                        const std::string& filename = "<fst>") {
    std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw DataError(filename, 1, "empty machine file");

    std::vector<std::string> head = split_fields(lines[0]);
    if (head.size() != 2) {
      throw DataError(filename, 1, "expected '<start> <semiring>'");
    }
    auto start = parse_int(head[0]);
    if (!start || *start < -1) {
      throw DataError(filename, 1, "bad start state: " + head[0]);
    }
    Semiring ring;
    try {
      ring = parse_semiring(head[1]);
    } catch (const Error& e) {
      throw DataError(filename, 1, e.what());
    }
    Wfst m(ring);

    struct RawArc {
      StateId src;
      Arc arc;
    };
    std::vector<RawArc> raw_arcs;
    std::vector<std::pair<StateId, double>> raw_finals;
    StateId max_state = static_cast<StateId>(*start);

    enum Section { kBody, kIsyms, kOsyms } section = kBody;
    SymbolTable* table = nullptr;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
      const std::string& line = lines[ln];
      if (trim(line).empty()) continue;
      if (line == "isymbols") {
        section = kIsyms;
        table = &m.isymbols;
        continue;
      }
      if (line == "osymbols") {
        if (section != kIsyms) {
          throw DataError(filename, ln + 1, "osymbols before isymbols");
        }
        section = kOsyms;
        table = &m.osymbols;
        continue;
      }
      std::vector<std::string> f = split_fields(line);
      if (section == kBody) {
        if (f.size() == 5) {
          auto src = parse_int(f[0]);
          auto il = parse_int(f[1]);
          auto ol = parse_int(f[2]);
          auto w = parse_double(f[3]);
          auto dst = parse_int(f[4]);
          if (!src || !il || !ol || !w || !dst || *src < 0 || *dst < 0 ||
              *il < 0 || *ol < 0) {
            throw DataError(filename, ln + 1, "malformed arc line");
          }
          RawArc ra;
          ra.src = static_cast<StateId>(*src);
          ra.arc.ilabel = static_cast<int>(*il);
          ra.arc.olabel = static_cast<int>(*ol);
          ra.arc.weight = Weight(*w, m.ring());
          ra.arc.next_state = static_cast<StateId>(*dst);
          raw_arcs.push_back(ra);
          max_state = std::max(max_state, std::max(ra.src, ra.arc.next_state));
        } else if (f.size() == 2) {
          auto s = parse_int(f[0]);
          auto w = parse_double(f[1]);
          if (!s || !w || *s < 0) {
            throw DataError(filename, ln + 1, "malformed final line");
          }
          raw_finals.emplace_back(static_cast<StateId>(*s), *w);
          max_state = std::max(max_state, static_cast<StateId>(*s));
        } else {
          throw DataError(filename, ln + 1,
                          "expected arc, final, or section marker");
        }
      } else {
        if (f.size() != 2) {
          throw DataError(filename, ln + 1, "expected '<symbol> <id>'");
        }
        auto id = parse_int(f[1]);
        if (!id || *id < 0) {
          throw DataError(filename, ln + 1, "bad symbol id: " + f[1]);
        }
        if (*id == 0) {
          if (f[0] != kEpsilonName) {
            throw DataError(filename, ln + 1, "symbol id 0 must be <eps>");
          }
          continue;
        }
        if (*id != table->size()) {
          throw DataError(filename, ln + 1,
                          "symbol ids must be dense and ascending");
        }
        if (table->contains(f[0])) {
          throw DataError(filename, ln + 1, "duplicate symbol: " + f[0]);
        }
        table->add(f[0]);
      }
    }
    if (section != kOsyms) {
      throw DataError(filename, lines.size(), "missing symbol table sections");
    }

    for (StateId s = 0; s <= max_state; ++s) m.add_state();
    if (*start >= 0) m.set_start(static_cast<StateId>(*start));
    for (const RawArc& ra : raw_arcs) {
      try {
        m.add_arc(ra.src, ra.arc);
      } catch (const Error& e) {
        throw DataError(filename + ": " + e.what());
      }
    }
    for (const auto& [s, w] : raw_finals) m.set_final(s, Weight(w, m.ring()));
    return m;
  }

  void save(const std::string& path) const { atomic_write_file(path, to_text()); }

  static Wfst load(const std::string& path) {
    return from_text(read_file(path), path);
  }

 private:
  void check_state(StateId s) const {
    if (s < 0 || s >= num_states()) {
      throw Error("state id out of range: " + std::to_string(s));
    }
  }

  void check_weight(const Weight& w) const {
    if (w.ring != ring_) {
      throw Error("weight ring does not match machine ring");
    }
    if (std::isnan(w.value) || (std::isinf(w.value) && w.value < 0.0)) {
      throw Error("weight must be finite or +inf");
    }
  }

  Semiring ring_;
  StateId start_ = kNoState;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> finals_;
};

}  // namespace phonlat

#endif  // PHONLAT_FST_HPP_
