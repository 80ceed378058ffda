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
// Phoneme inventory.  Token ids are 0..K-1 in listed order; the CTC blank
// is implicit and always occupies the LAST column, id K, so per-frame
// distributions have K+1 columns.

#ifndef PHONLAT_ALPHABET_HPP_
#define PHONLAT_ALPHABET_HPP_

#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "phonlat/error.hpp"
#include "phonlat/symbol_table.hpp"
#include "phonlat/util.hpp"

namespace phonlat {

constexpr const char* kBlankGlyph = "␣";  // ␣

class PhonemeAlphabet {
 public:
  static PhonemeAlphabet from_tokens(std::vector<std::string> tokens) {
    if (tokens.empty()) throw Error("alphabet must contain at least one token");
    PhonemeAlphabet a;
    a.tokens_ = std::move(tokens);
    for (std::size_t i = 0; i < a.tokens_.size(); ++i) {
      const std::string& t = a.tokens_[i];
      if (t.empty()) throw Error("alphabet token must be nonempty");
      if (t == kBlankGlyph) {
        throw Error("alphabet token must not equal the blank glyph");
      }
      for (char c : t) {
        if (std::isspace(static_cast<unsigned char>(c))) {
          throw Error("alphabet token contains whitespace: '" + t + "'");
        }
      }
      if (!a.ids_.emplace(t, static_cast<int>(i)).second) {
        throw Error("duplicate alphabet token: '" + t + "'");
      }
    }
    return a;
  }

  // One token per line; the blank is implicit and never listed.
  static PhonemeAlphabet from_text(const std::string& text,
                                   const std::string& filename = "<alphabet>") {
    std::vector<std::string> tokens;
    std::vector<std::string> lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string t = trim(lines[i]);
      if (t.empty()) continue;
      std::vector<std::string> fields = split_fields(t);
      if (fields.size() != 1) {
        throw DataError(filename, i + 1, "expected one token per line");
      }
      tokens.push_back(fields[0]);
    }
    try {
      return from_tokens(std::move(tokens));
    } catch (const Error& e) {
      throw DataError(filename + ": " + e.what());
    }
  }

  static PhonemeAlphabet load(const std::string& path) {
    return from_text(read_file(path), path);
  }

  std::string to_text() const {
    std::string out;
    for (const std::string& t : tokens_) out += t + "\n";
    return out;
  }

  void save(const std::string& path) const {
    atomic_write_file(path, to_text());
  }

  // 40 reduced X-SAMPA phonemes (24 consonants, 16 vowels) plus silence.
  // The concrete list is an editorial default; deployments load their own.
  static const PhonemeAlphabet& default_inventory() {
    static const PhonemeAlphabet a = from_tokens({
        "b", "d", "dZ", "D", "f", "g", "h", "j", "k", "l", "m", "n", "N",
        "p", "r\\", "s", "S", "t", "tS", "T", "v", "w", "z", "Z",
        "A", "{", "aI", "aU", "E", "eI", "@", "i", "I", "oU", "OI", "O",
        "U", "u", "V", "3`",
        "sil",
    });
    return a;
  }

  int size() const { return static_cast<int>(tokens_.size()); }
  int blank_id() const { return size(); }
  int columns() const { return size() + 1; }

  const std::string& token(int id) const {
    if (id < 0 || id >= size()) {
      throw Error("token id out of range: " + std::to_string(id));
    }
    return tokens_[id];
  }

  // Display name including the blank.
  std::string column_name(int id) const {
    return id == blank_id() ? kBlankGlyph : token(id);
  }

  int find(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? -1 : it->second;
  }

  const std::vector<std::string>& tokens() const { return tokens_; }

  // Fingerprint used by posterior files to detect alphabet mismatches.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const std::string& t : tokens_) {
      h = fnv1a64(t, h);
      h = fnv1a64("\n", h);
    }
    return h;
  }

  std::string hash_hex() const { return to_hex16(hash()); }

  friend bool operator==(const PhonemeAlphabet& a, const PhonemeAlphabet& b) {
    return a.tokens_ == b.tokens_;
  }
  friend bool operator!=(const PhonemeAlphabet& a, const PhonemeAlphabet& b) {
    return !(a == b);
  }

  // Symbol table over the tokens alone: ids shift up by one past epsilon,
  // so token id k maps to symbol id k+1.
  SymbolTable token_symbols() const {
    SymbolTable t;
    for (const std::string& s : tokens_) t.add(s);
    return t;
  }

  // Tokens plus the blank glyph as the last symbol (id K+1): the input
  // alphabet of frame-level machines.
  SymbolTable frame_symbols() const {
    SymbolTable t = token_symbols();
    t.add(kBlankGlyph);
    return t;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace phonlat

#endif  // PHONLAT_ALPHABET_HPP_
