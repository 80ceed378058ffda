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
// Pronunciation lexicon and word-frequency table.
//
// Lexicon file: one entry per line, `word<TAB>phoneme phoneme ...`;
// repeated lines add alternate pronunciations.  Frequency file: `word
// count` lines.  Word ids follow first appearance, starting at 1 (0 is
// epsilon).

#ifndef PHONLAT_LEXICON_HPP_
#define PHONLAT_LEXICON_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "phonlat/alphabet.hpp"
#include "phonlat/error.hpp"
#include "phonlat/symbol_table.hpp"
#include "phonlat/util.hpp"

namespace phonlat {

class Lexicon {
 public:
  struct Entry {
    std::string word;
    std::vector<std::vector<int>> prons;  // phoneme ids, never empty
  };

  static Lexicon parse(const std::string& text,
                       const PhonemeAlphabet& alphabet,
                       const std::string& filename = "<lexicon>") {
    Lexicon lex;
    std::vector<std::string> lines = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      if (trim(lines[ln]).empty()) continue;
      std::vector<std::string> fields = split_fields(lines[ln]);
      if (fields.size() < 2) {
        throw DataError(filename, ln + 1,
                        "expected 'word<TAB>phoneme phoneme ...'");
      }
      std::vector<int> pron;
      pron.reserve(fields.size() - 1);
      for (std::size_t i = 1; i < fields.size(); ++i) {
        int id = alphabet.find(fields[i]);
        if (id < 0) {
          throw DataError(filename, ln + 1,
                          "unknown phoneme: '" + fields[i] + "'");
        }
        pron.push_back(id);
      }
      lex.add(fields[0], std::move(pron));
    }
    if (lex.entries_.empty()) {
      throw DataError(filename + ": lexicon is empty");
    }
    return lex;
  }

  static Lexicon load(const std::string& path, const PhonemeAlphabet& a) {
    return parse(read_file(path), a, path);
  }

  void add(const std::string& word, std::vector<int> pron) {
    if (word.empty()) throw Error("lexicon word must be nonempty");
    if (pron.empty()) {
      throw Error("pronunciation for '" + word + "' must be nonempty");
    }
    auto it = index_.find(word);
    if (it == index_.end()) {
      index_.emplace(word, entries_.size());
      entries_.push_back(Entry{word, {std::move(pron)}});
    } else {
      entries_[it->second].prons.push_back(std::move(pron));
    }
  }

  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t size() const { return entries_.size(); }

  bool contains(const std::string& word) const {
    return index_.count(word) > 0;
  }

  const Entry& entry(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) throw Error("word not in lexicon: " + word);
    return entries_[it->second];
  }

  // Word ids by first appearance; id 0 is epsilon.
  SymbolTable word_symbols() const {
    SymbolTable t;
    for (const Entry& e : entries_) t.add(e.word);
    return t;
  }

  std::string to_text(const PhonemeAlphabet& alphabet) const {
    std::string out;
    for (const Entry& e : entries_) {
      for (const auto& pron : e.prons) {
        out += e.word + "\t";
        for (std::size_t i = 0; i < pron.size(); ++i) {
          if (i > 0) out += " ";
          out += alphabet.token(pron[i]);
        }
        out += "\n";
      }
    }
    return out;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Word frequency table, `word count` per line, counts >= 1.
class VocabFrequency {
 public:
  static VocabFrequency parse(const std::string& text,
                              const std::string& filename = "<freq>") {
    VocabFrequency vf;
    std::vector<std::string> lines = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      if (trim(lines[ln]).empty()) continue;
      std::vector<std::string> fields = split_fields(lines[ln]);
      if (fields.size() != 2) {
        throw DataError(filename, ln + 1, "expected 'word count'");
      }
      auto count = parse_int(fields[1]);
      if (!count || *count < 1) {
        throw DataError(filename, ln + 1, "count must be >= 1, got '" +
                                              fields[1] + "'");
      }
      if (vf.index_.count(fields[0]) > 0) {
        throw DataError(filename, ln + 1, "duplicate word: " + fields[0]);
      }
      vf.index_.emplace(fields[0], vf.counts_.size());
      vf.counts_.emplace_back(fields[0], *count);
    }
    if (vf.counts_.empty()) throw DataError(filename + ": empty file");
    return vf;
  }

  static VocabFrequency load(const std::string& path) {
    return parse(read_file(path), path);
  }

  const std::vector<std::pair<std::string, std::int64_t>>& counts() const {
    return counts_;
  }

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& [w, c] : counts_) t += c;
    return t;
  }

 private:
  std::vector<std::pair<std::string, std::int64_t>> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace phonlat

#endif  // PHONLAT_LEXICON_HPP_
