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
// Backoff n-gram language model, ARPA text representation, and recursive
// backoff scoring.  All stored values are log10, as in the file format;
// the graphs module converts to negative natural logs at the boundary.
//
// Serialized grammar (canonical, bit-exact on round trip):
//
//   \data\          (header marker)
//   ngram 1=<count>          one line per order, ascending
//   <blank>
//   \1-grams:
//   <logp>\t<w1 ... wn>[\t<log backoff>]     lexicographic by words
//   <blank>                                  (section emitted even if empty)
//   ...
//   \end\           (terminator)
//
// Values are printed with 7 decimal places.  The sentence-begin unigram
// carries the conventional placeholder probability -99.

#ifndef PHONLAT_ARPA_HPP_
#define PHONLAT_ARPA_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phonlat/error.hpp"
#include "phonlat/util.hpp"

namespace phonlat {

constexpr const char* kSentenceBegin = "<s>";
constexpr const char* kSentenceEnd = "</s>";
constexpr const char* kUnknownWord = "<unk>";
constexpr double kLogProbPlaceholder = -99.0;

struct NgramEntry {
  double log10_prob = 0.0;
  std::optional<double> log10_backoff;
};

class ArpaLm {
 public:
  using Gram = std::vector<std::string>;
  using Table = std::map<Gram, NgramEntry>;

  explicit ArpaLm(int order = 1) : tables_(check_order(order)) {}

  int order() const { return static_cast<int>(tables_.size()); }

  const Table& table(int n) const {
    check_n(n);
    return tables_[n - 1];
  }

  void set(Gram gram, double log10_prob,
           std::optional<double> log10_backoff = std::nullopt) {
    check_n(static_cast<int>(gram.size()));
    tables_[gram.size() - 1][std::move(gram)] =
        NgramEntry{log10_prob, log10_backoff};
  }

  void set_backoff(const Gram& gram, double log10_backoff) {
    check_n(static_cast<int>(gram.size()));
    auto it = tables_[gram.size() - 1].find(gram);
    if (it == tables_[gram.size() - 1].end()) {
      throw Error("cannot set backoff on absent n-gram");
    }
    it->second.log10_backoff = log10_backoff;
  }

  const NgramEntry* find(const Gram& gram) const {
    if (gram.empty() || static_cast<int>(gram.size()) > order()) {
      return nullptr;
    }
    const Table& t = tables_[gram.size() - 1];
    auto it = t.find(gram);
    return it == t.end() ? nullptr : &it->second;
  }

  bool contains_word(const std::string& word) const {
    return tables_[0].count(Gram{word}) > 0;
  }

  // Unigram vocabulary in lexicographic order, markers included.
  std::vector<std::string> vocabulary() const {
    std::vector<std::string> v;
    v.reserve(tables_[0].size());
    for (const auto& [gram, entry] : tables_[0]) v.push_back(gram[0]);
    return v;
  }

  // Structural invariants: prefix closure, probabilities <= 0, and a
  // backoff weight on every context that has continuations.
  void validate() const {
    for (int n = 1; n <= order(); ++n) {
      for (const auto& [gram, entry] : tables_[n - 1]) {
        if (entry.log10_prob > 0.0) {
          throw Error("n-gram '" + join(gram, " ") +
                      "' has positive log10 probability");
        }
        for (const std::string& w : gram) {
          if (!contains_word(w)) {
            throw Error("n-gram word '" + w + "' missing from unigrams");
          }
        }
        if (n > 1) {
          Gram prefix(gram.begin(), gram.end() - 1);
          const NgramEntry* p = find(prefix);
          if (p == nullptr) {
            throw Error("prefix closure violated: '" + join(prefix, " ") +
                        "' missing at order " + std::to_string(n - 1));
          }
          if (!p->log10_backoff.has_value()) {
            throw Error("context '" + join(prefix, " ") +
                        "' has continuations but no backoff weight");
          }
        }
      }
    }
  }

  friend bool operator==(const ArpaLm& a, const ArpaLm& b) {
    if (a.order() != b.order()) return false;
    for (int n = 1; n <= a.order(); ++n) {
      const Table& ta = a.tables_[n - 1];
      const Table& tb = b.tables_[n - 1];
      if (ta.size() != tb.size()) return false;
      auto ia = ta.begin();
      auto ib = tb.begin();
      for (; ia != ta.end(); ++ia, ++ib) {
        if (ia->first != ib->first ||
            ia->second.log10_prob != ib->second.log10_prob ||
            ia->second.log10_backoff != ib->second.log10_backoff) {
          return false;
        }
      }
    }
    return true;
  }
  friend bool operator!=(const ArpaLm& a, const ArpaLm& b) {
    return !(a == b);
  }

 private:
  static int check_order(int order) {
    if (order < 1) throw Error("model order must be >= 1");
    return order;
  }
  void check_n(int n) const {
    if (n < 1 || n > order()) {
      throw Error("n-gram order " + std::to_string(n) +
                  " outside model order " + std::to_string(order()));
    }
  }

  std::vector<Table> tables_;
};

inline std::string serialize_arpa(const ArpaLm& lm) {
  std::string out = "\\data\\\n";
  for (int n = 1; n <= lm.order(); ++n) {
    out += "ngram " + std::to_string(n) + "=" +
           std::to_string(lm.table(n).size()) + "\n";
  }
  out += "\n";
  for (int n = 1; n <= lm.order(); ++n) {
    out += "\\" + std::to_string(n) + "-grams:\n";
    for (const auto& [gram, entry] : lm.table(n)) {
      out += format_log10(entry.log10_prob) + "\t" + join(gram, " ");
      if (entry.log10_backoff.has_value()) {
        out += "\t" + format_log10(*entry.log10_backoff);
      }
      out += "\n";
    }
    out += "\n";
  }
  out += "\\end\\\n";
  return out;
}

inline ArpaLm parse_arpa(const std::string& text,
                         const std::string& filename = "<arpa>") {
  std::vector<std::string> lines = split_lines(text);
  std::size_t ln = 0;
  auto next_line = [&]() -> const std::string* {
    while (ln < lines.size()) {
      const std::string& line = lines[ln];
      ++ln;
      if (!trim(line).empty()) return &lines[ln - 1];
    }
    return nullptr;
  };

  const std::string* line = next_line();
  if (line == nullptr || trim(*line) != "\\data\\") {
    throw DataError(filename, ln, "expected \\data\\ header");
  }

  std::vector<std::size_t> declared;
  while ((line = next_line()) != nullptr) {
    std::string t = trim(*line);
    if (t.rfind("ngram ", 0) != 0) break;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError(filename, ln, "expected 'ngram N=count'");
    }
    auto n = parse_int(trim(t.substr(6, eq - 6)));
    auto count = parse_int(trim(t.substr(eq + 1)));
    if (!n || !count || *n < 1 || *count < 0 ||
        *n != static_cast<std::int64_t>(declared.size()) + 1) {
      throw DataError(filename, ln,
                      "bad or out-of-order ngram count line: " + t);
    }
    declared.push_back(static_cast<std::size_t>(*count));
  }
  if (declared.empty()) {
    throw DataError(filename, ln, "no ngram count declarations");
  }

  ArpaLm lm(static_cast<int>(declared.size()));
  for (int n = 1; n <= lm.order(); ++n) {
    std::string marker = "\\" + std::to_string(n) + "-grams:";
    if (line == nullptr || trim(*line) != marker) {
      throw DataError(filename, ln, "expected section " + marker);
    }
    std::size_t parsed = 0;
    while ((line = next_line()) != nullptr) {
      std::string t = trim(*line);
      if (!t.empty() && t[0] == '\\') break;  // next marker line
      std::vector<std::string> fields = split_fields(t);
      std::size_t nu = static_cast<std::size_t>(n);
      if (fields.size() != nu + 1 && fields.size() != nu + 2) {
        throw DataError(filename, ln,
                        "expected 'logprob " + std::to_string(n) +
                            " words [backoff]'");
      }
      auto prob = parse_double(fields[0]);
      if (!prob || *prob > 0.0) {
        throw DataError(filename, ln,
                        "bad log10 probability: " + fields[0]);
      }
      std::optional<double> bow;
      if (fields.size() == nu + 2) {
        if (n == lm.order()) {
          throw DataError(filename, ln,
                          "backoff weight not allowed at the highest order");
        }
        auto b = parse_double(fields.back());
        if (!b) {
          throw DataError(filename, ln,
                          "bad backoff weight: " + fields.back());
        }
        bow = *b;
      }
      ArpaLm::Gram gram(fields.begin() + 1,
                        fields.begin() + 1 + static_cast<std::ptrdiff_t>(nu));
      if (lm.find(gram) != nullptr) {
        throw DataError(filename, ln, "duplicate n-gram: " + join(gram, " "));
      }
      lm.set(std::move(gram), *prob, bow);
      ++parsed;
    }
    if (parsed != declared[static_cast<std::size_t>(n) - 1]) {
      throw DataError(filename, ln,
                      "count mismatch at order " + std::to_string(n) +
                          ": declared " +
                          std::to_string(declared[n - 1]) + ", found " +
                          std::to_string(parsed));
    }
  }
  if (line == nullptr || trim(*line) != "\\end\\") {
    throw DataError(filename, ln, "expected \\end\\ terminator");
  }
  try {
    lm.validate();
  } catch (const Error& e) {
    throw DataError(filename + ": " + e.what());
  }
  return lm;
}

inline ArpaLm load_arpa(const std::string& path) {
  return parse_arpa(read_file(path), path);
}

inline void save_arpa(const ArpaLm& lm, const std::string& path) {
  atomic_write_file(path, serialize_arpa(lm));
}

// log10 p(word | context) by recursive backoff: take the longest explicit
// n-gram; otherwise add the context's backoff weight (0 when the context
// itself is unlisted) and retry with the shortened context.
inline double lm_cond_log_prob(const ArpaLm& lm, const std::string& word,
                               std::vector<std::string> context) {
  if (static_cast<int>(context.size()) > lm.order() - 1) {
    context.erase(context.begin(),
                  context.end() - (lm.order() - 1));
  }
  if (!context.empty()) {
    ArpaLm::Gram gram = context;
    gram.push_back(word);
    if (const NgramEntry* e = lm.find(gram)) return e->log10_prob;
    double bow = 0.0;
    if (const NgramEntry* c = lm.find(context)) {
      bow = c->log10_backoff.value_or(0.0);
    }
    context.erase(context.begin());
    return bow + lm_cond_log_prob(lm, word, std::move(context));
  }
  const NgramEntry* e = lm.find(ArpaLm::Gram{word});
  if (e == nullptr) {
    throw Error("word out of vocabulary: '" + word + "'");
  }
  return e->log10_prob;
}

// log10 probability of a full sentence (markers implicit): scores every
// word left to right and the sentence-end token, starting from the
// sentence-begin context.  Out-of-vocabulary words map to the unknown
// token when the model has one, otherwise raise an error.
inline double lm_log_prob(const ArpaLm& lm,
                          const std::vector<std::string>& words) {
  std::vector<std::string> context;
  if (lm.contains_word(kSentenceBegin)) context.push_back(kSentenceBegin);

  auto map_word = [&](const std::string& w) -> std::string {
    if (lm.contains_word(w)) return w;
    if (lm.contains_word(kUnknownWord)) return kUnknownWord;
    throw Error("word out of vocabulary: '" + w + "'");
  };

  double total = 0.0;
  auto score = [&](const std::string& w) {
    total += lm_cond_log_prob(lm, w, context);
    context.push_back(w);
    if (static_cast<int>(context.size()) > lm.order() - 1 &&
        !context.empty()) {
      context.erase(context.begin());
    }
  };
  for (const std::string& w : words) score(map_word(w));
  score(kSentenceEnd);
  return total;
}

}  // namespace phonlat

#endif  // PHONLAT_ARPA_HPP_
