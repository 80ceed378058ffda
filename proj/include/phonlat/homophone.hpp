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
// Positional-categorical model over equal-length character strings.
// Maximizing the product likelihood of a word set independently per
// position gives the empirical character frequency at each position; the
// model then spreads probability over every string composable from the
// positionwise supports.  With {fare, fair} this assigns 1/4 each to
// fare, fair, faie, and farr: the word identity itself stays ambiguous
// and must be resolved downstream.

#ifndef PHONLAT_HOMOPHONE_HPP_
#define PHONLAT_HOMOPHONE_HPP_

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "phonlat/error.hpp"

namespace phonlat {

struct PositionalCategorical {
  std::vector<char> charset;                // sorted, unique
  std::vector<std::vector<double>> probs;   // [position][charset index]

  std::size_t length() const { return probs.size(); }
};

struct ScoredString {
  std::string text;
  double prob;
};

// Per-position maximum-likelihood fit plus the induced distribution over
// all strings assembled from positions' supports, sorted by descending
// probability, ties by string.  Equal-length words required.
inline std::pair<PositionalCategorical, std::vector<ScoredString>>
homophone_mle(const std::vector<std::string>& words) {
  if (words.empty()) throw Error("homophone_mle requires at least one word");
  const std::size_t len = words[0].size();
  for (const std::string& w : words) {
    if (w.size() != len) {
      throw Error("homophone_mle requires equal-length words: '" + words[0] +
                  "' vs '" + w + "'");
    }
  }

  PositionalCategorical model;
  std::vector<char> charset;
  for (const std::string& w : words) {
    for (char c : w) charset.push_back(c);
  }
  std::sort(charset.begin(), charset.end());
  charset.erase(std::unique(charset.begin(), charset.end()), charset.end());
  model.charset = charset;

  auto char_index = [&](char c) {
    return static_cast<std::size_t>(
        std::lower_bound(charset.begin(), charset.end(), c) - charset.begin());
  };

  model.probs.assign(len, std::vector<double>(charset.size(), 0.0));
  for (const std::string& w : words) {
    for (std::size_t pos = 0; pos < len; ++pos) {
      model.probs[pos][char_index(w[pos])] +=
          1.0 / static_cast<double>(words.size());
    }
  }

  // Enumerate the support product.
  std::vector<std::vector<std::size_t>> supports(len);
  std::size_t total = 1;
  for (std::size_t pos = 0; pos < len; ++pos) {
    for (std::size_t k = 0; k < charset.size(); ++k) {
      if (model.probs[pos][k] > 0.0) supports[pos].push_back(k);
    }
    if (total > 100000 / std::max<std::size_t>(supports[pos].size(), 1)) {
      throw Error("homophone_mle support product too large to enumerate");
    }
    total *= supports[pos].size();
  }

  std::vector<ScoredString> scored;
  scored.reserve(total);
  std::string text(len, ' ');
  auto visit = [&](auto&& self, std::size_t pos, double prob) -> void {
    if (pos == len) {
      scored.push_back({text, prob});
      return;
    }
    for (std::size_t k : supports[pos]) {
      text[pos] = charset[k];
      self(self, pos + 1, prob * model.probs[pos][k]);
    }
  };
  visit(visit, 0, 1.0);

  std::sort(scored.begin(), scored.end(),
            [](const ScoredString& a, const ScoredString& b) {
              if (a.prob != b.prob) return a.prob > b.prob;
              return a.text < b.text;
            });
  return {std::move(model), std::move(scored)};
}

}  // namespace phonlat

#endif  // PHONLAT_HOMOPHONE_HPP_
