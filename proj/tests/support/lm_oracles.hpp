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

#ifndef PHONLAT_TESTS_SUPPORT_LM_ORACLES_HPP_
#define PHONLAT_TESTS_SUPPORT_LM_ORACLES_HPP_

// Table-driven oracles for backoff-model scoring, independent of the FST
// construction they are checked against.

#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "phonlat/arpa.hpp"

namespace phonlat::testing {

// Minimal route cost (in -ln) that the epsilon-backoff context graph
// offers a sentence, computed by dynamic programming over the model tables
// alone: states are bow-carrying contexts plus the empty context, word
// steps follow explicit n-grams, and backoff steps pay -ln10 * bow.
inline double grammar_route_cost(const ArpaLm& lm,
                                 const std::vector<std::string>& words) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kLn10 = std::numbers::ln10;
  auto has_state = [&](const ArpaLm::Gram& g) {
    if (g.empty()) return true;
    const NgramEntry* e = lm.find(g);
    return e != nullptr && e->log10_backoff.has_value();
  };
  auto trim = [&](ArpaLm::Gram g) {
    while (!has_state(g)) g.erase(g.begin());
    return g;
  };
  std::map<ArpaLm::Gram, double> at;
  at[trim({kSentenceBegin})] = 0.0;
  // Relax backoff arcs longest-context-first; chains strictly shorten, so
  // one sweep per length suffices.
  auto close = [&](std::map<ArpaLm::Gram, double>& m) {
    for (int len = lm.order() - 1; len >= 1; --len) {
      for (const auto& [g, c] : m) {
        if (static_cast<int>(g.size()) != len) continue;
        double bow = lm.find(g)->log10_backoff.value();
        ArpaLm::Gram t = trim({g.begin() + 1, g.end()});
        double nc = c - kLn10 * bow;
        auto it = m.find(t);
        if (it == m.end() || nc < it->second) m[t] = nc;
      }
    }
  };
  for (const std::string& w : words) {
    close(at);
    std::map<ArpaLm::Gram, double> next;
    for (const auto& [g, c] : at) {
      ArpaLm::Gram gram = g;
      gram.push_back(w);
      const NgramEntry* e = lm.find(gram);
      if (e == nullptr) continue;
      ArpaLm::Gram t = trim(gram);
      double nc = c - kLn10 * e->log10_prob;
      auto it = next.find(t);
      if (it == next.end() || nc < it->second) next[t] = nc;
    }
    at = std::move(next);
    if (at.empty()) return kInf;
  }
  close(at);
  double best = kInf;
  for (const auto& [g, c] : at) {
    ArpaLm::Gram gram = g;
    gram.push_back(kSentenceEnd);
    if (const NgramEntry* e = lm.find(gram)) {
      best = std::min(best, c - kLn10 * e->log10_prob);
    }
  }
  return best;
}

// A sentence is shadowed when some backoff route through the context graph
// undercuts the exact backoff score; per-step checks cannot decide this
// (a costlier step can land in a shorter context that pays off later), so
// the route oracle itself is the judge.
inline bool sentence_unshadowed(const ArpaLm& lm,
                                const std::vector<std::string>& words) {
  return grammar_route_cost(lm, words) >=
         -std::numbers::ln10 * lm_log_prob(lm, words) - 1e-12;
}

}  // namespace phonlat::testing

#endif  // PHONLAT_TESTS_SUPPORT_LM_ORACLES_HPP_
