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
// Synthetic posterior generator standing in for an acoustic front end.
// Each token expands to a block of frames; a blank frame always separates
// equal adjacent tokens (the collapse function would merge them otherwise)
// and otherwise appears at boundaries with probability blank_fraction.

#ifndef PHONLAT_SIMULATE_HPP_
#define PHONLAT_SIMULATE_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "phonlat/alphabet.hpp"
#include "phonlat/error.hpp"
#include "phonlat/posteriors.hpp"
#include "phonlat/rng.hpp"
#include "phonlat/semiring.hpp"

namespace phonlat {

struct SimulationConfig {
  int frames_per_token = 1;
  double blank_fraction = 0.0;
  double noise_temperature = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

// Temperature 0 is the exact one-hot row; above it the target's logit
// advantage shrinks as 1/temperature against unit Gaussian noise, so rows
// flatten smoothly while always summing to one.
inline std::vector<double> simulated_row(int target, int columns,
                                         double temperature, Rng& rng) {
  std::vector<double> row(static_cast<std::size_t>(columns), 0.0);
  if (temperature == 0.0) {
    row[static_cast<std::size_t>(target)] = 1.0;
    return row;
  }
  double best = -kInfinity;
  for (int k = 0; k < columns; ++k) {
    double logit = (k == target ? 1.0 / temperature : 0.0) + rng.normal();
    row[static_cast<std::size_t>(k)] = logit;
    best = std::max(best, logit);
  }
  double total = 0.0;
  for (double& v : row) {
    v = std::exp(v - best);
    total += v;
  }
  for (double& v : row) v /= total;
  return row;
}

}  // namespace detail

inline PosteriorSequence simulate_posteriors(
    const std::vector<std::string>& tokens, const PhonemeAlphabet& alphabet,
    const SimulationConfig& cfg) {
  if (cfg.frames_per_token < 1) {
    throw Error("frames_per_token must be >= 1");
  }
  if (cfg.blank_fraction < 0.0 || cfg.blank_fraction > 1.0) {
    throw Error("blank_fraction must lie in [0, 1]");
  }
  if (!(cfg.noise_temperature >= 0.0)) {
    throw Error("noise_temperature must be >= 0");
  }
  if (tokens.empty()) {
    throw Error("cannot simulate an empty token sequence");
  }
  std::vector<int> ids;
  for (const std::string& t : tokens) {
    int id = alphabet.find(t);
    if (id < 0) throw Error("unknown token: '" + t + "'");
    ids.push_back(id);
  }

  Rng rng(cfg.seed);
  const int columns = alphabet.columns();
  const int blank = alphabet.blank_id();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) {
      bool required = ids[i] == ids[i - 1];
      if (required || rng.uniform() < cfg.blank_fraction) {
        rows.push_back(detail::simulated_row(blank, columns,
                                             cfg.noise_temperature, rng));
      }
    }
    for (int f = 0; f < cfg.frames_per_token; ++f) {
      rows.push_back(detail::simulated_row(ids[i], columns,
                                           cfg.noise_temperature, rng));
    }
  }
  return PosteriorSequence::checked(std::move(rows), alphabet);
}

}  // namespace phonlat

#endif  // PHONLAT_SIMULATE_HPP_
