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
// The CTC probability model.  A frame string u over alphabet + blank maps
// to the label sequence collapse(u): adjacent duplicates are merged first,
// then blanks removed.  The probability of a label sequence y given T
// per-frame distributions is the sum of the row products over every u of
// length T with collapse(u) = y.  ctc_log_prob/ctc_grad evaluate that sum
// and its gradient with forward-backward over the blank-interleaved state
// lattice (2|y|+1 states); enumerate_alignments is the brute-force oracle.

#ifndef PHONLAT_CTC_HPP_
#define PHONLAT_CTC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "phonlat/alphabet.hpp"
#include "phonlat/error.hpp"
#include "phonlat/posteriors.hpp"

namespace phonlat {

// A label sequence: token ids only, never the blank.
using LabelSequence = std::vector<int>;

constexpr std::size_t kMaxEnumerationFrames = 12;

namespace detail {

inline void check_frame_token(int id, const PhonemeAlphabet& a) {
  if (id < 0 || id > a.blank_id()) {
    throw Error("token id " + std::to_string(id) +
                " invalid for alphabet of size " + std::to_string(a.size()) +
                " plus blank");
  }
}

inline void check_label_sequence(const LabelSequence& y,
                                 const PhonemeAlphabet& a) {
  for (int id : y) {
    if (id < 0 || id >= a.blank_id()) {
      throw Error("label id " + std::to_string(id) +
                  " invalid for alphabet of size " + std::to_string(a.size()));
    }
  }
}

// log(e^a + e^b) over log-probabilities (values <= 0, -inf allowed).
inline double log_prob_sum(double a, double b) {
  if (std::isinf(a) && a < 0.0) return b;
  if (std::isinf(b) && b < 0.0) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace detail

inline LabelSequence collapse(const std::vector<int>& frame_tokens,
                              const PhonemeAlphabet& alphabet) {
  LabelSequence out;
  int prev = -1;
  for (int id : frame_tokens) {
    detail::check_frame_token(id, alphabet);
    if (id != prev && id != alphabet.blank_id()) out.push_back(id);
    prev = id;
  }
  return out;
}

// Every frame string u with |u| = frames and collapse(u) = y, in
// lexicographic order of token ids.  Brute-force oracle; guarded so it is
// never mistaken for a production path.
inline std::vector<std::vector<int>> enumerate_alignments(
    const LabelSequence& y, std::size_t frames,
    const PhonemeAlphabet& alphabet) {
  if (frames > kMaxEnumerationFrames) {
    throw Error("enumerate_alignments limited to " +
                std::to_string(kMaxEnumerationFrames) + " frames, got " +
                std::to_string(frames));
  }
  detail::check_label_sequence(y, alphabet);

  std::vector<std::vector<int>> result;
  if (y.size() > frames) return result;

  const int blank = alphabet.blank_id();
  std::vector<int> u;
  // Extending a prefix with token c keeps it viable iff the collapsed
  // prefix stays a prefix of y: blanks and repeats of the previous token
  // collapse away; any other token must be exactly the next label.
  auto visit = [&](auto&& self, std::size_t matched, int prev) -> void {
    if (u.size() == frames) {
      if (matched == y.size()) result.push_back(u);
      return;
    }
    for (int c = 0; c <= blank; ++c) {
      std::size_t next_matched = matched;
      if (c != prev && c != blank) {
        if (matched == y.size() || y[matched] != c) continue;
        next_matched = matched + 1;
      }
      u.push_back(c);
      self(self, next_matched, c);
      u.pop_back();
    }
  };
  visit(visit, 0, -1);
  return result;
}

namespace detail {

// Lattice state s emits blank when even, label y[(s-1)/2] when odd.
inline int lattice_label(const LabelSequence& y, int s, int blank) {
  return s % 2 == 0 ? blank : y[(s - 1) / 2];
}

// Skip transition s-2 -> s exists when s is odd and its label differs from
// the previous non-blank label (a repeated label needs a blank between).
inline bool lattice_skip(const LabelSequence& y, int s) {
  return s % 2 == 1 && s >= 3 && y[s / 2] != y[s / 2 - 1];
}

struct ForwardResult {
  // pre_alpha[t][s]: alignment mass entering state s at frame t, excluding
  // the emission at t.  alpha[t][s] = pre_alpha[t][s] + log p(t, label(s)).
  std::vector<std::vector<double>> pre_alpha;
  std::vector<std::vector<double>> alpha;
  double log_prob;
};

inline ForwardResult ctc_forward(const PosteriorSequence& p,
                                 const LabelSequence& y) {
  const int t_count = p.frames();
  const int blank = p.alphabet().blank_id();
  const int s_count = 2 * static_cast<int>(y.size()) + 1;
  const double kNegInf = -std::numeric_limits<double>::infinity();

  ForwardResult r;
  r.pre_alpha.assign(t_count, std::vector<double>(s_count, kNegInf));
  r.alpha.assign(t_count, std::vector<double>(s_count, kNegInf));

  auto emit = [&](int t, int s) {
    return std::log(p.prob(t, lattice_label(y, s, blank)));
  };

  r.pre_alpha[0][0] = 0.0;
  if (s_count > 1) r.pre_alpha[0][1] = 0.0;
  for (int s = 0; s < std::min(2, s_count); ++s) {
    r.alpha[0][s] = r.pre_alpha[0][s] + emit(0, s);
  }
  for (int t = 1; t < t_count; ++t) {
    for (int s = 0; s < s_count; ++s) {
      double acc = r.alpha[t - 1][s];
      if (s >= 1) acc = log_prob_sum(acc, r.alpha[t - 1][s - 1]);
      if (lattice_skip(y, s)) acc = log_prob_sum(acc, r.alpha[t - 1][s - 2]);
      r.pre_alpha[t][s] = acc;
      r.alpha[t][s] = acc + emit(t, s);
    }
  }
  double lp = r.alpha[t_count - 1][s_count - 1];
  if (s_count > 1) lp = log_prob_sum(lp, r.alpha[t_count - 1][s_count - 2]);
  r.log_prob = lp;
  return r;
}

}  // namespace detail

// log p(y | posteriors), natural log.  -inf when no length-T alignment
// collapses to y.
inline double ctc_log_prob(const PosteriorSequence& p, const LabelSequence& y) {
  detail::check_label_sequence(y, p.alphabet());
  return detail::ctc_forward(p, y).log_prob;
}

// Gradient of ctc_log_prob with respect to every posterior entry, as a
// T x (K+1) matrix.  Requires a finite log-probability.
//
// d log P / d p(t,k) = (1/P) sum over alignments u with u_t = k of
// prod_{t' != t} p(t', u_{t'}).  In lattice terms that inner quantity for
// state s is exp(pre_alpha[t][s] + beta[t][s]) where beta excludes the
// emission at frame t, so entries with p(t,k) = 0 still get their correct
// (possibly nonzero) gradient.
inline std::vector<std::vector<double>> ctc_grad(const PosteriorSequence& p,
                                                 const LabelSequence& y) {
  detail::check_label_sequence(y, p.alphabet());
  const int t_count = p.frames();
  const int blank = p.alphabet().blank_id();
  const int s_count = 2 * static_cast<int>(y.size()) + 1;
  const double kNegInf = -std::numeric_limits<double>::infinity();

  detail::ForwardResult fwd = detail::ctc_forward(p, y);
  if (std::isinf(fwd.log_prob)) {
    throw Error("ctc_grad requires a finite log-probability");
  }

  auto emit = [&](int t, int s) {
    return std::log(p.prob(t, detail::lattice_label(y, s, blank)));
  };

  // beta[t][s]: mass of all lattice suffixes leaving s after frame t,
  // excluding the emission at t itself.
  std::vector<std::vector<double>> beta(
      t_count, std::vector<double>(s_count, kNegInf));
  beta[t_count - 1][s_count - 1] = 0.0;
  if (s_count > 1) beta[t_count - 1][s_count - 2] = 0.0;
  for (int t = t_count - 2; t >= 0; --t) {
    for (int s = 0; s < s_count; ++s) {
      double acc = emit(t + 1, s) + beta[t + 1][s];
      if (s + 1 < s_count) {
        acc = detail::log_prob_sum(acc, emit(t + 1, s + 1) + beta[t + 1][s + 1]);
      }
      if (s + 2 < s_count && detail::lattice_skip(y, s + 2)) {
        acc = detail::log_prob_sum(acc, emit(t + 1, s + 2) + beta[t + 1][s + 2]);
      }
      beta[t][s] = acc;
    }
  }

  std::vector<std::vector<double>> grad(
      t_count, std::vector<double>(p.columns(), 0.0));
  for (int t = 0; t < t_count; ++t) {
    // Accumulate occupancy per column in log space first: states sharing a
    // label (blank states, repeated labels) must be summed, not overwritten.
    std::vector<double> col_mass(p.columns(), kNegInf);
    for (int s = 0; s < s_count; ++s) {
      int col = detail::lattice_label(y, s, blank);
      col_mass[col] = detail::log_prob_sum(col_mass[col],
                                           fwd.pre_alpha[t][s] + beta[t][s]);
    }
    for (int k = 0; k < p.columns(); ++k) {
      if (!std::isinf(col_mass[k])) {
        grad[t][k] = std::exp(col_mass[k] - fwd.log_prob);
      }
    }
  }
  return grad;
}

}  // namespace phonlat

#endif  // PHONLAT_CTC_HPP_
