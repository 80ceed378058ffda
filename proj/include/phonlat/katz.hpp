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
// Katz backoff estimation from a tokenized corpus.
//
// Recipe: counts above the threshold k are trusted as-is; counts r <= k are
// scaled by the Good-Turing factor d_r = (((r+1) n_{r+1}) / (r n_r) - A) /
// (1 - A) with A = (k+1) n_{k+1} / n_1, computed per order from the
// count-of-counts n_r.  When the count-of-counts make that formula
// meaningless (missing n_r, A >= 1, or a factor outside (0, 1]) the whole
// order falls back to absolute discounting with d = 0.5, i.e. factor
// (r - 0.5) / r.  The freed mass becomes the context's backoff weight,
// normalized against the mass the lower order assigns to unseen words.

#ifndef PHONLAT_KATZ_HPP_
#define PHONLAT_KATZ_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "phonlat/arpa.hpp"
#include "phonlat/error.hpp"

namespace phonlat {
namespace detail {

// Slack used when deciding whether a context's probability mass is already
// saturated; matches the classic toolkit convention.
constexpr double kMassEpsilon = 3e-6;

using CountTable = std::map<ArpaLm::Gram, std::int64_t>;

// Discount factors for one order: factor(r) multiplies the maximum
// likelihood ratio of a gram observed r times.  Counts above the threshold
// are undiscounted.
class DiscountSchedule {
 public:
  DiscountSchedule(const CountTable& counts, int threshold)
      : threshold_(threshold), factors_(threshold + 1, 1.0) {
    if (threshold_ == 0) return;
    std::vector<std::int64_t> cc(threshold_ + 2, 0);
    for (const auto& [gram, c] : counts) {
      if (gram.back() == kSentenceBegin) continue;
      if (c >= 1 && c <= threshold_ + 1) ++cc[c];
    }
    bool degenerate = false;
    for (int r = 1; r <= threshold_ + 1; ++r) {
      if (cc[r] == 0) degenerate = true;
    }
    if (!degenerate) {
      double a = static_cast<double>(threshold_ + 1) *
                 static_cast<double>(cc[threshold_ + 1]) /
                 static_cast<double>(cc[1]);
      if (a >= 1.0) {
        degenerate = true;
      } else {
        for (int r = 1; r <= threshold_; ++r) {
          double ratio = static_cast<double>(r + 1) *
                         static_cast<double>(cc[r + 1]) /
                         (static_cast<double>(r) * static_cast<double>(cc[r]));
          double d = (ratio - a) / (1.0 - a);
          if (!(d > kMassEpsilon && d <= 1.0)) {
            degenerate = true;
            break;
          }
          factors_[r] = d;
        }
      }
    }
    if (degenerate) {
      for (int r = 1; r <= threshold_; ++r) {
        factors_[r] = (static_cast<double>(r) - 0.5) / static_cast<double>(r);
      }
    }
  }

  double factor(std::int64_t count) const {
    if (threshold_ == 0 || count > threshold_) return 1.0;
    return factors_[static_cast<std::size_t>(count)];
  }

 private:
  int threshold_;
  std::vector<double> factors_;
};

inline double prob_of(const ArpaLm& lm, const std::string& word,
                      const std::vector<std::string>& context) {
  return std::pow(10.0, lm_cond_log_prob(lm, word, context));
}

// Backoff weights for all length-m contexts, derived from the freshly
// estimated order m+1.  num is the mass the context's explicit grams leave
// unclaimed; den is the mass the lower order assigns to words the context
// does not list.  The null context (m == 0) has no backoff weight in the
// model: its leftover mass is spread additively over the event vocabulary
// so that the unigrams sum to one.
inline void compute_backoffs(ArpaLm& lm, int m) {
  if (m == 0) {
    double explicit_sum = 0.0;
    for (const auto& [gram, entry] : lm.table(1)) {
      if (gram[0] == kSentenceBegin) continue;
      explicit_sum += std::pow(10.0, entry.log10_prob);
    }
    double num = 1.0 - explicit_sum;
    if (num < 0.0) {
      if (num < -kMassEpsilon) {
        throw Error("unigram probabilities sum above one");
      }
      num = 0.0;
    }
    if (num == 0.0) return;
    std::vector<ArpaLm::Gram> events;
    std::vector<ArpaLm::Gram> zero_mass;
    for (const auto& [gram, entry] : lm.table(1)) {
      if (gram[0] == kSentenceBegin) continue;
      events.push_back(gram);
      if (std::isinf(entry.log10_prob)) zero_mass.push_back(gram);
    }
    const std::vector<ArpaLm::Gram>& receivers =
        zero_mass.empty() ? events : zero_mass;
    double share = num / static_cast<double>(receivers.size());
    for (const ArpaLm::Gram& gram : receivers) {
      double p = std::pow(10.0, lm.find(gram)->log10_prob) + share;
      lm.set(gram, std::log10(p), lm.find(gram)->log10_backoff);
    }
    return;
  }

  const ArpaLm::Table& table = lm.table(m + 1);
  auto it = table.begin();
  while (it != table.end()) {
    ArpaLm::Gram context(it->first.begin(), it->first.end() - 1);
    std::vector<std::pair<std::string, double>> follows;
    for (; it != table.end() &&
           std::equal(context.begin(), context.end(), it->first.begin());
         ++it) {
      follows.emplace_back(it->first.back(), it->second.log10_prob);
    }
    std::vector<std::string> shorter(context.begin() + 1, context.end());
    double num = 1.0;
    double den = 1.0;
    for (const auto& [word, log10_prob] : follows) {
      num -= std::pow(10.0, log10_prob);
      den -= prob_of(lm, word, shorter);
    }
    if (num > -kMassEpsilon && num < 0.0) num = 0.0;
    // A context whose follows cover the whole event vocabulary leaves den
    // equal to zero up to rounding dust on either side; treat it as zero so
    // the leftover mass is rescaled in rather than amplified by the dust.
    if (den > -kMassEpsilon && den < kMassEpsilon) den = 0.0;
    if (num < 0.0) {
      throw Error("context '" + join(context, " ") +
                  "' has probability mass above one");
    }
    if (num == 0.0) {
      lm.set_backoff(context, 0.0);
      continue;
    }
    if (den == 0.0) {
      // The lower order has no mass left for unseen words, so the leftover
      // cannot be routed through backoff; rescale the explicit grams to
      // absorb it instead.
      double scale = -std::log10(1.0 - num);
      for (const auto& [word, log10_prob] : follows) {
        ArpaLm::Gram gram = context;
        gram.push_back(word);
        lm.set(gram, log10_prob + scale, lm.find(gram)->log10_backoff);
      }
      lm.set_backoff(context, 0.0);
      continue;
    }
    if (den < 0.0) {
      throw Error("lower-order mass under context '" + join(context, " ") +
                  "' sums above one");
    }
    lm.set_backoff(context, std::log10(num) - std::log10(den));
  }
}

}  // namespace detail

// Trains a Katz backoff model of the given order from tokenized sentences.
// Sentence markers are implicit: every sentence is padded with <s> and </s>
// before counting, and neither marker may appear as a corpus token.
inline ArpaLm train_katz(const std::vector<std::vector<std::string>>& corpus,
                         int order, int discount_threshold = 5) {
  if (corpus.empty()) throw Error("training corpus is empty");
  if (order < 1 || order > 5) {
    throw Error("model order must be between 1 and 5");
  }
  if (discount_threshold < 0) throw Error("discount threshold must be >= 0");

  std::vector<detail::CountTable> counts(static_cast<std::size_t>(order));
  for (const std::vector<std::string>& sentence : corpus) {
    std::vector<std::string> padded;
    padded.reserve(sentence.size() + 2);
    padded.push_back(kSentenceBegin);
    for (const std::string& token : sentence) {
      if (token == kSentenceBegin || token == kSentenceEnd) {
        throw Error("sentence markers may not appear as corpus tokens");
      }
      if (token.empty() || split_fields(token).size() != 1) {
        throw Error("corpus tokens must be nonempty and whitespace-free");
      }
      padded.push_back(token);
    }
    padded.push_back(kSentenceEnd);
    for (int n = 1; n <= order; ++n) {
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <=
                              padded.size();
           ++i) {
        ArpaLm::Gram gram(padded.begin() + static_cast<std::ptrdiff_t>(i),
                          padded.begin() + static_cast<std::ptrdiff_t>(i) +
                              n);
        ++counts[static_cast<std::size_t>(n) - 1][std::move(gram)];
      }
    }
  }

  std::int64_t num_events = 0;
  for (const auto& [gram, c] : counts[0]) {
    if (gram[0] != kSentenceBegin) ++num_events;
  }

  ArpaLm lm(order);
  for (int n = 1; n <= order; ++n) {
    const detail::CountTable& table = counts[static_cast<std::size_t>(n) - 1];
    detail::DiscountSchedule discounts(table, discount_threshold);
    auto it = table.begin();
    while (it != table.end()) {
      ArpaLm::Gram context(it->first.begin(), it->first.end() - 1);
      std::vector<std::pair<std::string, std::int64_t>> follows;
      for (; it != table.end() &&
             std::equal(context.begin(), context.end(), it->first.begin());
           ++it) {
        follows.emplace_back(it->first.back(), it->second);
      }
      std::int64_t total = 0;
      for (const auto& [word, c] : follows) {
        if (word != kSentenceBegin) total += c;
      }
      if (total == 0) continue;

      // Bump the context total until the explicit mass leaves room for
      // backoff, so contexts that cover their whole observation exactly do
      // not starve the unseen words of the lower order.
      std::vector<std::pair<std::string, double>> probs;
      while (true) {
        probs.clear();
        double total_prob = 0.0;
        for (const auto& [word, c] : follows) {
          if (word == kSentenceBegin) continue;
          double p = discounts.factor(c) * static_cast<double>(c) /
                     static_cast<double>(total);
          probs.emplace_back(word, p);
          total_prob += p;
        }
        if (total_prob > 1.0 - detail::kMassEpsilon &&
            static_cast<std::int64_t>(probs.size()) < num_events) {
          ++total;
          continue;
        }
        break;
      }
      for (const auto& [word, p] : probs) {
        ArpaLm::Gram gram = context;
        gram.push_back(word);
        lm.set(std::move(gram), std::log10(p));
      }
    }
    if (n == 1) {
      lm.set(ArpaLm::Gram{kSentenceBegin}, kLogProbPlaceholder);
    }
    detail::compute_backoffs(lm, n - 1);
  }
  lm.validate();
  return lm;
}

}  // namespace phonlat

#endif  // PHONLAT_KATZ_HPP_
