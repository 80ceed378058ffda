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
// Edit-distance alignment and evaluation statistics: pooled error rates
// over token sequences, bootstrap standard errors, and confusion counts.
//
// Rates pool across utterances: total edits divided by total reference
// length, never the mean of per-utterance rates.  A rate may exceed 1
// when hypotheses carry many insertions.

#ifndef PHONLAT_METRICS_HPP_
#define PHONLAT_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "phonlat/error.hpp"
#include "phonlat/rng.hpp"
#include "phonlat/util.hpp"

namespace phonlat {

// ---------------------------------------------------------------------------
// Alignment.

enum class EditOp { kMatch, kSubstitute, kInsert, kDelete };

// One backtrace step.  ref is empty for insertions, hyp for deletions;
// matches carry the shared token in both fields.
struct EditStep {
  EditOp op = EditOp::kMatch;
  std::string ref;
  std::string hyp;

  friend bool operator==(const EditStep& a, const EditStep& b) {
    return a.op == b.op && a.ref == b.ref && a.hyp == b.hyp;
  }
};

using AlignmentTrace = std::vector<EditStep>;

// Reads the reference back out of a trace (match/substitute/delete steps).
inline std::vector<std::string> trace_reference(const AlignmentTrace& trace) {
  std::vector<std::string> out;
  for (const EditStep& s : trace) {
    if (s.op != EditOp::kInsert) out.push_back(s.ref);
  }
  return out;
}

// Reads the hypothesis back out of a trace (match/substitute/insert steps).
inline std::vector<std::string> trace_hypothesis(const AlignmentTrace& trace) {
  std::vector<std::string> out;
  for (const EditStep& s : trace) {
    if (s.op != EditOp::kDelete) out.push_back(s.hyp);
  }
  return out;
}

// Number of nonzero-cost steps; equals the edit distance of the aligned pair.
inline int trace_cost(const AlignmentTrace& trace) {
  int cost = 0;
  for (const EditStep& s : trace) {
    if (s.op != EditOp::kMatch) ++cost;
  }
  return cost;
}

struct EditResult {
  int distance = 0;
  AlignmentTrace trace;
};

// Levenshtein distance with unit costs and a full backtrace.  Ties break
// deterministically: match/substitute, then delete, then insert.
inline EditResult edit_distance(const std::vector<std::string>& ref,
                                const std::vector<std::string>& hyp) {
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();
  std::vector<int> d((m + 1) * (n + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int& {
    return d[i * (n + 1) + j];
  };
  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      int sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int del = at(i - 1, j) + 1;
      int ins = at(i, j - 1) + 1;
      at(i, j) = std::min(sub, std::min(del, ins));
    }
  }

  EditResult out;
  out.distance = at(m, n);
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      int step = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      if (at(i, j) == at(i - 1, j - 1) + step) {
        out.trace.push_back(
            {step == 0 ? EditOp::kMatch : EditOp::kSubstitute, ref[i - 1],
             hyp[j - 1]});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      out.trace.push_back({EditOp::kDelete, ref[i - 1], ""});
      --i;
    } else {
      out.trace.push_back({EditOp::kInsert, "", hyp[j - 1]});
      --j;
    }
  }
  std::reverse(out.trace.begin(), out.trace.end());
  return out;
}

// ---------------------------------------------------------------------------
// Pooled rates.

struct SequencePair {
  std::vector<std::string> ref;
  std::vector<std::string> hyp;
};

struct ErrorReport {
  double rate = 0.0;
  double standard_error = 0.0;
  std::int64_t total_edits = 0;
  std::int64_t total_ref_len = 0;
};

// Pooled error rate: total edits / total reference length.  standard_error
// stays 0; fill it with bootstrap_se when needed.
inline ErrorReport error_rate(const std::vector<SequencePair>& pairs) {
  if (pairs.empty()) throw Error("error rate needs at least one utterance");
  ErrorReport report;
  for (const SequencePair& p : pairs) {
    report.total_edits += edit_distance(p.ref, p.hyp).distance;
    report.total_ref_len += static_cast<std::int64_t>(p.ref.size());
  }
  if (report.total_ref_len == 0) {
    throw Error("error rate needs a nonzero total reference length");
  }
  report.rate = static_cast<double>(report.total_edits) /
                static_cast<double>(report.total_ref_len);
  return report;
}

// Sample standard deviation of the pooled rate over `resamples` draws of
// the utterance list with replacement.  Seeded and reproducible.
inline double bootstrap_se(const std::vector<SequencePair>& pairs,
                           int resamples, std::uint64_t seed) {
  if (pairs.empty()) throw Error("bootstrap needs at least one utterance");
  if (resamples < 100) throw Error("bootstrap needs at least 100 resamples");
  std::vector<std::int64_t> edits;
  std::vector<std::int64_t> lens;
  for (const SequencePair& p : pairs) {
    edits.push_back(edit_distance(p.ref, p.hyp).distance);
    lens.push_back(static_cast<std::int64_t>(p.ref.size()));
  }
  Rng rng(seed);
  std::vector<double> rates;
  rates.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    std::int64_t e = 0;
    std::int64_t l = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      std::size_t pick = rng.index(pairs.size());
      e += edits[pick];
      l += lens[pick];
    }
    rates.push_back(l == 0 ? 0.0 : static_cast<double>(e) /
                                       static_cast<double>(l));
  }
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= static_cast<double>(rates.size());
  double ss = 0.0;
  for (double r : rates) ss += (r - mean) * (r - mean);
  return std::sqrt(ss / static_cast<double>(rates.size() - 1));
}

// ---------------------------------------------------------------------------
// Confusion counts.

// Per-token tallies accumulated from alignment traces.  matrix[r][h] counts
// reference token r aligned to hypothesis token h, so the diagonal holds the
// correct counts and off-diagonal cells the substitutions.
struct ConfusionSummary {
  std::vector<std::string> tokens;
  std::vector<std::vector<std::int64_t>> matrix;
  std::vector<std::int64_t> insertions;
  std::vector<std::int64_t> deletions;

  std::int64_t correct(std::size_t t) const { return matrix[t][t]; }

  // Counts of one operation type normalized by that type's total; all
  // zeros when the type never occurred.
  static std::vector<double> normalized(const std::vector<std::int64_t>& v) {
    std::int64_t total = 0;
    for (std::int64_t c : v) total += c;
    std::vector<double> out(v.size(), 0.0);
    if (total == 0) return out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[i] = static_cast<double>(v[i]) / static_cast<double>(total);
    }
    return out;
  }
  std::vector<double> insertion_rates() const { return normalized(insertions); }
  std::vector<double> deletion_rates() const { return normalized(deletions); }

  // Header row, one matrix row per reference token, then insertion and
  // deletion counts and their normalized rates.
  std::string to_csv() const {
    std::string out = "token";
    for (const std::string& t : tokens) out += "," + t;
    out += "\n";
    for (std::size_t r = 0; r < tokens.size(); ++r) {
      out += tokens[r];
      for (std::int64_t c : matrix[r]) out += "," + std::to_string(c);
      out += "\n";
    }
    auto counts_row = [&out](const std::string& label,
                             const std::vector<std::int64_t>& v) {
      out += label;
      for (std::int64_t c : v) out += "," + std::to_string(c);
      out += "\n";
    };
    auto rates_row = [&out](const std::string& label,
                            const std::vector<double>& v) {
      out += label;
      char buf[32];
      for (double r : v) {
        std::snprintf(buf, sizeof(buf), "%.6f", r);
        out += ",";
        out += buf;
      }
      out += "\n";
    };
    counts_row("insertions", insertions);
    counts_row("deletions", deletions);
    rates_row("insertion_rate", insertion_rates());
    rates_row("deletion_rate", deletion_rates());
    return out;
  }
};

inline ConfusionSummary confusion_counts(
    const std::vector<AlignmentTrace>& traces,
    const std::vector<std::string>& tokens) {
  ConfusionSummary sum;
  sum.tokens = tokens;
  sum.matrix.assign(tokens.size(),
                    std::vector<std::int64_t>(tokens.size(), 0));
  sum.insertions.assign(tokens.size(), 0);
  sum.deletions.assign(tokens.size(), 0);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < tokens.size(); ++i) index[tokens[i]] = i;
  auto id = [&index](const std::string& t) {
    auto it = index.find(t);
    if (it == index.end()) throw Error("token out of alphabet: '" + t + "'");
    return it->second;
  };
  for (const AlignmentTrace& trace : traces) {
    for (const EditStep& s : trace) {
      switch (s.op) {
        case EditOp::kMatch:
          ++sum.matrix[id(s.ref)][id(s.ref)];
          break;
        case EditOp::kSubstitute:
          ++sum.matrix[id(s.ref)][id(s.hyp)];
          break;
        case EditOp::kInsert:
          ++sum.insertions[id(s.hyp)];
          break;
        case EditOp::kDelete:
          ++sum.deletions[id(s.ref)];
          break;
      }
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Tokenization and transcript files.

// Whitespace-separated tokens; also serves phoneme-name sequences.
inline std::vector<std::string> word_tokens(const std::string& line) {
  return split_fields(line);
}

// One token per UTF-8 code point, spaces included.  Malformed bytes pass
// through one at a time.
inline std::vector<std::string> char_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    unsigned char lead = static_cast<unsigned char>(line[i]);
    std::size_t len = 1;
    if (lead >= 0xf0) {
      len = 4;
    } else if (lead >= 0xe0) {
      len = 3;
    } else if (lead >= 0xc0) {
      len = 2;
    }
    if (i + len > line.size()) len = 1;
    out.push_back(line.substr(i, len));
    i += len;
  }
  return out;
}

// Parses `utt_id<TAB>tokens` lines; tokens may be empty.  Order preserved;
// duplicate ids rejected.
inline std::vector<std::pair<std::string, std::string>> parse_transcript(
    const std::string& text, const std::string& filename = "<transcript>") {
  std::vector<std::pair<std::string, std::string>> out;
  std::unordered_set<std::string> seen;
  std::vector<std::string> lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    std::size_t tab = lines[ln].find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(filename, ln + 1, "expected 'utt_id<TAB>tokens'");
    }
    std::string id = lines[ln].substr(0, tab);
    if (!seen.insert(id).second) {
      throw DataError(filename, ln + 1, "duplicate utterance id: '" + id + "'");
    }
    out.emplace_back(std::move(id), lines[ln].substr(tab + 1));
  }
  return out;
}

}  // namespace phonlat

#endif  // PHONLAT_METRICS_HPP_
