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

#ifndef PHONLAT_DECODE_HPP_
#define PHONLAT_DECODE_HPP_

// Frame-synchronous Viterbi beam search of posterior sequences against a
// compiled decoding graph, plus an exhaustive reference decoder for tiny
// instances.  The search is max-over-alignments: each hypothesis tracks one
// graph state and one emitted word sequence, input-epsilon arcs are followed
// to closure between frames, and pruning keeps the cheapest beam_width
// hypotheses under a total order (cost, then word ids, then state), so equal
// inputs always produce equal outputs.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "phonlat/alphabet.hpp"
#include "phonlat/arpa.hpp"
#include "phonlat/ctc.hpp"
#include "phonlat/error.hpp"
#include "phonlat/fst.hpp"
#include "phonlat/lexicon.hpp"
#include "phonlat/posteriors.hpp"
#include "phonlat/symbol_table.hpp"

namespace phonlat {

// One partial or complete decoding.  Repeat/blank sequencing lives in the
// graph's collapse transducer; last_frame_label merely records the most
// recently consumed frame label for inspection.
struct Hypothesis {
  StateId state = kNoState;
  double cost = 0.0;
  std::vector<int> words;
  int last_frame_label = kEpsilonLabel;
};

struct DecodeConfig {
  int beam_width = 64;
  double acoustic_scale = 1.0;
  double word_insertion_penalty = 0.0;
  int nbest = 1;
};

namespace detail {

// Total order for pruning and ranking: cost, then word ids, then state.
inline bool hyp_less(const Hypothesis& a, const Hypothesis& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.words != b.words) return a.words < b.words;
  return a.state < b.state;
}

// Active hypotheses keyed by (state, words); the map keeps the cheapest
// candidate per key, which is exact for the best-path problem because
// future cost depends only on the state and the number of future words.
using BeamKey = std::pair<StateId, std::vector<int>>;
using Beam = std::map<BeamKey, Hypothesis>;

inline void beam_insert(Beam& beam, Hypothesis h) {
  BeamKey key{h.state, h.words};
  auto it = beam.find(key);
  if (it == beam.end()) {
    beam.emplace(std::move(key), std::move(h));
  } else if (h.cost < it->second.cost) {
    it->second = std::move(h);
  }
}

// Relaxes input-epsilon arcs (grammar backoff) to fixpoint.  Compiled
// graphs have acyclic epsilon structure, so every improving path is simple
// and uses fewer hops than there are states; a hop count past that bound
// proves a negative-cost epsilon cycle.
inline void epsilon_closure(const Wfst& graph, const DecodeConfig& cfg,
                            Beam& beam) {
  std::map<BeamKey, int> hops;
  std::deque<BeamKey> work;
  for (const auto& [key, h] : beam) work.push_back(key);
  while (!work.empty()) {
    BeamKey key = std::move(work.front());
    work.pop_front();
    auto at = beam.find(key);
    if (at == beam.end()) continue;
    const Hypothesis h = at->second;
    const int depth = hops.count(key) ? hops[key] : 0;
    for (const Arc& arc : graph.arcs(h.state)) {
      if (arc.ilabel != kEpsilonLabel) continue;
      Hypothesis nh;
      nh.state = arc.next_state;
      nh.cost = h.cost + arc.weight.value;
      nh.words = h.words;
      nh.last_frame_label = h.last_frame_label;
      if (arc.olabel != kEpsilonLabel) {
        nh.words.push_back(arc.olabel);
        nh.cost += cfg.word_insertion_penalty;
      }
      if (!std::isfinite(nh.cost)) continue;
      BeamKey nkey{nh.state, nh.words};
      auto it = beam.find(nkey);
      if (it != beam.end() && it->second.cost <= nh.cost) continue;
      if (depth + 1 > graph.num_states()) {
        throw Error("negative-cost epsilon cycle in decoding graph");
      }
      hops[nkey] = depth + 1;
      beam_insert(beam, std::move(nh));
      work.push_back(std::move(nkey));
    }
  }
}

inline void prune_beam(Beam& beam, int width) {
  if (static_cast<int>(beam.size()) <= width) return;
  std::vector<const Hypothesis*> order;
  order.reserve(beam.size());
  for (const auto& [key, h] : beam) order.push_back(&h);
  std::sort(order.begin(), order.end(),
            [](const Hypothesis* a, const Hypothesis* b) {
              return hyp_less(*a, *b);
            });
  Beam kept;
  for (int i = 0; i < width; ++i) {
    kept.emplace(BeamKey{order[i]->state, order[i]->words}, *order[i]);
  }
  beam = std::move(kept);
}

inline void check_config(const DecodeConfig& cfg) {
  if (cfg.beam_width < 1) throw Error("beam_width must be at least 1");
  if (!(cfg.acoustic_scale > 0.0)) {
    throw Error("acoustic_scale must be positive");
  }
  if (cfg.nbest < 1) throw Error("nbest must be at least 1");
}

}  // namespace detail

// Decodes one posterior sequence against a compiled graph.  Each frame t
// extends hypotheses along arcs consuming one frame label with cost
// acoustic_scale * -ln p(label | t) plus the arc weight, follows epsilon
// arcs to closure, and prunes to beam_width.  Returns up to nbest distinct
// word sequences ascending by cost (ties by word ids); empty when no
// hypothesis reaches a final state.
inline std::vector<Hypothesis> decode(const PosteriorSequence& posteriors,
                                      const Wfst& graph,
                                      const DecodeConfig& cfg = {}) {
  detail::check_config(cfg);
  if (graph.ring() != Semiring::kTropical) {
    throw Error("decoding requires a tropical-semiring graph");
  }
  if (graph.start() == kNoState) throw Error("empty decoding graph");
  if (posteriors.frames() > 0 &&
      posteriors.columns() + 1 != graph.isymbols.size()) {
    throw Error("posterior columns do not match the graph input alphabet: " +
                std::to_string(posteriors.columns()) + " columns vs " +
                std::to_string(graph.isymbols.size() - 1) + " input labels");
  }

  detail::Beam beam;
  detail::beam_insert(beam, Hypothesis{graph.start(), 0.0, {}, kEpsilonLabel});
  detail::epsilon_closure(graph, cfg, beam);
  detail::prune_beam(beam, cfg.beam_width);

  for (int t = 0; t < posteriors.frames() && !beam.empty(); ++t) {
    detail::Beam next;
    for (const auto& [key, h] : beam) {
      for (const Arc& arc : graph.arcs(h.state)) {
        if (arc.ilabel == kEpsilonLabel) continue;
        double p = posteriors.prob(t, arc.ilabel - 1);
        if (!(p > 0.0)) continue;
        Hypothesis nh;
        nh.state = arc.next_state;
        nh.cost = h.cost + arc.weight.value + cfg.acoustic_scale * -std::log(p);
        nh.words = h.words;
        nh.last_frame_label = arc.ilabel;
        if (arc.olabel != kEpsilonLabel) {
          nh.words.push_back(arc.olabel);
          nh.cost += cfg.word_insertion_penalty;
        }
        if (!std::isfinite(nh.cost)) continue;
        detail::beam_insert(next, std::move(nh));
      }
    }
    beam = std::move(next);
    detail::epsilon_closure(graph, cfg, beam);
    detail::prune_beam(beam, cfg.beam_width);
  }

  std::vector<Hypothesis> finals;
  for (const auto& [key, h] : beam) {
    if (!graph.is_final(h.state)) continue;
    Hypothesis done = h;
    done.cost += graph.final_weight(h.state).value;
    if (std::isfinite(done.cost)) finals.push_back(std::move(done));
  }
  std::sort(finals.begin(), finals.end(), detail::hyp_less);
  std::vector<Hypothesis> ranked;
  for (Hypothesis& h : finals) {
    bool seen = false;
    for (const Hypothesis& r : ranked) {
      if (r.words == h.words) {
        seen = true;
        break;
      }
    }
    if (!seen) ranked.push_back(std::move(h));
    if (static_cast<int>(ranked.size()) == cfg.nbest) break;
  }
  return ranked;
}

// Reference decoder limits: tiny instances only, enforced strictly so the
// exponential enumeration stays cheap.
struct OracleConfig {
  int max_words = 3;
  bool full_sum = false;
  double acoustic_scale = 1.0;
  double word_insertion_penalty = 0.0;
};

struct OracleResult {
  std::vector<int> words;
  double cost = kInfinity;
};

// Exhaustively scores every word sequence of at most max_words lexicon
// words: for each pronunciation concatenation, all collapse alignments of
// the posterior length are enumerated and combined by max (full_sum=false,
// the search convention) or by probability sum, then the exact backoff
// model score and per-word penalty are added.  Word sequences containing
// words outside the model vocabulary are unsayable.  Returns the cheapest
// finite candidate (ties by word ids), or nullopt when none exists.
inline std::optional<OracleResult> oracle_decode(
    const PosteriorSequence& posteriors, const PhonemeAlphabet& alphabet,
    const Lexicon& lexicon, const ArpaLm& lm, const OracleConfig& cfg = {}) {
  if (posteriors.frames() > 8) {
    throw Error("oracle_decode limited to 8 frames, got " +
                std::to_string(posteriors.frames()));
  }
  if (lexicon.size() > 6) {
    throw Error("oracle_decode limited to 6 lexicon words, got " +
                std::to_string(lexicon.size()));
  }
  if (cfg.max_words < 0 || cfg.max_words > 3) {
    throw Error("oracle_decode limited to 3 words per sequence");
  }
  if (!(cfg.acoustic_scale > 0.0)) {
    throw Error("acoustic_scale must be positive");
  }
  if (posteriors.frames() > 0 &&
      posteriors.columns() != alphabet.columns()) {
    throw Error("posterior columns do not match the alphabet");
  }

  const int frames = posteriors.frames();
  constexpr double kLn10 = std::numbers::ln10;

  auto alignment_cost = [&](const std::vector<int>& u) {
    double c = 0.0;
    for (int t = 0; t < frames; ++t) {
      double p = posteriors.prob(t, u[t]);
      if (!(p > 0.0)) return kInfinity;
      c += -std::log(p);
    }
    return cfg.acoustic_scale * c;
  };
  // -ln sum of exp(-c) over finite costs; min instead under Viterbi.
  auto combine = [&](const std::vector<double>& costs) {
    double best = kInfinity;
    for (double c : costs) best = std::min(best, c);
    if (!cfg.full_sum || !std::isfinite(best)) return best;
    double sum = 0.0;
    for (double c : costs) {
      if (std::isfinite(c)) sum += std::exp(best - c);
    }
    return best - std::log(sum);
  };
  // Alignments of one concatenated pronunciation, already combined.
  auto pronunciation_cost = [&](const LabelSequence& labels) {
    if (static_cast<int>(labels.size()) > frames) return kInfinity;
    std::vector<double> costs;
    for (const auto& u : enumerate_alignments(
             labels, static_cast<std::size_t>(frames), alphabet)) {
      costs.push_back(alignment_cost(u));
    }
    return combine(costs);
  };

  SymbolTable word_ids = lexicon.word_symbols();
  std::optional<OracleResult> best;
  std::vector<const Lexicon::Entry*> sequence;
  auto consider = [&]() {
    std::vector<std::string> names;
    std::vector<int> ids;
    for (const Lexicon::Entry* e : sequence) {
      if (!lm.contains_word(e->word)) return;
      names.push_back(e->word);
      ids.push_back(word_ids.find(e->word));
    }
    // Distinct pronunciation choices stay distinct paths in the graph, so
    // the full-sum convention sums over them without deduplication.
    std::vector<double> per_combo;
    std::vector<std::size_t> pick(sequence.size(), 0);
    for (;;) {
      LabelSequence labels;
      for (std::size_t i = 0; i < sequence.size(); ++i) {
        const auto& pron = sequence[i]->prons[pick[i]];
        labels.insert(labels.end(), pron.begin(), pron.end());
      }
      per_combo.push_back(pronunciation_cost(labels));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == sequence[i]->prons.size()) {
        pick[i++] = 0;
      }
      if (i == pick.size()) break;
    }
    double acoustic = combine(per_combo);
    if (!std::isfinite(acoustic)) return;
    double total = acoustic - kLn10 * lm_log_prob(lm, names) +
                   cfg.word_insertion_penalty *
                       static_cast<double>(sequence.size());
    if (!std::isfinite(total)) return;
    if (!best || total < best->cost ||
        (total == best->cost && ids < best->words)) {
      best = OracleResult{std::move(ids), total};
    }
  };
  auto extend = [&](auto&& self) -> void {
    consider();
    if (static_cast<int>(sequence.size()) == cfg.max_words) return;
    for (const Lexicon::Entry& entry : lexicon.entries()) {
      sequence.push_back(&entry);
      self(self);
      sequence.pop_back();
    }
  };
  extend(extend);
  return best;
}

// One utterance in, one result out; a failed utterance carries its error
// text and an empty n-best list.
struct Utterance {
  std::string id;
  PosteriorSequence posteriors;
};

struct UtteranceResult {
  std::string id;
  std::vector<Hypothesis> nbest;
  std::string error;

  bool ok() const { return error.empty(); }
};

// Decodes utterances over one shared read-only graph.  Results are slotted
// by input index, so output order and content are identical at every
// parallelism level; per-utterance failures are captured, not fatal.
inline std::vector<UtteranceResult> decode_batch(
    const std::vector<Utterance>& utterances, const Wfst& graph,
    const DecodeConfig& cfg = {}, int parallelism = 1) {
  detail::check_config(cfg);
  if (parallelism < 1) throw Error("parallelism must be at least 1");
  std::vector<UtteranceResult> results(utterances.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= utterances.size()) return;
      results[i].id = utterances[i].id;
      try {
        results[i].nbest = decode(utterances[i].posteriors, graph, cfg);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  std::size_t threads = std::min<std::size_t>(
      static_cast<std::size_t>(parallelism), utterances.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return results;
}

// Result lines: `utt_id<TAB>cost<TAB>word word ...`; the n-best variant
// inserts a 1-based rank column after the id.
inline std::string format_decode_line(const std::string& id,
                                      const Hypothesis& hyp,
                                      const SymbolTable& words) {
  char cost[32];
  std::snprintf(cost, sizeof(cost), "%.6f", hyp.cost);
  std::string line = id + "\t" + cost + "\t";
  for (std::size_t i = 0; i < hyp.words.size(); ++i) {
    if (i > 0) line += " ";
    line += words.name(hyp.words[i]);
  }
  return line;
}

inline std::string format_nbest_line(const std::string& id, int rank,
                                     const Hypothesis& hyp,
                                     const SymbolTable& words) {
  return format_decode_line(id + "\t" + std::to_string(rank), hyp, words);
}

}  // namespace phonlat

#endif  // PHONLAT_DECODE_HPP_
