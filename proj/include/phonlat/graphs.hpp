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
// Builders for the three decoding transducers and their composition:
//
//   T  frame tokens -> collapsed tokens   (duplicate merge, blank removal)
//   L  tokens       -> words              (pronunciation closure)
//   G  words        -> words              (backoff n-gram scores)
//
// T and L carry weight one everywhere, so every TLG path weight is the
// grammar's score for the emitted words.  Backoff is encoded as epsilon
// arcs, which lets a backoff path shadow an explicit n-gram when the
// shadow is cheaper; search takes the minimum, so scores can only improve
// against the exact model.  No disambiguation symbols are inserted: the
// pipeline never determinizes, and ambiguity stays as parallel paths.

#ifndef PHONLAT_GRAPHS_HPP_
#define PHONLAT_GRAPHS_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "phonlat/alphabet.hpp"
#include "phonlat/arpa.hpp"
#include "phonlat/error.hpp"
#include "phonlat/fst.hpp"
#include "phonlat/fst_ops.hpp"
#include "phonlat/lexicon.hpp"
#include "phonlat/semiring.hpp"

namespace phonlat {

// Deduplicating, blank-removing transducer: the unique path for a frame
// token string u outputs exactly collapse(u) with weight one.  State 0 is
// the run boundary (start, or right after a blank); state j remembers an
// open run of token j, whose repeats emit nothing.
inline Wfst build_ctc_fst(const PhonemeAlphabet& alphabet) {
  Wfst t(Semiring::kTropical);
  t.isymbols = alphabet.frame_symbols();
  t.osymbols = alphabet.token_symbols();
  const int tokens = alphabet.size();
  const int blank = tokens + 1;
  const Weight one = Weight::one(Semiring::kTropical);

  StateId boundary = t.add_state();
  t.set_start(boundary);
  t.set_final(boundary, one);
  for (int j = 1; j <= tokens; ++j) {
    StateId run = t.add_state();
    t.set_final(run, one);
  }
  t.add_arc(boundary, Arc{blank, kEpsilonLabel, one, boundary});
  for (int j = 1; j <= tokens; ++j) {
    t.add_arc(boundary, Arc{j, j, one, j});
  }
  for (int j = 1; j <= tokens; ++j) {
    t.add_arc(j, Arc{j, kEpsilonLabel, one, j});
    t.add_arc(j, Arc{blank, kEpsilonLabel, one, boundary});
    for (int i = 1; i <= tokens; ++i) {
      if (i != j) t.add_arc(j, Arc{i, i, one, i});
    }
  }
  return t;
}

// Pronunciation closure: any concatenation of pronunciations is accepted,
// emitting each word id on the first phoneme of its pronunciation.  The
// optional silence phoneme loops at the word boundary with weight one.
inline Wfst build_lexicon_fst(const Lexicon& lex,
                              const PhonemeAlphabet& alphabet,
                              std::optional<int> silence = std::nullopt) {
  if (lex.size() == 0) throw Error("lexicon is empty");
  Wfst l(Semiring::kTropical);
  l.isymbols = alphabet.token_symbols();
  l.osymbols = lex.word_symbols();
  const Weight one = Weight::one(Semiring::kTropical);

  StateId home = l.add_state();
  l.set_start(home);
  l.set_final(home, one);
  if (silence.has_value()) {
    if (*silence < 0 || *silence >= alphabet.size()) {
      throw Error("silence phoneme id out of range: " +
                  std::to_string(*silence));
    }
    l.add_arc(home, Arc{*silence + 1, kEpsilonLabel, one, home});
  }
  for (const Lexicon::Entry& entry : lex.entries()) {
    int word = l.osymbols.find(entry.word);
    for (const std::vector<int>& pron : entry.prons) {
      StateId at = home;
      for (std::size_t i = 0; i < pron.size(); ++i) {
        if (pron[i] < 0 || pron[i] >= alphabet.size()) {
          throw Error("pronunciation for '" + entry.word +
                      "' has phoneme id out of range");
        }
        StateId next = (i + 1 == pron.size()) ? home : l.add_state();
        l.add_arc(at, Arc{pron[i] + 1,
                          i == 0 ? word : kEpsilonLabel, one, next});
        at = next;
      }
    }
  }
  return l;
}

// Backoff model as a word acceptor: one state per context that carries a
// backoff weight (plus the empty context), word arcs weighted -ln p,
// epsilon backoff arcs weighted -ln(backoff), final weights from the
// end-of-sentence probabilities.  Sentence markers never label arcs.
inline Wfst build_grammar_fst(const ArpaLm& lm) {
  lm.validate();
  constexpr double kLn10 = std::numbers::ln10;
  Wfst g(Semiring::kTropical);
  for (const std::string& w : lm.vocabulary()) {
    if (w == kSentenceBegin || w == kSentenceEnd) continue;
    g.isymbols.add(w);
  }
  g.osymbols = g.isymbols;

  std::map<ArpaLm::Gram, StateId> states;
  states[{}] = g.add_state();
  for (int n = 1; n < lm.order(); ++n) {
    for (const auto& [gram, entry] : lm.table(n)) {
      if (entry.log10_backoff.has_value()) states[gram] = g.add_state();
    }
  }
  // Longest suffix of the gram that has a state; the empty context always
  // does, so the walk terminates.
  auto suffix_state = [&states](ArpaLm::Gram gram) {
    auto it = states.find(gram);
    while (it == states.end()) {
      gram.erase(gram.begin());
      it = states.find(gram);
    }
    return it->second;
  };
  g.set_start(suffix_state({kSentenceBegin}));

  for (int n = 1; n <= lm.order(); ++n) {
    for (const auto& [gram, entry] : lm.table(n)) {
      const std::string& word = gram.back();
      if (word == kSentenceBegin) continue;
      ArpaLm::Gram context(gram.begin(), gram.end() - 1);
      StateId src = states.at(context);
      Weight score(-kLn10 * entry.log10_prob, Semiring::kTropical);
      if (word == kSentenceEnd) {
        g.set_final(src, score);
        continue;
      }
      int label = g.isymbols.find(word);
      g.add_arc(src, Arc{label, label, score, suffix_state(gram)});
    }
  }
  for (int n = 1; n < lm.order(); ++n) {
    for (const auto& [gram, entry] : lm.table(n)) {
      if (!entry.log10_backoff.has_value()) continue;
      ArpaLm::Gram shorter(gram.begin() + 1, gram.end());
      g.add_arc(states.at(gram),
                Arc{kEpsilonLabel, kEpsilonLabel,
                    Weight(-kLn10 * *entry.log10_backoff,
                           Semiring::kTropical),
                    suffix_state(shorter)});
    }
  }
  return g;
}

// Single-state word acceptor weighted by smoothed relative frequency:
// -ln((count + a) / (total + a * V)) per word.
inline Wfst build_unigram_fst(const VocabFrequency& freqs, double smoothing) {
  if (freqs.counts().empty()) throw Error("frequency table is empty");
  if (!(smoothing >= 0.0) || std::isinf(smoothing)) {
    throw Error("smoothing must be finite and >= 0");
  }
  Wfst g(Semiring::kTropical);
  for (const auto& [word, count] : freqs.counts()) g.isymbols.add(word);
  g.osymbols = g.isymbols;
  StateId s = g.add_state();
  g.set_start(s);
  g.set_final(s, Weight::one(Semiring::kTropical));
  double denom = static_cast<double>(freqs.total()) +
                 smoothing * static_cast<double>(freqs.counts().size());
  for (const auto& [word, count] : freqs.counts()) {
    int label = g.isymbols.find(word);
    double p = (static_cast<double>(count) + smoothing) / denom;
    g.add_arc(s, Arc{label, label,
                     Weight(-std::log(p), Semiring::kTropical), s});
  }
  return g;
}

namespace detail {

// Rewrites a machine's labels onto the given tables by symbol name.  Arcs
// carrying a name the target table lacks can never match in composition
// and are dropped.
inline Wfst relabel_by_name(const Wfst& f, const SymbolTable& isyms,
                            const SymbolTable& osyms) {
  Wfst out(f.ring());
  out.isymbols = isyms;
  out.osymbols = osyms;
  for (StateId s = 0; s < f.num_states(); ++s) out.add_state();
  if (f.start() != kNoState) out.set_start(f.start());
  for (StateId s = 0; s < f.num_states(); ++s) {
    out.set_final(s, f.final_weight(s));
    for (const Arc& arc : f.arcs(s)) {
      int il = arc.ilabel == kEpsilonLabel
                   ? kEpsilonLabel
                   : isyms.find(f.isymbols.name(arc.ilabel));
      int ol = arc.olabel == kEpsilonLabel
                   ? kEpsilonLabel
                   : osyms.find(f.osymbols.name(arc.olabel));
      if (il < 0 || ol < 0) continue;
      out.add_arc(s, Arc{il, ol, arc.weight, arc.next_state});
    }
  }
  return out;
}

}  // namespace detail

// Full decoding graph.  G's word labels are harmonized onto L's output
// table by name first, so independently built grammars compose; words the
// lexicon cannot spell are dropped with their arcs.
inline Wfst compile_tlg(const Wfst& t, const Wfst& l, const Wfst& g) {
  Wfst tl = compose(t, l);
  Wfst gw = detail::relabel_by_name(g, l.osymbols, l.osymbols);
  return connect(arcsort(compose(tl, gw), SortBy::kIlabel));
}

}  // namespace phonlat

#endif  // PHONLAT_GRAPHS_HPP_
