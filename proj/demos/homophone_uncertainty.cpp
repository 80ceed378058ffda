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
// Two views of homophone ambiguity.  A character-level model trained on the
// pair {fare, fair} spreads its mass over four spellings, because positions
// 2 and 3 each carry two equally likely letters; a pronunciation-level
// decoder never faces that blowup, since the word choice is deferred to the
// language model.

#include <cstdio>
#include <string>
#include <vector>

#include "phonlat/alphabet.hpp"
#include "phonlat/arpa.hpp"
#include "phonlat/decode.hpp"
#include "phonlat/graphs.hpp"
#include "phonlat/homophone.hpp"
#include "phonlat/lexicon.hpp"
#include "phonlat/posteriors.hpp"

int main() {
  using namespace phonlat;

  auto [model, ranked] = homophone_mle({"fare", "fair"});
  std::printf("per-letter maximum likelihood over {fare, fair}:\n");
  for (const ScoredString& s : ranked) {
    std::printf("  %s  %.3f\n", s.text.c_str(), s.prob);
  }

  // Both words share one pronunciation, so the acoustics cannot separate
  // them; the grammar weight decides.
  PhonemeAlphabet alphabet = PhonemeAlphabet::from_tokens({"f", "e", "r"});
  Lexicon lexicon;
  lexicon.add("fare", {0, 1, 2});
  lexicon.add("fair", {0, 1, 2});

  std::vector<std::vector<double>> rows;
  for (int phoneme : {0, 1, 2}) {
    std::vector<double> row(static_cast<std::size_t>(alphabet.columns()), 0.0);
    row[static_cast<std::size_t>(phoneme)] = 1.0;
    rows.push_back(std::move(row));
  }
  PosteriorSequence posteriors =
      PosteriorSequence::checked(std::move(rows), alphabet);

  auto grammar = [](double log10_fare, double log10_fair) {
    ArpaLm lm;
    lm.set({"fare"}, log10_fare);
    lm.set({"fair"}, log10_fair);
    lm.set({kSentenceEnd}, -0.4);
    return lm;
  };

  std::printf("\nsame posteriors, flipped grammar preference:\n");
  for (bool prefer_fare : {true, false}) {
    ArpaLm lm = prefer_fare ? grammar(-0.2, -0.6) : grammar(-0.6, -0.2);
    Wfst tlg = compile_tlg(build_ctc_fst(alphabet),
                           build_lexicon_fst(lexicon, alphabet),
                           build_grammar_fst(lm));
    DecodeConfig cfg;
    cfg.nbest = 2;
    auto nbest = decode(posteriors, tlg, cfg);
    for (std::size_t rank = 0; rank < nbest.size(); ++rank) {
      std::printf("  prefers %s  #%zu %s  cost %.4f\n",
                  prefer_fare ? "fare" : "fair", rank + 1,
                  tlg.osymbols.name(nbest[rank].words[0]).c_str(),
                  nbest[rank].cost);
    }
  }
  return 0;
}
