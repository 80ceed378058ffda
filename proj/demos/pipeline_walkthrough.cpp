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
// Walks the full offline pipeline in one sitting: build a lexicon, train a
// bigram model, compile the decoding graph, synthesize frame posteriors for
// a few sentences, decode them clean and noisy, and score the noisy pass.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "phonlat/alphabet.hpp"
#include "phonlat/arpa.hpp"
#include "phonlat/decode.hpp"
#include "phonlat/graphs.hpp"
#include "phonlat/katz.hpp"
#include "phonlat/lexicon.hpp"
#include "phonlat/metrics.hpp"
#include "phonlat/rng.hpp"
#include "phonlat/simulate.hpp"
#include "phonlat/util.hpp"

namespace {

std::vector<std::string> hypothesis_words(
    const phonlat::Wfst& graph, const std::vector<phonlat::Hypothesis>& nbest) {
  std::vector<std::string> out;
  if (nbest.empty()) return out;
  for (int id : nbest[0].words) out.push_back(graph.osymbols.name(id));
  return out;
}

}  // namespace

int main() {
  using namespace phonlat;

  PhonemeAlphabet alphabet = PhonemeAlphabet::from_tokens(
      {"b", "e", "f", "l", "s", "t"});

  Lexicon lexicon;
  std::map<std::string, std::vector<int>> pron_of{
      {"bee", {0, 1, 1}},  {"fee", {2, 1, 1}},  {"bell", {0, 1, 3}},
      {"best", {0, 1, 4, 5}}, {"left", {3, 1, 2, 5}}, {"set", {4, 1, 5}},
  };
  for (const auto& [word, pron] : pron_of) lexicon.add(word, pron);
  std::printf("lexicon: %zu words over %d phonemes\n", lexicon.size(),
              alphabet.size());

  // A tiny corpus is enough for Katz training; backoff covers the rest.
  std::vector<std::vector<std::string>> corpus{
      {"bee", "set"},          {"fee", "set"},       {"best", "bell"},
      {"left", "bee"},         {"set", "best"},      {"bell"},
      {"bee", "left", "fee"},  {"set"},              {"best", "fee"},
      {"left", "bell", "set"},
  };
  ArpaLm lm = train_katz(corpus, 2, 0);
  std::printf("model: %zu unigrams, %zu bigrams\n", lm.table(1).size(),
              lm.table(2).size());

  Wfst tlg = compile_tlg(build_ctc_fst(alphabet),
                         build_lexicon_fst(lexicon, alphabet),
                         build_grammar_fst(lm));
  std::printf("graph: %d states, %zu arcs\n\n", tlg.num_states(),
              tlg.num_arcs());

  std::vector<std::vector<std::string>> sentences{
      {"bee", "set"}, {"left", "fee"}, {"best", "bell", "set"}};

  auto spell = [&](const std::vector<std::string>& sentence) {
    std::vector<std::string> phones;
    for (const std::string& word : sentence) {
      for (int id : pron_of.at(word)) phones.push_back(alphabet.token(id));
    }
    return phones;
  };

  // Noiseless frames decode back to the exact sentence.
  for (const auto& sentence : sentences) {
    SimulationConfig clean;
    clean.frames_per_token = 2;
    clean.blank_fraction = 0.3;
    clean.seed = 7;
    PosteriorSequence p = simulate_posteriors(spell(sentence), alphabet, clean);
    auto hyp = decode(p, tlg);
    std::printf("clean  %-18s -> %s\n", join(sentence, " ").c_str(),
                join(hypothesis_words(tlg, hyp), " ").c_str());
  }

  // Noisy frames: decode every sentence at two beam widths and score.
  std::printf("\n");
  for (int beam : {1, 64}) {
    DecodeConfig cfg;
    cfg.beam_width = beam;
    std::vector<SequencePair> pairs;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      SimulationConfig noisy;
      noisy.frames_per_token = 2;
      noisy.blank_fraction = 0.3;
      noisy.noise_temperature = 0.5;
      noisy.seed = 100 + i;
      PosteriorSequence p =
          simulate_posteriors(spell(sentences[i]), alphabet, noisy);
      pairs.push_back(
          {sentences[i], hypothesis_words(tlg, decode(p, tlg, cfg))});
    }
    ErrorReport report = error_rate(pairs);
    std::printf("noisy  beam %-3d WER %.1f%% (%lld edits / %lld words)\n",
                beam, 100.0 * report.rate,
                static_cast<long long>(report.total_edits),
                static_cast<long long>(report.total_ref_len));
  }
  return 0;
}
