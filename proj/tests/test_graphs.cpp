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

#include "phonlat/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "phonlat/alphabet.hpp"
#include "phonlat/arpa.hpp"
#include "phonlat/ctc.hpp"
#include "phonlat/error.hpp"
#include "phonlat/fst.hpp"
#include "phonlat/fst_ops.hpp"
#include "phonlat/katz.hpp"
#include "phonlat/lexicon.hpp"
#include "phonlat/rng.hpp"
#include "phonlat/util.hpp"
#include "support/lm_oracles.hpp"
#include "support/oracles.hpp"

namespace phonlat {
namespace {

using testing::enumerate_paths;
using testing::enumerate_relation;
using testing::Relation;
using testing::relations_close;

constexpr double kLn10 = std::numbers::ln10;
constexpr double kInf = std::numeric_limits<double>::infinity();

Wfst linear_acceptor(const SymbolTable& syms, const std::vector<int>& ids) {
  Wfst f(Semiring::kTropical);
  f.isymbols = syms;
  f.osymbols = syms;
  const Weight one = Weight::one(Semiring::kTropical);
  StateId at = f.add_state();
  f.set_start(at);
  for (int id : ids) {
    StateId next = f.add_state();
    f.add_arc(at, Arc{id, id, one, next});
    at = next;
  }
  f.set_final(at, one);
  return f;
}

// Frame symbol ids (tokens shifted by one, blank last) for a spaced string.
std::vector<int> frame_ids(const PhonemeAlphabet& a, const std::string& s) {
  SymbolTable frames = a.frame_symbols();
  std::vector<int> ids;
  for (const std::string& tok : split_fields(s)) {
    int id = frames.find(tok);
    if (id < 0) throw Error("unknown frame token: " + tok);
    ids.push_back(id);
  }
  return ids;
}

std::vector<int> token_ids(const PhonemeAlphabet& a, const std::string& s) {
  std::vector<int> ids;
  for (const std::string& tok : split_fields(s)) ids.push_back(a.find(tok));
  return ids;
}

// ---------------------------------------------------------------------------
// T: deduplicating blank remover

TEST(CtcFst, CollapsesTheAlignmentExample) {
  PhonemeAlphabet a = PhonemeAlphabet::from_tokens({"b", "e"});
  Wfst t = build_ctc_fst(a);
  auto paths = enumerate_paths(
      compose(linear_acceptor(t.isymbols, frame_ids(a, "b e ␣ e ␣")), t), 8);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(std::get<1>(paths[0]), (std::vector<int>{1, 2, 2}));
  EXPECT_DOUBLE_EQ(std::get<0>(paths[0]), 0.0);
}

TEST(CtcFst, AllBlankInputYieldsEmptyOutput) {
  PhonemeAlphabet a = PhonemeAlphabet::from_tokens({"b", "e"});
  Wfst t = build_ctc_fst(a);
  auto paths = enumerate_paths(
      compose(linear_acceptor(t.isymbols, frame_ids(a, "␣ ␣ ␣")), t), 6);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_TRUE(std::get<1>(paths[0]).empty());
  EXPECT_DOUBLE_EQ(std::get<0>(paths[0]), 0.0);
}

// The one path for every random frame string carries weight one and
// outputs the collapse of its input.
TEST(CtcFst, UniqueOutputIsTheCollapsedInput) {
  PhonemeAlphabet a = PhonemeAlphabet::from_tokens({"b", "e", "k", "s"});
  Wfst t = build_ctc_fst(a);
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t len = rng.index(9);
    std::vector<int> frames;          // 0-based tokens, blank = size
    std::vector<int> frame_syms;      // shifted machine labels
    for (std::size_t i = 0; i < len; ++i) {
      int tok = static_cast<int>(rng.index(
          static_cast<std::size_t>(a.size()) + 1));
      frames.push_back(tok);
      frame_syms.push_back(tok + 1);
    }
    auto paths = enumerate_paths(
        compose(linear_acceptor(t.isymbols, frame_syms), t), len + 1);
    ASSERT_EQ(paths.size(), 1u) << "trial " << trial;
    std::vector<int> expected;
    for (int tok : collapse(frames, a)) expected.push_back(tok + 1);
    EXPECT_EQ(std::get<1>(paths[0]), expected) << "trial " << trial;
    EXPECT_DOUBLE_EQ(std::get<0>(paths[0]), 0.0);
  }
}

// ---------------------------------------------------------------------------
// L: pronunciation closure

PhonemeAlphabet lex_alphabet() {
  return PhonemeAlphabet::from_tokens({"b", "e", "f", "l", "r", "s", "sil"});
}

Lexicon small_lexicon(const PhonemeAlphabet& a) {
  Lexicon lex;
  lex.add("bee", token_ids(a, "b e e"));
  lex.add("bell", token_ids(a, "b e l"));
  lex.add("fell", token_ids(a, "f e l"));
  lex.add("eel", token_ids(a, "e e l"));
  return lex;
}

// Output word strings of L on a phoneme-id input (0-based ids).
std::vector<std::vector<int>> lexicon_outputs(const Wfst& l,
                                              const std::vector<int>& tokens) {
  std::vector<int> shifted;
  for (int t : tokens) shifted.push_back(t + 1);
  auto paths = enumerate_paths(compose(linear_acceptor(l.isymbols, shifted), l),
                               tokens.size() + 1);
  std::vector<std::vector<int>> outs;
  for (const auto& [weight, ostring, istring] : paths) {
    EXPECT_DOUBLE_EQ(weight, 0.0);
    outs.push_back(ostring);
  }
  std::sort(outs.begin(), outs.end());
  outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
  return outs;
}

TEST(LexiconFst, SingleWordTransduces) {
  PhonemeAlphabet a = lex_alphabet();
  Lexicon lex = small_lexicon(a);
  Wfst l = build_lexicon_fst(lex, a);
  int bee = l.osymbols.find("bee");
  auto outs = lexicon_outputs(l, token_ids(a, "b e e"));
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0], (std::vector<int>{bee}));
}

TEST(LexiconFst, HomophonesYieldParallelPaths) {
  PhonemeAlphabet a = lex_alphabet();
  Lexicon lex;
  lex.add("fare", token_ids(a, "f e r"));
  lex.add("fair", token_ids(a, "f e r"));
  Wfst l = build_lexicon_fst(lex, a);
  auto outs = lexicon_outputs(l, token_ids(a, "f e r"));
  ASSERT_EQ(outs.size(), 2u);
  EXPECT_EQ(outs[0], (std::vector<int>{l.osymbols.find("fare")}));
  EXPECT_EQ(outs[1], (std::vector<int>{l.osymbols.find("fair")}));
}

TEST(LexiconFst, AlternatePronunciationsMapToOneWord) {
  PhonemeAlphabet a = lex_alphabet();
  Lexicon lex;
  lex.add("lees", token_ids(a, "l e e s"));
  lex.add("lees", token_ids(a, "l e s"));
  Wfst l = build_lexicon_fst(lex, a);
  int lees = l.osymbols.find("lees");
  for (const std::string& pron : {"l e e s", "l e s"}) {
    auto outs = lexicon_outputs(l, token_ids(a, pron));
    ASSERT_EQ(outs.size(), 1u) << pron;
    EXPECT_EQ(outs[0], (std::vector<int>{lees})) << pron;
  }
}

// Every pronunciation maps to its word, and concatenations of up to three
// pronunciations map to the word sequence.
TEST(LexiconFst, ConcatenationsMapToWordStrings) {
  PhonemeAlphabet a = lex_alphabet();
  Lexicon lex = small_lexicon(a);
  Wfst l = build_lexicon_fst(lex, a);
  for (const auto& entry : lex.entries()) {
    for (const auto& pron : entry.prons) {
      auto outs = lexicon_outputs(l, pron);
      std::vector<int> want{l.osymbols.find(entry.word)};
      EXPECT_NE(std::find(outs.begin(), outs.end(), want), outs.end())
          << entry.word;
    }
  }
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t k = 1 + rng.index(3);
    std::vector<int> phonemes;
    std::vector<int> words;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& entry = lex.entries()[rng.index(lex.size())];
      const auto& pron = entry.prons[rng.index(entry.prons.size())];
      phonemes.insert(phonemes.end(), pron.begin(), pron.end());
      words.push_back(l.osymbols.find(entry.word));
    }
    auto outs = lexicon_outputs(l, phonemes);
    EXPECT_NE(std::find(outs.begin(), outs.end(), words), outs.end())
        << "trial " << trial;
  }
}

TEST(LexiconFst, OptionalSilenceLoopsAtWordBoundaries) {
  PhonemeAlphabet a = lex_alphabet();
  Lexicon lex = small_lexicon(a);
  int sil = a.find("sil");
  Wfst plain = build_lexicon_fst(lex, a);
  Wfst with_sil = build_lexicon_fst(lex, a, sil);

  std::vector<int> tokens = token_ids(a, "sil b e e sil sil b e l sil");
  EXPECT_TRUE(lexicon_outputs(plain, tokens).empty());
  auto outs = lexicon_outputs(with_sil, tokens);
  std::vector<int> want{with_sil.osymbols.find("bee"),
                        with_sil.osymbols.find("bell")};
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0], want);
}

TEST(LexiconFst, RejectsBadInputs) {
  PhonemeAlphabet a = lex_alphabet();
  EXPECT_THROW(build_lexicon_fst(Lexicon{}, a), Error);
  Lexicon lex;
  lex.add("bee", {0, 1, 1});
  EXPECT_THROW(build_lexicon_fst(lex, a, 99), Error);
  Lexicon bad;
  bad.add("zap", {42});
  EXPECT_THROW(build_lexicon_fst(bad, a), Error);
}

TEST(LexiconType, ParsesEntriesAndAlternates) {
  PhonemeAlphabet a = lex_alphabet();
  Lexicon lex = Lexicon::parse("bee\tb e e\nbell\tb e l\nbee\tb e\n", a);
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.entry("bee").prons.size(), 2u);
  EXPECT_EQ(lex.entry("bee").prons[1], token_ids(a, "b e"));
  SymbolTable words = lex.word_symbols();
  EXPECT_EQ(words.find("bee"), 1);
  EXPECT_EQ(words.find("bell"), 2);
  Lexicon again = Lexicon::parse(lex.to_text(a), a);
  EXPECT_EQ(again.to_text(a), lex.to_text(a));
}

TEST(LexiconType, ParseErrorsCarryFileAndLine) {
  PhonemeAlphabet a = lex_alphabet();
  try {
    Lexicon::parse("bee\tb e e\nbad\tq x\n", a, "words.lex");
    FAIL() << "unknown phoneme accepted";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("words.lex:2"), std::string::npos);
  }
  EXPECT_THROW(Lexicon::parse("bee\n", a), DataError);
  EXPECT_THROW(Lexicon::parse("", a), DataError);
}

TEST(VocabFrequencyType, ParsesCountsInOrder) {
  VocabFrequency freq = VocabFrequency::parse("bee 3\nbell 1\n");
  ASSERT_EQ(freq.counts().size(), 2u);
  EXPECT_EQ(freq.counts()[0].first, "bee");
  EXPECT_EQ(freq.counts()[0].second, 3);
  EXPECT_EQ(freq.total(), 4);
  EXPECT_THROW(VocabFrequency::parse("bee 0\n"), DataError);
  EXPECT_THROW(VocabFrequency::parse("bee 3\nbee 1\n"), DataError);
  EXPECT_THROW(VocabFrequency::parse(""), DataError);
  EXPECT_THROW(VocabFrequency::parse("bee\n"), DataError);
}

// ---------------------------------------------------------------------------
// G: grammar acceptors

using testing::grammar_route_cost;
using testing::sentence_unshadowed;

double fst_sentence_cost(const Wfst& g,
                         const std::vector<std::string>& words) {
  std::vector<int> ids;
  for (const std::string& w : words) {
    int id = g.isymbols.find(w);
    if (id < 0) return kInf;
    ids.push_back(id);
  }
  auto paths = shortest_path(compose(linear_acceptor(g.isymbols, ids), g), 1);
  return paths.empty() ? kInf : paths[0].total_weight.value;
}

ArpaLm five_word_bigram() {
  ArpaLm m(2);
  m.set({kSentenceBegin}, -99.0, -0.4);
  m.set({kSentenceEnd}, -0.6);
  m.set({"alpha"}, -0.7, -0.2);
  m.set({"bravo"}, -0.75, -0.15);
  m.set({"chip"}, -0.8, -0.1);
  m.set({"delta"}, -0.85);
  m.set({"echo"}, -0.9);
  m.set({kSentenceBegin, "alpha"}, -0.3);
  m.set({"alpha", "bravo"}, -0.45);
  m.set({"alpha", "chip"}, -0.6);
  m.set({"bravo", kSentenceEnd}, -0.5);
  m.set({"chip", kSentenceEnd}, -0.55);
  m.validate();
  return m;
}

TEST(GrammarFst, UnigramModelHasOneState) {
  ArpaLm lm = train_katz({{"a"}, {"b"}, {"a", "b"}}, 1, 0);
  Wfst g = build_grammar_fst(lm);
  EXPECT_EQ(g.num_states(), 1);
  EXPECT_EQ(g.start(), 0);
  EXPECT_TRUE(g.is_final(0));
  EXPECT_EQ(g.num_arcs(), 2u);  // a and b self-loops, no backoff arcs
  for (const Arc& arc : g.arcs(0)) {
    std::string w = g.isymbols.name(arc.ilabel);
    EXPECT_NEAR(arc.weight.value,
                -kLn10 * lm.find({w})->log10_prob, 1e-12);
  }
}

TEST(GrammarFst, HandBigramSentenceMatchesHandScore) {
  Wfst g = build_grammar_fst(five_word_bigram());
  // alpha bravo chip: -0.3 + -0.45 + (-0.15 + -0.8) + -0.55 in log10.
  EXPECT_NEAR(fst_sentence_cost(g, {"alpha", "bravo", "chip"}),
              2.25 * kLn10, 1e-9);
}

TEST(GrammarFst, UnseenBigramRoutesThroughBackoffArc) {
  ArpaLm lm = five_word_bigram();
  Wfst g = build_grammar_fst(lm);
  // delta after alpha is unseen: backoff(alpha) + unigram(delta); the
  // sentence then ends from the empty context.
  EXPECT_NEAR(fst_sentence_cost(g, {"alpha", "delta"}),
              -kLn10 * (-0.3 + (-0.2 + -0.85) + -0.6), 1e-9);
  EXPECT_NEAR(fst_sentence_cost(g, {"alpha", "delta"}),
              -kLn10 * lm_log_prob(lm, {"alpha", "delta"}), 1e-9);
}

TEST(GrammarFst, MarkersNeverLabelArcs) {
  Wfst g = build_grammar_fst(five_word_bigram());
  EXPECT_LT(g.isymbols.find(kSentenceBegin), 0);
  EXPECT_LT(g.isymbols.find(kSentenceEnd), 0);
}

// The graph must realize exactly the best route the backoff tables allow.
TEST(GrammarFst, PathWeightsMatchRouteOracle) {
  Rng rng(2026);
  std::vector<std::string> vocab;
  for (int i = 0; i < 6; ++i) vocab.push_back("w" + std::to_string(i));
  for (int order = 1; order <= 3; ++order) {
    for (int k : {0, 5}) {
      std::vector<std::vector<std::string>> corpus{vocab};
      for (int s = 0; s < 80; ++s) {
        std::vector<std::string> sent;
        std::size_t len = rng.index(7);
        for (std::size_t i = 0; i < len; ++i) {
          sent.push_back(vocab[std::min(rng.index(6), rng.index(6))]);
        }
        corpus.push_back(sent);
      }
      ArpaLm lm = train_katz(corpus, order, k);
      Wfst g = build_grammar_fst(lm);
      for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::string> sentence;
        std::size_t len = rng.index(5);
        for (std::size_t i = 0; i < len; ++i) {
          sentence.push_back(vocab[rng.index(6)]);
        }
        double fst = fst_sentence_cost(g, sentence);
        double oracle = grammar_route_cost(lm, sentence);
        ASSERT_TRUE(std::isfinite(fst)) << join(sentence, " ");
        EXPECT_NEAR(fst, oracle, 1e-9)
            << "order " << order << " k " << k << ": "
            << join(sentence, " ");
        // The epsilon encoding can only undercut the exact model score.
        EXPECT_LE(fst, -kLn10 * lm_log_prob(lm, sentence) + 1e-9);
      }
    }
  }
}

// On sentences where no backoff route shadows an explicit n-gram, the
// graph reproduces the exact model score.
TEST(GrammarFst, UnshadowedSentencesScoreExactly) {
  Rng rng(31);
  std::vector<std::string> vocab;
  for (int i = 0; i < 6; ++i) vocab.push_back("w" + std::to_string(i));
  std::vector<std::vector<std::string>> corpus{vocab};
  for (int s = 0; s < 80; ++s) {
    std::vector<std::string> sent;
    std::size_t len = rng.index(7);
    for (std::size_t i = 0; i < len; ++i) {
      sent.push_back(vocab[std::min(rng.index(6), rng.index(6))]);
    }
    corpus.push_back(sent);
  }
  int covered = 0;
  for (int order = 1; order <= 3; ++order) {
    ArpaLm lm = train_katz(corpus, order, 0);
    Wfst g = build_grammar_fst(lm);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<std::string> sentence;
      std::size_t len = rng.index(4);
      for (std::size_t i = 0; i < len; ++i) {
        sentence.push_back(vocab[rng.index(6)]);
      }
      if (!sentence_unshadowed(lm, sentence)) continue;
      EXPECT_NEAR(fst_sentence_cost(g, sentence),
                  -kLn10 * lm_log_prob(lm, sentence), 1e-9)
          << "order " << order << ": " << join(sentence, " ");
      ++covered;
    }
  }
  EXPECT_GE(covered, 20);
}

TEST(UnigramFst, WeightsAreSmoothedFrequencies) {
  VocabFrequency freq = VocabFrequency::parse("a 3\nb 1\n");
  Wfst g = build_unigram_fst(freq, 0.0);
  EXPECT_EQ(g.num_states(), 1);
  std::map<std::string, double> w;
  for (const Arc& arc : g.arcs(0)) {
    w[g.isymbols.name(arc.ilabel)] = arc.weight.value;
  }
  EXPECT_NEAR(w.at("a"), -std::log(0.75), 1e-12);
  EXPECT_NEAR(w.at("b"), -std::log(0.25), 1e-12);
}

TEST(UnigramFst, EqualCountsAreUniform) {
  VocabFrequency freq = VocabFrequency::parse("a 2\nb 2\nc 2\n");
  Wfst g = build_unigram_fst(freq, 1.5);
  for (const Arc& arc : g.arcs(0)) {
    EXPECT_NEAR(arc.weight.value, -std::log(1.0 / 3.0), 1e-12);
  }
}

TEST(UnigramFst, LargeSmoothingApproachesUniform) {
  VocabFrequency freq = VocabFrequency::parse("a 30\nb 1\n");
  Wfst g = build_unigram_fst(freq, 1e9);
  for (const Arc& arc : g.arcs(0)) {
    EXPECT_NEAR(arc.weight.value, -std::log(0.5), 1e-6);
  }
  EXPECT_THROW(build_unigram_fst(freq, -1.0), Error);
  EXPECT_THROW(build_unigram_fst(VocabFrequency{}, 0.0), Error);
}

// ---------------------------------------------------------------------------
// TLG composition

struct TlgToy {
  PhonemeAlphabet alphabet = PhonemeAlphabet::from_tokens({"b", "e"});
  Lexicon lex;
  Wfst t{Semiring::kTropical};
  Wfst l{Semiring::kTropical};
  Wfst g{Semiring::kTropical};
  Wfst tlg{Semiring::kTropical};

  TlgToy() {
    lex.add("bee", {0, 1, 1});
    lex.add("be", {0, 1});
    t = build_ctc_fst(alphabet);
    l = build_lexicon_fst(lex, alphabet);
    g = build_unigram_fst(VocabFrequency::parse("bee 3\nbe 1\n"), 0.0);
    tlg = compile_tlg(t, l, g);
  }
};

// Brute-force expected relation: collapse the frame string, segment it
// over the lexicon in every way, score each word string by the unigram
// weights, and keep the cheapest weight per (input, output) pair.
Relation expected_tlg_relation(const TlgToy& toy, std::size_t max_frames) {
  Relation rel;
  std::map<std::string, double> score{{"bee", -std::log(0.75)},
                                      {"be", -std::log(0.25)}};
  SymbolTable words = toy.lex.word_symbols();
  std::vector<int> frames;
  auto visit = [&](auto&& self, std::size_t remaining) -> void {
    // segment collapse(frames) over the two pronunciations
    std::vector<int> tokens = collapse(frames, toy.alphabet);
    std::vector<int> istring;
    for (int f : frames) istring.push_back(f + 1);
    std::vector<std::pair<std::vector<int>, double>> outs;
    std::vector<int> cur;
    auto segment = [&](auto&& seg, std::size_t at, double cost) -> void {
      if (at == tokens.size()) {
        outs.emplace_back(cur, cost);
        return;
      }
      for (const auto& entry : toy.lex.entries()) {
        for (const auto& pron : entry.prons) {
          if (at + pron.size() > tokens.size()) continue;
          if (!std::equal(pron.begin(), pron.end(), tokens.begin() + at)) {
            continue;
          }
          cur.push_back(words.find(entry.word));
          seg(seg, at + pron.size(), cost + score.at(entry.word));
          cur.pop_back();
        }
      }
    };
    segment(segment, 0, 0.0);
    for (const auto& [ostring, cost] : outs) {
      auto key = std::make_pair(istring, ostring);
      auto it = rel.find(key);
      if (it == rel.end() || cost < it->second) rel[key] = cost;
    }
    if (remaining == 0) return;
    for (int f = 0; f <= toy.alphabet.size(); ++f) {
      frames.push_back(f);
      self(self, remaining - 1);
      frames.pop_back();
    }
  };
  visit(visit, max_frames);
  return rel;
}

TEST(CompileTlg, ToyRelationMatchesManualComposition) {
  TlgToy toy;
  Relation expected = expected_tlg_relation(toy, 4);
  Relation actual = enumerate_relation(toy.tlg, 4);
  EXPECT_TRUE(relations_close(expected, actual, 1e-9));
  EXPECT_GT(actual.size(), 4u);
}

TEST(CompileTlg, PathWeightIsTheGrammarContribution) {
  TlgToy toy;
  auto paths = enumerate_paths(toy.tlg, 5);
  ASSERT_FALSE(paths.empty());
  std::map<int, double> score{
      {toy.tlg.osymbols.find("bee"), -std::log(0.75)},
      {toy.tlg.osymbols.find("be"), -std::log(0.25)}};
  for (const auto& [weight, ostring, istring] : paths) {
    double want = 0.0;
    for (int w : ostring) want += score.at(w);
    EXPECT_NEAR(weight, want, 1e-9);
  }
}

TEST(CompileTlg, RejectingGrammarYieldsEmptyGraph) {
  TlgToy toy;
  ArpaLm no_end(1);
  no_end.set({"bee"}, -0.1);
  Wfst g = build_grammar_fst(no_end);
  Wfst tlg = compile_tlg(toy.t, toy.l, g);
  EXPECT_EQ(tlg.num_states(), 0);
  EXPECT_EQ(tlg.start(), kNoState);
}

// Growing the vocabulary makes new phoneme strings decodable and keeps
// every previously accepted pair.
TEST(CompileTlg, VocabularyExtensionPreservesAcceptedPairs) {
  PhonemeAlphabet a = PhonemeAlphabet::from_tokens({"b", "e", "f"});
  Wfst t = build_ctc_fst(a);

  Lexicon lex1;
  lex1.add("bee", token_ids(a, "b e e"));
  Lexicon lex2 = lex1;
  lex2.add("fee", token_ids(a, "f e e"));

  Wfst tlg1 = compile_tlg(t, build_lexicon_fst(lex1, a),
                          build_unigram_fst(
                              VocabFrequency::parse("bee 1\n"), 0.5));
  Wfst tlg2 = compile_tlg(t, build_lexicon_fst(lex2, a),
                          build_unigram_fst(
                              VocabFrequency::parse("bee 1\nfee 1\n"), 0.5));

  std::vector<int> fee = frame_ids(a, "f e ␣ e");
  EXPECT_TRUE(enumerate_paths(
                  compose(linear_acceptor(tlg1.isymbols, fee), tlg1), 6)
                  .empty());
  auto decoded = enumerate_paths(
      compose(linear_acceptor(tlg2.isymbols, fee), tlg2), 6);
  ASSERT_EQ(decoded.size(), 1u);
  EXPECT_EQ(std::get<1>(decoded[0]),
            (std::vector<int>{tlg2.osymbols.find("fee")}));

  Relation before = enumerate_relation(tlg1, 4);
  Relation after = enumerate_relation(tlg2, 4);
  EXPECT_FALSE(before.empty());
  for (const auto& [key, weight] : before) {
    EXPECT_TRUE(after.count(key))
        << "pair lost after extension";
  }
}

TEST(CompileTlg, HarmonizesIndependentWordTables) {
  TlgToy toy;
  // A grammar over the same words built with its own table ordering still
  // composes; a word the lexicon cannot spell is dropped, not fatal.
  ArpaLm lm = train_katz({{"be"}, {"bee", "be"}, {"zig"}}, 1, 0);
  Wfst g = build_grammar_fst(lm);
  Wfst tlg = compile_tlg(toy.t, toy.l, g);
  EXPECT_GT(tlg.num_states(), 0);
  std::vector<int> bee = frame_ids(toy.alphabet, "b e ␣ e");
  auto paths = enumerate_paths(
      compose(linear_acceptor(tlg.isymbols, bee), tlg), 6);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(std::get<1>(paths[0]),
            (std::vector<int>{toy.l.osymbols.find("bee")}));
}

}  // namespace
}  // namespace phonlat
