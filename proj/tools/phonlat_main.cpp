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
// Command-line pipelines over the header library.  Every command writes
// outputs atomically, takes all randomness from explicit seeds, and maps
// failures to exit codes: 0 success, 1 usage, 2 data error.  Flags beat
// PHONLAT_* environment variables, which beat defaults.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "phonlat/alphabet.hpp"
#include "phonlat/arpa.hpp"
#include "phonlat/decode.hpp"
#include "phonlat/error.hpp"
#include "phonlat/graphs.hpp"
#include "phonlat/homophone.hpp"
#include "phonlat/katz.hpp"
#include "phonlat/lexicon.hpp"
#include "phonlat/metrics.hpp"
#include "phonlat/posteriors.hpp"
#include "phonlat/simulate.hpp"
#include "phonlat/util.hpp"

namespace phonlat {
namespace {

constexpr const char* kVersion = "phonlat 0.1.0";

std::string file_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

// The graph's input symbols are epsilon, the phoneme tokens, then the
// blank, so the alphabet that produced it can be read back out.
PhonemeAlphabet alphabet_from_graph(const Wfst& graph) {
  int n = graph.isymbols.size();
  if (n < 3 || graph.isymbols.name(n - 1) != kBlankGlyph) {
    throw Error("decoding graph input symbols do not end with the blank");
  }
  std::vector<std::string> tokens;
  for (int id = 1; id < n - 1; ++id) tokens.push_back(graph.isymbols.name(id));
  return PhonemeAlphabet::from_tokens(std::move(tokens));
}

PosteriorSequence load_posteriors(const std::string& path,
                                  const PhonemeAlphabet& alphabet) {
  std::string bytes = read_file(path);
  if (bytes.compare(0, sizeof(kPosteriorMagic), kPosteriorMagic,
                    sizeof(kPosteriorMagic)) == 0) {
    return PosteriorSequence::from_binary(bytes, alphabet, path);
  }
  return PosteriorSequence::from_text(bytes, alphabet, path);
}

// Hypothesis files from `decode` carry a cost column and, for n-best, a
// rank column after the id; scoring keeps the rank-1 token text.  A value
// of nullopt drops the line (a non-primary n-best entry).
std::optional<std::string> strip_decode_columns(const std::string& rest) {
  std::size_t tab1 = rest.find('\t');
  if (tab1 == std::string::npos) return rest;
  std::string first = rest.substr(0, tab1);
  std::string tail = rest.substr(tab1 + 1);
  std::size_t tab2 = tail.find('\t');
  if (tab2 != std::string::npos) {
    auto rank = parse_int(first);
    if (rank && parse_double(tail.substr(0, tab2))) {
      if (*rank != 1) return std::nullopt;
      return tail.substr(tab2 + 1);
    }
  }
  if (parse_double(first)) return tail;
  return rest;
}

struct BuildLexiconArgs {
  std::string lexicon_file;
  std::string alphabet_file;
  std::string out;
  std::string silence;
};

void cmd_build_lexicon(const BuildLexiconArgs& a) {
  PhonemeAlphabet alphabet = PhonemeAlphabet::load(a.alphabet_file);
  Lexicon lex = Lexicon::load(a.lexicon_file, alphabet);
  std::optional<int> silence;
  if (!a.silence.empty()) {
    int id = alphabet.find(a.silence);
    if (id < 0) throw Error("silence token not in alphabet: '" + a.silence + "'");
    silence = id;
  }
  build_lexicon_fst(lex, alphabet, silence).save(a.out);
}

struct TrainLmArgs {
  std::string corpus_file;
  std::string out;
  int order = 2;
  int k = 5;
};

void cmd_train_lm(const TrainLmArgs& a) {
  std::vector<std::vector<std::string>> corpus;
  for (const std::string& line : split_lines(read_file(a.corpus_file))) {
    std::vector<std::string> sentence = split_fields(line);
    if (!sentence.empty()) corpus.push_back(std::move(sentence));
  }
  save_arpa(train_katz(corpus, a.order, a.k), a.out);
}

struct BuildGrammarArgs {
  std::string model_file;
  std::string out;
  bool unigram = false;
  double smoothing = 0.0;
};

void cmd_build_grammar(const BuildGrammarArgs& a) {
  Wfst g = a.unigram
               ? build_unigram_fst(VocabFrequency::load(a.model_file),
                                   a.smoothing)
               : build_grammar_fst(load_arpa(a.model_file));
  g.save(a.out);
}

struct CompileTlgArgs {
  std::string alphabet_file;
  std::string lexicon_fst;
  std::string grammar_fst;
  std::string out;
};

void cmd_compile_tlg(const CompileTlgArgs& a) {
  PhonemeAlphabet alphabet = PhonemeAlphabet::load(a.alphabet_file);
  Wfst l = Wfst::load(a.lexicon_fst);
  Wfst g = Wfst::load(a.grammar_fst);
  compile_tlg(build_ctc_fst(alphabet), l, g).save(a.out);
}

struct DecodeArgs {
  std::string tlg_file;
  std::vector<std::string> posterior_files;
  std::string out;
  DecodeConfig cfg;
  int parallel = 1;
};

void cmd_decode(const DecodeArgs& a) {
  Wfst tlg = Wfst::load(a.tlg_file);
  PhonemeAlphabet alphabet = alphabet_from_graph(tlg);
  std::vector<Utterance> utts;
  std::set<std::string> ids;
  for (const std::string& path : a.posterior_files) {
    std::string id = file_stem(path);
    if (!ids.insert(id).second) {
      throw Error("duplicate utterance id '" + id + "' from " + path);
    }
    utts.push_back(Utterance{std::move(id), load_posteriors(path, alphabet)});
  }
  std::vector<UtteranceResult> results =
      decode_batch(utts, tlg, a.cfg, a.parallel);
  std::string out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const UtteranceResult& r = results[i];
    if (!r.ok()) {
      throw DataError(a.posterior_files[i] + ": " + r.error);
    }
    if (r.nbest.empty()) {
      Hypothesis none;
      none.cost = kInfinity;
      out += format_decode_line(r.id, none, tlg.osymbols) + "\n";
    } else if (a.cfg.nbest == 1) {
      out += format_decode_line(r.id, r.nbest[0], tlg.osymbols) + "\n";
    } else {
      for (std::size_t rank = 0; rank < r.nbest.size(); ++rank) {
        out += format_nbest_line(r.id, static_cast<int>(rank) + 1,
                                 r.nbest[rank], tlg.osymbols) + "\n";
      }
    }
  }
  atomic_write_file(a.out, out);
}

// Hypothesis lines: plain `id<TAB>tokens`, decode's `id<TAB>cost<TAB>tokens`,
// or n-best `id<TAB>rank<TAB>cost<TAB>tokens` where ids repeat per rank and
// only rank 1 is kept.
std::map<std::string, std::string> read_hypotheses(const std::string& text,
                                                   const std::string& filename) {
  std::map<std::string, std::string> hyps;
  std::vector<std::string> lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    std::size_t tab = lines[ln].find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(filename, ln + 1, "expected 'utt_id<TAB>tokens'");
    }
    std::string id = lines[ln].substr(0, tab);
    std::optional<std::string> tokens =
        strip_decode_columns(lines[ln].substr(tab + 1));
    if (!tokens) continue;
    if (!hyps.emplace(std::move(id), *tokens).second) {
      throw DataError(filename, ln + 1,
                      "duplicate hypothesis for utterance '" +
                          lines[ln].substr(0, tab) + "'");
    }
  }
  return hyps;
}

struct ScoreArgs {
  std::string refs_file;
  std::string hyps_file;
  std::string unit = "word";
  std::string csv;
  int bootstrap = 0;
  std::uint64_t seed = 0;
};

void cmd_score(const ScoreArgs& a) {
  auto tokenize = [&a](const std::string& text) {
    return a.unit == "char" ? char_tokens(text) : word_tokens(text);
  };
  const char* label = a.unit == "char"      ? "CER"
                      : a.unit == "phoneme" ? "PER"
                                            : "WER";

  auto refs = parse_transcript(read_file(a.refs_file), a.refs_file);
  std::map<std::string, std::string> hyps =
      read_hypotheses(read_file(a.hyps_file), a.hyps_file);

  std::vector<SequencePair> pairs;
  std::vector<AlignmentTrace> traces;
  for (const auto& [id, text] : refs) {
    auto it = hyps.find(id);
    if (it == hyps.end()) {
      throw DataError(a.hyps_file + ": missing hypothesis for utterance '" +
                      id + "'");
    }
    pairs.push_back({tokenize(text), tokenize(it->second)});
    traces.push_back(edit_distance(pairs.back().ref, pairs.back().hyp).trace);
    hyps.erase(it);
  }
  if (!hyps.empty()) {
    throw DataError(a.hyps_file + ": hypothesis for unknown utterance '" +
                    hyps.begin()->first + "'");
  }

  ErrorReport report = error_rate(pairs);
  if (a.bootstrap > 0) {
    report.standard_error = bootstrap_se(pairs, a.bootstrap, a.seed);
  }

  std::printf("%s %.2f%% over %zu utterances (%lld edits / %lld reference tokens)\n",
              label, 100.0 * report.rate, pairs.size(),
              static_cast<long long>(report.total_edits),
              static_cast<long long>(report.total_ref_len));
  std::printf("unit=%s\n", a.unit.c_str());
  std::printf("utterances=%zu\n", pairs.size());
  std::printf("total_edits=%lld\n", static_cast<long long>(report.total_edits));
  std::printf("total_ref_len=%lld\n",
              static_cast<long long>(report.total_ref_len));
  std::printf("rate=%.6f\n", report.rate);
  std::printf("standard_error=%.6f\n", report.standard_error);

  if (!a.csv.empty()) {
    std::set<std::string> universe;
    for (const SequencePair& p : pairs) {
      universe.insert(p.ref.begin(), p.ref.end());
      universe.insert(p.hyp.begin(), p.hyp.end());
    }
    std::vector<std::string> tokens(universe.begin(), universe.end());
    atomic_write_file(a.csv, confusion_counts(traces, tokens).to_csv());
  }
}

void cmd_demo_homophone(const std::vector<std::string>& words) {
  auto [model, scored] = homophone_mle(words);
  for (const ScoredString& s : scored) {
    std::printf("%s\t%.9f\n", s.text.c_str(), s.prob);
  }
}

struct SimulateArgs {
  std::string alphabet_file;
  std::string tokens;
  std::string out;
  SimulationConfig cfg;
  bool binary = false;
};

void cmd_simulate(const SimulateArgs& a) {
  PhonemeAlphabet alphabet = PhonemeAlphabet::load(a.alphabet_file);
  PosteriorSequence p =
      simulate_posteriors(split_fields(a.tokens), alphabet, a.cfg);
  atomic_write_file(a.out, a.binary ? p.to_binary() : p.to_text());
}

int run(int argc, char** argv) {
  CLI::App app{"phoneme-lattice decoding pipelines"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  BuildLexiconArgs bl;
  CLI::App* c = app.add_subcommand(
      "build-lexicon", "Compile a pronunciation lexicon into an L FST");
  c->set_version_flag("--version", kVersion);
  c->add_option("lexicon", bl.lexicon_file, "word<TAB>phonemes file")
      ->required();
  c->add_option("alphabet", bl.alphabet_file, "one phoneme token per line")
      ->required();
  c->add_option("--out", bl.out, "output FST path")->required();
  c->add_option("--silence", bl.silence,
                "alphabet token allowed to loop at word boundaries");
  c->callback([&bl] { cmd_build_lexicon(bl); });

  TrainLmArgs tl;
  c = app.add_subcommand("train-lm",
                         "Train a Katz backoff n-gram model to ARPA format");
  c->set_version_flag("--version", kVersion);
  c->add_option("corpus", tl.corpus_file, "one sentence per line")->required();
  c->add_option("--order", tl.order, "model order")->envname("PHONLAT_ORDER");
  c->add_option("--k", tl.k, "Good-Turing discounting threshold");
  c->add_option("--out", tl.out, "output ARPA path")->required();
  c->callback([&tl] { cmd_train_lm(tl); });

  BuildGrammarArgs bg;
  c = app.add_subcommand("build-grammar",
                         "Build a G FST from an ARPA model or, with "
                         "--unigram, a word-frequency table");
  c->set_version_flag("--version", kVersion);
  c->add_option("model", bg.model_file, "ARPA file, or 'word count' lines")
      ->required();
  c->add_flag("--unigram", bg.unigram, "treat input as a frequency table");
  c->add_option("--smoothing", bg.smoothing,
                "additive smoothing for --unigram");
  c->add_option("--out", bg.out, "output FST path")->required();
  c->callback([&bg] { cmd_build_grammar(bg); });

  CompileTlgArgs ct;
  c = app.add_subcommand("compile-tlg",
                         "Compose the CTC, lexicon, and grammar FSTs");
  c->set_version_flag("--version", kVersion);
  c->add_option("alphabet", ct.alphabet_file, "one phoneme token per line")
      ->required();
  c->add_option("lexicon_fst", ct.lexicon_fst, "L FST path")->required();
  c->add_option("grammar_fst", ct.grammar_fst, "G FST path")->required();
  c->add_option("--out", ct.out, "output TLG path")->required();
  c->callback([&ct] { cmd_compile_tlg(ct); });

  DecodeArgs dc;
  c = app.add_subcommand("decode",
                         "Beam-search posterior files through a TLG graph");
  c->set_version_flag("--version", kVersion);
  c->add_option("tlg", dc.tlg_file, "TLG graph path")->required();
  c->add_option("posteriors", dc.posterior_files,
                "posterior files; the file stem is the utterance id")
      ->required();
  c->add_option("--beam", dc.cfg.beam_width, "beam width")
      ->envname("PHONLAT_BEAM");
  c->add_option("--acoustic-scale", dc.cfg.acoustic_scale,
                "acoustic log-likelihood scale")
      ->envname("PHONLAT_ACOUSTIC_SCALE");
  c->add_option("--wip", dc.cfg.word_insertion_penalty,
                "word insertion penalty")
      ->envname("PHONLAT_WIP");
  c->add_option("--nbest", dc.cfg.nbest, "hypotheses per utterance")
      ->envname("PHONLAT_NBEST");
  c->add_option("--parallel", dc.parallel, "worker threads")
      ->envname("PHONLAT_PARALLEL");
  c->add_option("--out", dc.out, "hypothesis file path")->required();
  c->callback([&dc] { cmd_decode(dc); });

  ScoreArgs sc;
  c = app.add_subcommand(
      "score", "Pooled error rate of hypotheses against references; "
               "leading rank/cost columns from decode are skipped");
  c->set_version_flag("--version", kVersion);
  c->add_option("refs", sc.refs_file, "utt_id<TAB>tokens reference file")
      ->required();
  c->add_option("hyps", sc.hyps_file, "hypothesis file")->required();
  c->add_option("--unit", sc.unit, "word, char, or phoneme")
      ->check(CLI::IsMember({"word", "char", "phoneme"}));
  c->add_option("--bootstrap", sc.bootstrap,
                "bootstrap resamples for the standard error (0 = skip)")
      ->envname("PHONLAT_BOOTSTRAP");
  c->add_option("--seed", sc.seed, "bootstrap seed")->envname("PHONLAT_SEED");
  c->add_option("--csv", sc.csv, "also write a confusion-summary CSV here");
  c->callback([&sc] { cmd_score(sc); });

  std::vector<std::string> demo_words;
  c = app.add_subcommand("demo-homophone",
                         "Positionwise distribution over a homophone set");
  c->set_version_flag("--version", kVersion);
  c->add_option("words", demo_words, "equal-length words")->required();
  c->callback([&demo_words] { cmd_demo_homophone(demo_words); });

  SimulateArgs sm;
  c = app.add_subcommand(
      "simulate", "Generate synthetic posteriors for a token sequence");
  c->set_version_flag("--version", kVersion);
  c->add_option("alphabet", sm.alphabet_file, "one phoneme token per line")
      ->required();
  c->add_option("--tokens", sm.tokens, "space-separated phoneme tokens")
      ->required();
  c->add_option("--frames-per-token", sm.cfg.frames_per_token,
                "frames per token");
  c->add_option("--blank-fraction", sm.cfg.blank_fraction,
                "blank probability at unequal token boundaries");
  c->add_option("--temperature", sm.cfg.noise_temperature,
                "softmax-flattening noise temperature");
  c->add_option("--seed", sm.cfg.seed, "noise seed")->envname("PHONLAT_SEED");
  c->add_flag("--binary", sm.binary, "write the binary posterior format");
  c->add_option("--out", sm.out, "output posterior path")->required();
  c->callback([&sm] { cmd_simulate(sm); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace phonlat

int main(int argc, char** argv) { return phonlat::run(argc, argv); }
