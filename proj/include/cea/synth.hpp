#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cea/corpus.hpp"

namespace cea {

// Seeded synthetic corpus for end-to-end checks and demos. Causality is
// signaled by connective templates ("X because Y.", "Because Y, X." and
// informal variants); non-causal messages use plain clauses, "and"/"but"
// coordination and emoji noise. Gold explanation spans cover the connective
// clause. Tokens come pre-tagged, so the corpus can also train the tagger.
struct SynthOptions {
  std::size_t n_messages = 2000;
  std::uint64_t seed = 13;
  double causal_fraction = 0.5;
  std::size_t n_users = 40;
  bool keep_tags = true;  // false strips gold POS tags (tagger stress mode)
};

Corpus synth_corpus(const SynthOptions& options);

// train/validation/test split by fractions of the message list (the corpus
// is already generated in random order).
void split_corpus(const Corpus& corpus, double train_frac, double val_frac,
                  Corpus& train, Corpus& validation, Corpus& test);

// Every word the generator can emit (embedding vocabulary).
std::vector<std::string> synth_vocabulary();

// GloVe-format random embeddings over the synthetic vocabulary. A couple of
// filler words are left out on purpose so the OOV path gets exercised.
void write_synth_embeddings(const std::string& path, int dim, std::uint64_t seed);

}  // namespace cea
