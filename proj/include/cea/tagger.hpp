#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cea/corpus.hpp"

namespace cea {

// Greedy left-to-right averaged perceptron over the coarse Twitter tagset.
// A handful of token shapes are tagged by rule regardless of the model:
// emoticons/emoji -> E, pure punctuation -> ",", URLs -> U, @-mentions -> @,
// hashtags -> #. These rules also apply on top of externally supplied tags
// so the downstream segmenter can rely on them.
class PosTagger {
 public:
  PosTagger() = default;

  // Weight per (feature string, tag index). After train() these hold the
  // averaged weights.
  using WeightMap = std::map<std::string, std::vector<double>>;

  bool trained() const { return averaged_; }
  const WeightMap& weights() const { return weights_; }
  void set_weights(WeightMap w, bool averaged);

  // Tags in place. Tokens that already carry a pos keep it verbatim except
  // where a shape rule applies. Throws "no tag source" when an untagged
  // token is met and the model is untrained.
  void tag(Message& message) const;

  std::vector<std::string> predict(const std::vector<Token>& tokens) const;

  // Averaged perceptron training: every token of the corpus must carry a
  // gold pos. Deterministic for a fixed (corpus, epochs, seed).
  void train(const Corpus& corpus, int epochs, std::uint64_t seed);

 private:
  WeightMap weights_;
  bool averaged_ = false;
};

// Shape-rule tag for a token text, or "" when the model must decide.
std::string forced_tag(const std::string& token_text);

// [OP]-shaped conveniences.
std::vector<Token> tag_pos(std::vector<Token> tokens, const PosTagger& tagger);
PosTagger train_tagger(const Corpus& tagged_corpus, int epochs, std::uint64_t seed);

}  // namespace cea
