#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "cea/config.hpp"
#include "cea/embeddings.hpp"
#include "cea/features.hpp"
#include "cea/linsvm.hpp"
#include "cea/neural.hpp"
#include "cea/segmenter.hpp"
#include "cea/tagger.hpp"

namespace cea {

// Everything a trained pipeline needs at prediction time, persisted as one
// file: a JSON manifest (format version, tagger weights, lexicons, feature
// space, SVM scalars, network shape, embedding fingerprint) followed by
// length-prefixed little-endian float32 arrays holding the SVM weight vector
// and the network parameters.
//
// Embeddings are not stored; the file records their fingerprint + dimension
// and load_model() refuses a table that does not match.
struct PipelineModel {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  PosTagger tagger;
  ConnectiveLexicon lexicon;
  SentimentLexicon sentiment;
  LinearModel cp;  // cp.feature_space is the pipeline's feature space
  std::unique_ptr<NeuralModel> cei;
  std::uint64_t embedding_fingerprint = 0;
  int embedding_dim = 0;
  RunConfig config;  // echo of the training configuration

  const FeatureSpace& feature_space() const { return cp.feature_space; }

  // Snaps float-array-stored parameters (SVM weights, network weights) to
  // float32 so that a saved-then-loaded model is parameter-identical to the
  // in-memory one. Called once when training finishes.
  void finalize();
};

struct ModelInfo {
  int format_version = 0;
  int embedding_dim = 0;
  std::uint64_t embedding_fingerprint = 0;
};

void save_model(const PipelineModel& model, const std::string& path);

// Manifest-only read (to know which embeddings to load).
ModelInfo read_model_info(const std::string& path);

// Manifest-only read of the tagger and connective lexicon; enough for
// `segment`, which does not need the networks or embeddings.
std::pair<PosTagger, ConnectiveLexicon> load_tagger_and_lexicon(const std::string& path);

PipelineModel load_model(const std::string& path, const EmbeddingTable& embeddings);

}  // namespace cea
