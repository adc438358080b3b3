#pragma once

#include <cstdint>
#include <string>

#include "cea/neural.hpp"
#include "cea/pipeline.hpp"

namespace cea {

enum class CeiTrainingMode { causal_only, all };

std::string to_string(CeiTrainingMode m);
CeiTrainingMode cei_training_mode_from_string(const std::string& s);
std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

// Every knob of a training run; defaults match the documented pipeline.
struct RunConfig {
  std::uint64_t seed = 13;
  int hidden_dim = 0;        // 0 -> embedding dimension
  double dropout_p = 0.3;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 0.001;
  int epochs = 30;           // neural epochs (upper bound, early stopping applies)
  int patience = 5;
  int svm_epochs = 50;
  double svm_lambda = 1e-4;
  int tagger_epochs = 5;
  double alpha_fwe = 60.0;   // family-wise error rate for feature selection
  long min_doc_count = 2;    // word-pair frequency filter
  Variant cei_variant = Variant::full;
  CeiTrainingMode cei_training_mode = CeiTrainingMode::causal_only;
  PipelineMode pipeline_mode = PipelineMode::two_stage;
};

// "key = value" config file, one entry per line, '#' comments. Unknown keys
// are an error; flags given on the command line win over file values.
RunConfig load_run_config(const std::string& path, RunConfig base = {});

}  // namespace cea
