#pragma once

#include <vector>

#include "cea/corpus.hpp"
#include "cea/features.hpp"
#include "cea/linsvm.hpp"
#include "cea/metrics.hpp"
#include "cea/neural.hpp"
#include "cea/segmenter.hpp"
#include "cea/tagger.hpp"

namespace cea {

// Per-argument gold labels for explanation identification: the argument
// with the largest byte overlap with the annotated span is the one positive
// argument (ties go to the earliest).
struct CeiGold {
  std::vector<bool> labels;
  int chosen_argument = -1;
};

CeiGold derive_cei_gold(const Message& message, const std::vector<DiscourseArgument>& args);

enum class PipelineMode { two_stage, cei_only };

std::string to_string(PipelineMode m);
PipelineMode pipeline_mode_from_string(const std::string& s);

struct PipelineResult {
  bool causality = false;
  double cp_margin = 0.0;
  bool cei_invoked = false;
  std::vector<DiscourseArgument> args;
  std::vector<bool> explanations;  // aligned with args
};

// CP -> CEI composition over a tokenized, tagged message. In two_stage mode
// a non-causal CP verdict short-circuits CEI and every argument comes back
// false; in cei_only mode CEI runs unconditionally.
PipelineResult run_pipeline(const Message& message, const ConnectiveLexicon& lexicon,
                            const SentimentLexicon& sentiment, const LinearModel& cp,
                            NeuralModel& cei, PipelineMode mode);

}  // namespace cea
