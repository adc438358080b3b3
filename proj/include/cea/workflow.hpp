#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cea/config.hpp"
#include "cea/corpus.hpp"
#include "cea/embeddings.hpp"
#include "cea/model_io.hpp"
#include "cea/pipeline.hpp"

namespace cea {

struct TrainReport {
  double svm_val_f1 = -1.0;
  int svm_best_epoch = -1;
  double cei_val_f1 = -1.0;
  int cei_best_epoch = -1;
  std::vector<double> cei_epoch_loss;
  std::size_t cei_train_examples = 0;
  std::size_t unalignable_gold_spans = 0;  // messages dropped from CEI training
};

// Trains the full bundle: POS tagger (from gold tags in the training
// corpus), CP feature space + linear SVM, and the CEI network. Both models
// keep the epoch with the best validation weighted F1. The returned model is
// finalized (parameters snapped to file precision).
PipelineModel train_pipeline(const RunConfig& config, Corpus train, Corpus validation,
                             const EmbeddingTable& embeddings,
                             const ConnectiveLexicon& lexicon,
                             const SentimentLexicon& sentiment, TrainReport* report = nullptr);

// Tokenizes (if needed) and tags a message with the model's tagger;
// externally supplied tags pass through.
void prepare_message(Message& message, const PosTagger& tagger);

// One JSONL line in, one annotated JSONL line out ("causality",
// "arguments", "explanations", plus computed tokens). Input fields are
// preserved.
std::string predict_line(const std::string& line, std::size_t lineno, PipelineModel& model,
                         PipelineMode mode);

// Adds the "arguments" field only (CLI `segment`).
std::string segment_line(const std::string& line, std::size_t lineno,
                         const PosTagger* tagger, const ConnectiveLexicon& lexicon);

// Streaming map over JSONL lines with ordered output. `threads` <= 1 runs
// inline; otherwise lines are processed in parallel batches.
void process_jsonl_stream(std::istream& in, std::ostream& out, int threads,
                          const std::function<std::string(const std::string&, std::size_t)>& fn);

// CAUSE_PIPELINE_THREADS, default 1.
int pipeline_threads_from_env();

// CP and CEI predictions for an already prepared (tagged) corpus; used by
// the eval paths and the acceptance suite.
struct CorpusPredictions {
  std::vector<int> cp_pred, cp_gold;          // per message with gold causality
  std::vector<int> cei_pred, cei_gold;        // per argument, causal messages only
  std::vector<int> pipe_pred, pipe_gold;      // per argument, all messages
};
CorpusPredictions predict_corpus(const Corpus& corpus, PipelineModel& model,
                                 PipelineMode mode);

// A `predict` output line: the message plus its predicted annotations.
struct PredRecord {
  Message message;
  bool causality = false;
  std::vector<DiscourseArgument> args;
  std::vector<bool> explanations;
};

std::map<std::string, PredRecord> load_predictions(const std::string& path);

// (pred, gold) label vectors for `eval` / `mcnemar`. Task "cp" compares
// message-level causality; "cei" compares per-argument labels on gold-causal
// messages; "pipeline" compares per-argument labels on every message.
std::pair<std::vector<int>, std::vector<int>> labels_for_task(
    const Corpus& gold, const std::map<std::string, PredRecord>& preds,
    const std::string& task);

}  // namespace cea
