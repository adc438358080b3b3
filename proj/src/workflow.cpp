#include "cea/workflow.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "cea/text.hpp"

namespace cea {

using json = nlohmann::ordered_json;

void prepare_message(Message& message, const PosTagger& tagger) {
  if (message.tokens.empty() && !message.raw_text.empty())
    message.tokens = tokenize(message.raw_text);
  tagger.tag(message);
}

namespace {

bool fully_tagged(const Message& m) {
  for (const auto& t : m.tokens)
    if (!t.tagged()) return false;
  return !m.tokens.empty();
}

PosTagger train_tagger_for(const Corpus& train, const RunConfig& config) {
  Corpus tagged;
  for (const auto& m : train.messages)
    if (fully_tagged(m)) tagged.messages.push_back(m);
  if (tagged.messages.empty()) {
    // only acceptable when nothing will ever need the model
    for (const auto& m : train.messages)
      for (const auto& t : m.tokens)
        if (!t.tagged() && forced_tag(t.text).empty())
          throw std::runtime_error("no tag source");
    return PosTagger();
  }
  PosTagger tagger;
  tagger.train(tagged, config.tagger_epochs, config.seed);
  return tagger;
}

struct CeiData {
  std::vector<NeuralExample> examples;
  std::size_t unalignable = 0;
};

CeiData build_cei_examples(const Corpus& corpus,
                           const std::vector<std::vector<DiscourseArgument>>& args,
                           CeiTrainingMode mode) {
  CeiData data;
  for (std::size_t i = 0; i < corpus.messages.size(); ++i) {
    const Message& m = corpus.messages[i];
    if (args[i].empty()) continue;
    NeuralExample ex;
    ex.message = &m;
    ex.args = args[i];
    const bool causal = m.gold_causality && *m.gold_causality;
    if (causal && m.gold_explanation_span) {
      try {
        const CeiGold gold = derive_cei_gold(m, args[i]);
        ex.cei_gold.reserve(gold.labels.size());
        for (const bool b : gold.labels) ex.cei_gold.push_back(b ? 1 : 0);
      } catch (const std::runtime_error&) {
        ++data.unalignable;
        continue;
      }
    } else if (!causal && mode == CeiTrainingMode::all) {
      ex.cei_gold.assign(args[i].size(), 0);
    } else {
      continue;  // causal without a usable span, or causal_only mode
    }
    data.examples.push_back(std::move(ex));
  }
  return data;
}

}  // namespace

PipelineModel train_pipeline(const RunConfig& config, Corpus train, Corpus validation,
                             const EmbeddingTable& embeddings,
                             const ConnectiveLexicon& lexicon,
                             const SentimentLexicon& sentiment, TrainReport* report) {
  if (train.messages.empty()) throw std::invalid_argument("empty training corpus");

  for (auto& m : train.messages)
    if (m.tokens.empty() && !m.raw_text.empty()) m.tokens = tokenize(m.raw_text);
  PosTagger tagger = train_tagger_for(train, config);
  for (auto& m : train.messages) prepare_message(m, tagger);
  for (auto& m : validation.messages) prepare_message(m, tagger);

  auto segment_all = [&](const Corpus& corpus) {
    std::vector<std::vector<DiscourseArgument>> out;
    out.reserve(corpus.messages.size());
    for (const auto& m : corpus.messages) out.push_back(segment(m, lexicon));
    return out;
  };
  const auto train_args = segment_all(train);
  const auto val_args = segment_all(validation);

  // ---- CP: features, selection, SVM
  std::vector<FeatureVector> X;
  std::vector<bool> y;
  for (std::size_t i = 0; i < train.messages.size(); ++i) {
    const Message& m = train.messages[i];
    if (!m.gold_causality)
      throw std::runtime_error("message '" + m.id + "' lacks a causality label");
    X.push_back(extract_message_features(m, train_args[i], sentiment));
    y.push_back(*m.gold_causality);
  }
  FeatureSpace space = fit_feature_space(X);
  filter_low_frequency(space, "wp", config.min_doc_count);
  select_univariate(space, X, y, config.alpha_fwe);

  std::vector<FeatureVector> val_X;
  std::vector<int> val_y;
  for (std::size_t i = 0; i < validation.messages.size(); ++i) {
    const Message& m = validation.messages[i];
    if (!m.gold_causality)
      throw std::runtime_error("message '" + m.id + "' lacks a causality label");
    val_X.push_back(extract_message_features(m, val_args[i], sentiment));
    val_y.push_back(*m.gold_causality ? 1 : 0);
  }

  SvmTrainOptions svm_options;
  svm_options.lambda = config.svm_lambda;
  svm_options.epochs = config.svm_epochs;
  svm_options.seed = config.seed;

  std::vector<double> best_weights;
  double best_bias = 0.0, best_f1 = -1.0;
  int best_epoch = -1;
  auto select_epoch = [&](int epoch, const LinearModel& candidate) {
    if (val_X.empty()) return;
    std::vector<int> preds;
    preds.reserve(val_X.size());
    for (const auto& x : val_X) preds.push_back(candidate.predict(x).first ? 1 : 0);
    const double f1 = evaluate(preds, val_y).weighted_f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best_epoch = epoch;
      best_weights = candidate.weights;
      best_bias = candidate.bias;
    }
  };
  LinearModel cp = train_svm(X, y, space, svm_options, select_epoch);
  if (!best_weights.empty()) {
    cp.weights = std::move(best_weights);
    cp.bias = best_bias;
  }

  // ---- CEI: derived gold labels, hierarchical LSTM
  const CeiData cei_train = build_cei_examples(train, train_args, config.cei_training_mode);
  const CeiData cei_val =
      build_cei_examples(validation, val_args, CeiTrainingMode::causal_only);
  if (cei_train.examples.empty())
    throw std::runtime_error("no usable CEI training messages (need causality messages "
                             "with explanation spans)");

  auto cei = std::make_unique<NeuralModel>(Task::cei, config.cei_variant, &embeddings,
                                           config.hidden_dim, config.dropout_p, config.seed);
  TrainConfig tc;
  tc.optimizer = config.optimizer;
  tc.learning_rate = config.learning_rate;
  tc.epochs = config.epochs;
  tc.seed = config.seed;
  tc.hidden_dim = config.hidden_dim;
  tc.dropout_p = config.dropout_p;
  tc.patience = config.patience;
  const TrainResult cei_result =
      train_neural(*cei, cei_train.examples,
                   cei_val.examples.empty() ? nullptr : &cei_val.examples, tc);

  PipelineModel model;
  model.tagger = std::move(tagger);
  model.lexicon = lexicon;
  model.sentiment = sentiment;
  model.cp = std::move(cp);
  model.cei = std::move(cei);
  model.embedding_fingerprint = embeddings.fingerprint();
  model.embedding_dim = embeddings.dim();
  model.config = config;
  model.finalize();

  if (report) {
    report->svm_val_f1 = best_f1;
    report->svm_best_epoch = best_epoch;
    report->cei_val_f1 = cei_result.best_val_f1;
    report->cei_best_epoch = cei_result.best_epoch;
    report->cei_epoch_loss = cei_result.epoch_loss;
    report->cei_train_examples = cei_train.examples.size();
    report->unalignable_gold_spans = cei_train.unalignable;
  }
  return model;
}

namespace {

json tokens_to_json(const Message& m) {
  json toks = json::array();
  for (const auto& t : m.tokens) {
    json tj;
    tj["t"] = t.text;
    tj["pos"] = t.tagged() ? json(t.pos) : json(nullptr);
    tj["start"] = t.start;
    tj["end"] = t.end;
    toks.push_back(std::move(tj));
  }
  return toks;
}

json arguments_to_json(const std::vector<DiscourseArgument>& args) {
  json out = json::array();
  for (const auto& a : args) out.push_back(json::array({a.first, a.last}));
  return out;
}

}  // namespace

std::string predict_line(const std::string& line, std::size_t lineno, PipelineModel& model,
                         PipelineMode mode) {
  Message m = message_from_json_line(line, lineno);
  prepare_message(m, model.tagger);
  const PipelineResult result =
      run_pipeline(m, model.lexicon, model.sentiment, model.cp, *model.cei, mode);

  json j = json::parse(line);
  j["tokens"] = tokens_to_json(m);
  j["causality"] = result.causality;
  j["arguments"] = arguments_to_json(result.args);
  json expl = json::array();
  for (std::size_t i = 0; i < result.explanations.size(); ++i)
    if (result.explanations[i]) expl.push_back(i);
  j["explanations"] = std::move(expl);
  return j.dump();
}

std::string segment_line(const std::string& line, std::size_t lineno,
                         const PosTagger* tagger, const ConnectiveLexicon& lexicon) {
  Message m = message_from_json_line(line, lineno);
  if (tagger) {
    prepare_message(m, *tagger);
  } else {
    if (m.tokens.empty() && !m.raw_text.empty()) m.tokens = tokenize(m.raw_text);
    PosTagger rules_only;
    rules_only.tag(m);  // throws "no tag source" when rules are not enough
  }
  const auto args = segment(m, lexicon);

  json j = json::parse(line);
  j["tokens"] = tokens_to_json(m);
  j["arguments"] = arguments_to_json(args);
  return j.dump();
}

void process_jsonl_stream(std::istream& in, std::ostream& out, int threads,
                          const std::function<std::string(const std::string&, std::size_t)>& fn) {
  std::string line;
  std::size_t lineno = 0;
  if (threads <= 1) {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      out << fn(line, lineno) << '\n';
    }
    return;
  }

  const std::size_t batch_size = static_cast<std::size_t>(threads) * 16;
  std::vector<std::pair<std::string, std::size_t>> batch;
  std::vector<std::string> results;
  while (in) {
    batch.clear();
    while (batch.size() < batch_size && std::getline(in, line)) {
      ++lineno;
      if (!line.empty()) batch.emplace_back(line, lineno);
    }
    if (batch.empty()) break;
    results.assign(batch.size(), {});
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (std::size_t i = static_cast<std::size_t>(t); i < batch.size();
             i += static_cast<std::size_t>(threads)) {
          try {
            results[i] = fn(batch[i].first, batch[i].second);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    for (const auto& r : results) out << r << '\n';
  }
}

int pipeline_threads_from_env() {
  const char* env = std::getenv("CAUSE_PIPELINE_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return std::clamp(n, 1, 64);
}

std::map<std::string, PredRecord> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::map<std::string, PredRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
    PredRecord rec;
    // "causality" is a prediction here, not a gold label; drop it (and the
    // gold span) so the gold-consistency checks do not fire
    json sanitized = j;
    sanitized.erase("causality");
    sanitized.erase("explanation_span");
    rec.message = message_from_json_line(sanitized.dump(), lineno);
    if (!j.contains("arguments") || !j["arguments"].is_array())
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": missing 'arguments' (not a predictions file?)");
    for (const auto& a : j["arguments"]) {
      DiscourseArgument arg;
      arg.first = a.at(0).get<int>();
      arg.last = a.at(1).get<int>();
      rec.args.push_back(arg);
    }
    rec.explanations.assign(rec.args.size(), false);
    if (j.contains("explanations") && j["explanations"].is_array())
      for (const auto& idx : j["explanations"]) {
        const auto i = idx.get<std::size_t>();
        if (i < rec.explanations.size()) rec.explanations[i] = true;
      }
    rec.causality = j.contains("causality") && j["causality"].is_boolean() &&
                    j["causality"].get<bool>();
    const std::string id = rec.message.id;
    out.emplace(id, std::move(rec));
  }
  return out;
}

std::pair<std::vector<int>, std::vector<int>> labels_for_task(
    const Corpus& gold, const std::map<std::string, PredRecord>& preds,
    const std::string& task) {
  std::vector<int> pred_labels, gold_labels;
  for (const auto& m : gold.messages) {
    if (!m.gold_causality) continue;
    auto it = preds.find(m.id);
    if (it == preds.end())
      throw std::runtime_error("message '" + m.id + "' missing from predictions");
    const PredRecord& rec = it->second;
    const bool causal = *m.gold_causality;

    if (task == "cp") {
      gold_labels.push_back(causal ? 1 : 0);
      pred_labels.push_back(rec.causality ? 1 : 0);
      continue;
    }
    if (task != "cei" && task != "pipeline")
      throw std::invalid_argument("unknown eval task '" + task + "'");
    if (task == "cei" && !causal) continue;
    if (rec.args.empty()) continue;

    std::vector<int> arg_gold(rec.args.size(), 0);
    if (causal) {
      if (!m.gold_explanation_span) continue;
      Message aligned = rec.message;  // prediction-side tokenization
      aligned.gold_causality = true;
      aligned.gold_explanation_span = m.gold_explanation_span;
      try {
        const CeiGold g = derive_cei_gold(aligned, rec.args);
        for (std::size_t i = 0; i < g.labels.size(); ++i) arg_gold[i] = g.labels[i] ? 1 : 0;
      } catch (const std::runtime_error&) {
        continue;  // unalignable span
      }
    }
    for (std::size_t i = 0; i < rec.args.size(); ++i) {
      gold_labels.push_back(arg_gold[i]);
      pred_labels.push_back(rec.explanations[i] ? 1 : 0);
    }
  }
  if (gold_labels.empty()) throw std::runtime_error("no evaluable messages for task");
  return {pred_labels, gold_labels};
}

CorpusPredictions predict_corpus(const Corpus& corpus, PipelineModel& model,
                                 PipelineMode mode) {
  CorpusPredictions out;
  for (const auto& original : corpus.messages) {
    Message m = original;
    prepare_message(m, model.tagger);
    const PipelineResult result =
        run_pipeline(m, model.lexicon, model.sentiment, model.cp, *model.cei, mode);

    if (m.gold_causality) {
      out.cp_gold.push_back(*m.gold_causality ? 1 : 0);
      out.cp_pred.push_back(result.causality ? 1 : 0);
    }
    if (result.args.empty() || !m.gold_causality) continue;

    std::vector<int> gold_labels(result.args.size(), 0);
    bool have_gold = !*m.gold_causality;  // non-causal: all arguments negative
    if (*m.gold_causality && m.gold_explanation_span) {
      try {
        const CeiGold gold = derive_cei_gold(m, result.args);
        for (std::size_t i = 0; i < gold.labels.size(); ++i)
          gold_labels[i] = gold.labels[i] ? 1 : 0;
        have_gold = true;
      } catch (const std::runtime_error&) {
        have_gold = false;
      }
    }
    if (!have_gold) continue;

    // CEI in isolation: the network on gold-causal messages only
    if (*m.gold_causality) {
      const auto lps = model.cei->forward_cei(m, result.args);
      for (std::size_t i = 0; i < lps.size(); ++i) {
        out.cei_pred.push_back(lps[i][1] > lps[i][0] ? 1 : 0);
        out.cei_gold.push_back(gold_labels[i]);
      }
    }
    // full pipeline: every argument of every message
    for (std::size_t i = 0; i < result.args.size(); ++i) {
      out.pipe_pred.push_back(result.explanations[i] ? 1 : 0);
      out.pipe_gold.push_back(gold_labels[i]);
    }
  }
  return out;
}

}  // namespace cea
