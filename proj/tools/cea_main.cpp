// cea: causal explanation analysis for social-media text.
//
// Subcommands: segment, train, predict, eval, mcnemar, gradcheck,
// analyze-demographics, analyze-logodds, synth.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cea/analysis.hpp"
#include "cea/config.hpp"
#include "cea/model_io.hpp"
#include "cea/synth.hpp"
#include "cea/workflow.hpp"

namespace {

using json = nlohmann::ordered_json;

int infer_embedding_dim(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string word;
    iss >> word;
    int dim = 0;
    double v;
    while (iss >> v) ++dim;
    if (dim == 0) throw std::runtime_error("embeddings '" + path + "' has an empty first line");
    return dim;
  }
  throw std::runtime_error("embeddings '" + path + "' is empty");
}

cea::EmbeddingTable load_embeddings_arg(const std::string& path, int dim) {
  if (dim <= 0) dim = infer_embedding_dim(path);
  return cea::load_embeddings(path, dim);
}

// Config-file < flag precedence: only flags the user actually passed
// overwrite what the file set.
struct ConfigFlags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> hidden_dim, epochs, patience, svm_epochs, tagger_epochs;
  std::optional<double> dropout_p, learning_rate, svm_lambda, alpha_fwe;
  std::optional<long> min_doc_count;
  std::optional<std::string> optimizer, cei_variant, cei_training_mode, pipeline_mode;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "key = value config file (flags win)");
    cmd->add_option("--seed", seed, "RNG seed (default 13)");
    cmd->add_option("--hidden-dim", hidden_dim, "LSTM hidden size (0 = embedding dim)");
    cmd->add_option("--dropout", dropout_p, "dropout between word and DA level");
    cmd->add_option("--optimizer", optimizer, "sgd | adam");
    cmd->add_option("--lr", learning_rate, "learning rate");
    cmd->add_option("--epochs", epochs, "neural epochs (upper bound)");
    cmd->add_option("--patience", patience, "early-stopping patience");
    cmd->add_option("--svm-epochs", svm_epochs, "SVM epochs");
    cmd->add_option("--svm-lambda", svm_lambda, "SVM regularization strength");
    cmd->add_option("--tagger-epochs", tagger_epochs, "POS tagger perceptron epochs");
    cmd->add_option("--alpha", alpha_fwe, "feature-selection family-wise error rate");
    cmd->add_option("--min-doc-count", min_doc_count, "word-pair frequency cutoff");
    cmd->add_option("--cei-variant", cei_variant, "full | word_only | da_avg");
    cmd->add_option("--cei-training", cei_training_mode, "causal_only | all");
    cmd->add_option("--mode", pipeline_mode, "two_stage | cei_only");
  }

  cea::RunConfig resolve() const {
    cea::RunConfig rc;
    if (!config_file.empty()) rc = cea::load_run_config(config_file, rc);
    if (seed) rc.seed = *seed;
    if (hidden_dim) rc.hidden_dim = *hidden_dim;
    if (dropout_p) rc.dropout_p = *dropout_p;
    if (optimizer) rc.optimizer = cea::optimizer_from_string(*optimizer);
    if (learning_rate) rc.learning_rate = *learning_rate;
    if (epochs) rc.epochs = *epochs;
    if (patience) rc.patience = *patience;
    if (svm_epochs) rc.svm_epochs = *svm_epochs;
    if (svm_lambda) rc.svm_lambda = *svm_lambda;
    if (tagger_epochs) rc.tagger_epochs = *tagger_epochs;
    if (alpha_fwe) rc.alpha_fwe = *alpha_fwe;
    if (min_doc_count) rc.min_doc_count = *min_doc_count;
    if (cei_variant) rc.cei_variant = cea::variant_from_string(*cei_variant);
    if (cei_training_mode)
      rc.cei_training_mode = cea::cei_training_mode_from_string(*cei_training_mode);
    if (pipeline_mode) rc.pipeline_mode = cea::pipeline_mode_from_string(*pipeline_mode);
    return rc;
  }
};

std::unique_ptr<std::ifstream> open_input(const std::string& path, std::istream*& stream) {
  if (path.empty() || path == "-") {
    stream = &std::cin;
    return nullptr;
  }
  auto file = std::make_unique<std::ifstream>(path);
  if (!*file) throw std::runtime_error("cannot open '" + path + "'");
  stream = file.get();
  return file;
}

std::unique_ptr<std::ofstream> open_output(const std::string& path, std::ostream*& stream) {
  if (path.empty() || path == "-") {
    stream = &std::cout;
    return nullptr;
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw std::runtime_error("cannot open '" + path + "' for writing");
  stream = file.get();
  return file;
}

void print_eval_table(std::ostream& out, const std::string& name, const cea::EvalReport& r) {
  out << std::left << std::setw(24) << "model" << std::right << std::setw(8) << "P"
      << std::setw(8) << "R" << std::setw(8) << "F1" << '\n';
  out << std::left << std::setw(24) << name << std::right << std::fixed
      << std::setprecision(3) << std::setw(8) << r.weighted_precision << std::setw(8)
      << r.weighted_recall << std::setw(8) << r.weighted_f1 << '\n';
  out.unsetf(std::ios::fixed);
}

json report_to_json(const cea::EvalReport& r) {
  json per_class = json::object();
  for (const auto& [label, m] : r.per_class)
    per_class[std::to_string(label)] = {{"precision", m.precision},
                                        {"recall", m.recall},
                                        {"f1", m.f1},
                                        {"support", m.support}};
  json confusion = json::object();
  for (const auto& [cell, count] : r.confusion)
    confusion[std::to_string(cell.first) + "->" + std::to_string(cell.second)] = count;
  return json{{"classes", std::move(per_class)},
              {"weighted",
               {{"precision", r.weighted_precision},
                {"recall", r.weighted_recall},
                {"f1", r.weighted_f1}}},
              {"confusion", std::move(confusion)},
              {"n", r.total}};
}

// ---- subcommand bodies ------------------------------------------------

int cmd_train(const std::string& train_path, const std::string& val_path,
              const std::string& emb_path, int emb_dim, const std::string& out_path,
              const std::string& lexicon_path, const std::string& sentiment_path,
              const ConfigFlags& flags) {
  const cea::RunConfig config = flags.resolve();
  std::cerr << "seed: " << config.seed << '\n';

  const cea::EmbeddingTable embeddings = load_embeddings_arg(emb_path, emb_dim);
  std::cerr << "embeddings: " << embeddings.size() << " words, dim " << embeddings.dim()
            << '\n';

  const cea::ConnectiveLexicon lexicon = lexicon_path.empty()
                                             ? cea::ConnectiveLexicon::defaults()
                                             : cea::ConnectiveLexicon::from_file(lexicon_path);
  const cea::SentimentLexicon sentiment = sentiment_path.empty()
                                              ? cea::SentimentLexicon::defaults()
                                              : cea::SentimentLexicon::from_file(sentiment_path);

  cea::Corpus train = cea::load_jsonl(train_path);
  cea::Corpus val = cea::load_jsonl(val_path);
  std::cerr << "train: " << train.messages.size() << " messages, val: "
            << val.messages.size() << '\n';

  cea::TrainReport report;
  cea::PipelineModel model = cea::train_pipeline(config, std::move(train), std::move(val),
                                                 embeddings, lexicon, sentiment, &report);
  cea::save_model(model, out_path);

  std::cerr << "cp  (svm): best epoch " << report.svm_best_epoch << ", val weighted F1 "
            << std::fixed << std::setprecision(3) << report.svm_val_f1 << '\n';
  std::cerr << "cei (lstm " << cea::to_string(config.cei_variant) << "): best epoch "
            << report.cei_best_epoch << ", val weighted F1 " << report.cei_val_f1 << '\n';
  if (report.unalignable_gold_spans > 0)
    std::cerr << "warning: " << report.unalignable_gold_spans
              << " messages with unalignable gold spans were excluded from CEI training\n";
  std::cerr << "model written to " << out_path << '\n';
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& emb_path, int emb_dim,
                const std::string& in_path, const std::string& out_path,
                const std::string& mode_arg) {
  const cea::ModelInfo info = cea::read_model_info(model_path);
  const cea::EmbeddingTable embeddings =
      load_embeddings_arg(emb_path, emb_dim > 0 ? emb_dim : info.embedding_dim);
  cea::PipelineModel model = cea::load_model(model_path, embeddings);
  const cea::PipelineMode mode = mode_arg.empty()
                                     ? model.config.pipeline_mode
                                     : cea::pipeline_mode_from_string(mode_arg);

  std::istream* in;
  std::ostream* out;
  auto in_guard = open_input(in_path, in);
  auto out_guard = open_output(out_path, out);
  const int threads = cea::pipeline_threads_from_env();
  cea::process_jsonl_stream(*in, *out, threads,
                            [&](const std::string& line, std::size_t lineno) {
                              return cea::predict_line(line, lineno, model, mode);
                            });
  return 0;
}

int cmd_segment(const std::string& model_path, const std::string& lexicon_path,
                const std::string& in_path, const std::string& out_path) {
  cea::PosTagger tagger;
  cea::ConnectiveLexicon lexicon = cea::ConnectiveLexicon::defaults();
  bool have_tagger = false;
  if (!model_path.empty()) {
    auto [t, lex] = cea::load_tagger_and_lexicon(model_path);
    tagger = std::move(t);
    lexicon = std::move(lex);
    have_tagger = true;
  }
  if (!lexicon_path.empty()) lexicon = cea::ConnectiveLexicon::from_file(lexicon_path);

  std::istream* in;
  std::ostream* out;
  auto in_guard = open_input(in_path, in);
  auto out_guard = open_output(out_path, out);
  cea::process_jsonl_stream(
      *in, *out, 1, [&](const std::string& line, std::size_t lineno) {
        return cea::segment_line(line, lineno, have_tagger ? &tagger : nullptr, lexicon);
      });
  return 0;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path,
             const std::string& task, const std::string& name, bool as_json) {
  const cea::Corpus gold = cea::load_jsonl(gold_path);
  const auto preds = cea::load_predictions(pred_path);
  const auto [pred_labels, gold_labels] = cea::labels_for_task(gold, preds, task);
  const cea::EvalReport report = cea::evaluate(pred_labels, gold_labels);
  if (as_json)
    std::cout << report_to_json(report).dump(2) << '\n';
  else
    print_eval_table(std::cout, name.empty() ? task : name, report);
  return 0;
}

int cmd_mcnemar(const std::string& gold_path, const std::string& pred_a,
                const std::string& pred_b, const std::string& task) {
  const cea::Corpus gold = cea::load_jsonl(gold_path);
  const auto A = cea::load_predictions(pred_a);
  const auto B = cea::load_predictions(pred_b);
  const auto [a_labels, gold_a] = cea::labels_for_task(gold, A, task);
  const auto [b_labels, gold_b] = cea::labels_for_task(gold, B, task);
  if (gold_a != gold_b)
    throw std::runtime_error("prediction files cover different item sets");
  const cea::McNemarResult r = cea::mcnemar(a_labels, b_labels, gold_a);
  std::cout << json{{"b", r.b},
                    {"c", r.c},
                    {"statistic", r.statistic},
                    {"p_value", r.p_value}}
                   .dump(2)
            << '\n';
  return 0;
}

int cmd_gradcheck(int dim, int hidden, int instances, double eps, std::uint64_t seed) {
  std::cerr << "seed: " << seed << '\n';
  cea::EmbeddingTable embeddings(dim);
  cea::Rng rng(seed);
  const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta",
                                          "epsilon", "zeta", "eta", "theta"};
  for (const auto& w : vocab) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v[k] = rng.next_uniform(-0.5, 0.5);
    embeddings.insert(w, std::move(v));
  }

  bool all_ok = true;
  for (const cea::Task task : {cea::Task::cp, cea::Task::cei}) {
    for (const cea::Variant variant :
         {cea::Variant::full, cea::Variant::word_only, cea::Variant::da_avg}) {
      double worst = 0.0;
      for (int inst = 0; inst < instances; ++inst) {
        cea::NeuralModel model(task, variant, &embeddings, hidden, 0.0, rng.next_u64());
        cea::Message msg;
        msg.id = "gradcheck";
        std::vector<cea::DiscourseArgument> args;
        std::string text;
        int tok = 0;
        const int n_args = 2 + static_cast<int>(rng.next_below(3));
        for (int a = 0; a < n_args; ++a) {
          const int len = 1 + static_cast<int>(rng.next_below(4));
          cea::DiscourseArgument arg;
          arg.first = tok;
          for (int k = 0; k < len; ++k) {
            // one word in five is out of vocabulary
            const std::string w =
                rng.next_double() < 0.2 ? "oov" : vocab[rng.next_below(vocab.size())];
            cea::Token t;
            t.text = w;
            t.pos = "N";
            t.start = text.size() + (text.empty() ? 0 : 1);
            if (!text.empty()) text += ' ';
            text += w;
            t.end = text.size();
            msg.tokens.push_back(t);
            ++tok;
          }
          arg.last = tok - 1;
          args.push_back(arg);
        }
        msg.raw_text = text;

        cea::NeuralExample ex;
        ex.message = &msg;
        ex.args = args;
        if (task == cea::Task::cp) {
          ex.cp_gold = static_cast<int>(rng.next_below(2));
        } else {
          ex.cei_gold.assign(args.size(), 0);
          ex.cei_gold[rng.next_below(args.size())] = 1;
        }
        worst = std::max(worst, cea::gradient_check(model, ex, eps));
      }
      const bool ok = worst < 1e-4;
      all_ok = all_ok && ok;
      std::cout << (ok ? "PASS" : "FAIL") << "  task=" << cea::to_string(task)
                << " variant=" << cea::to_string(variant) << "  max_rel_err="
                << std::scientific << std::setprecision(3) << worst << std::defaultfloat
                << '\n';
    }
  }
  return all_ok ? 0 : 1;
}

int cmd_analyze_demographics(const std::string& pred_path, const std::string& demo_path,
                             const std::string& tsv_path) {
  const auto preds = cea::load_predictions(pred_path);
  std::vector<std::pair<std::string, bool>> posts;
  for (const auto& [id, rec] : preds)
    if (rec.message.user_id) posts.emplace_back(*rec.message.user_id, rec.causality);
  if (posts.empty()) throw std::runtime_error("no predictions carry a user_id");
  const std::vector<cea::UserStats> stats = cea::cp_ratio_table(posts);

  // sidecar: user_id,age,group (header optional)
  std::ifstream demo(demo_path);
  if (!demo) throw std::runtime_error("cannot open '" + demo_path + "'");
  std::map<std::string, std::pair<double, std::string>> by_user;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(demo, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string user, age, group;
    if (!std::getline(iss, user, ',') || !std::getline(iss, age, ',') ||
        !std::getline(iss, group))
      throw std::runtime_error("demographics line " + std::to_string(lineno) +
                               ": expected user_id,age,group");
    if (lineno == 1 && user == "user_id") continue;
    try {
      by_user[user] = {std::stod(age), group};
    } catch (const std::exception&) {
      throw std::runtime_error("demographics line " + std::to_string(lineno) +
                               ": bad age value '" + age + "'");
    }
  }

  std::vector<double> ratios, ages;
  std::map<std::string, std::vector<double>> groups;
  for (const auto& s : stats) {
    auto it = by_user.find(s.user_id);
    if (it == by_user.end()) continue;
    ratios.push_back(s.cp_ratio);
    ages.push_back(it->second.first);
    groups[it->second.second].push_back(s.cp_ratio);
  }

  json out;
  out["n_users"] = ratios.size();
  out["pearson_r_age"] = cea::pearson_r(ratios, ages);
  if (groups.size() == 2) {
    auto it = groups.begin();
    const auto& [ga, va] = *it;
    ++it;
    const auto& [gb, vb] = *it;
    out["cohens_d"] = {{"group_a", ga}, {"group_b", gb}, {"d", cea::cohens_d(va, vb)}};
  } else {
    out["cohens_d"] = nullptr;
    std::cerr << "note: Cohen's d needs exactly 2 groups, found " << groups.size() << '\n';
  }
  std::cout << out.dump(2) << '\n';

  if (!tsv_path.empty()) {
    std::ofstream tsv(tsv_path);
    if (!tsv) throw std::runtime_error("cannot open '" + tsv_path + "' for writing");
    tsv << "user_id\tn_posts\tn_causal\tcp_ratio\n";
    for (const auto& s : stats)
      tsv << s.user_id << '\t' << s.n_posts << '\t' << s.n_causal << '\t' << s.cp_ratio
          << '\n';
  }
  return 0;
}

int cmd_analyze_logodds(const std::string& pred_path, const std::string& target_label,
                        std::size_t top_k, double prior_mass,
                        const std::string& tsv_prefix) {
  const auto preds = cea::load_predictions(pred_path);
  cea::NgramCounts ce_target, ce_other, non_target, non_other;
  for (const auto& [id, rec] : preds) {
    if (!rec.message.label)
      throw std::runtime_error("message '" + id + "' has no label field");
    if (rec.message.tokens.empty()) continue;
    const bool is_target = *rec.message.label == target_label;
    for (std::size_t i = 0; i < rec.args.size(); ++i) {
      cea::NgramCounts& bucket = rec.explanations[i]
                                     ? (is_target ? ce_target : ce_other)
                                     : (is_target ? non_target : non_other);
      cea::accumulate_ngrams(bucket, rec.message, rec.args[i].first, rec.args[i].last);
    }
  }

  auto rank = [&](const cea::NgramCounts& target, const cea::NgramCounts& other) {
    std::vector<cea::LogOddsEntry> out;
    if (target.empty() || other.empty()) return out;
    const auto result = cea::log_odds_dirichlet(
        target, other, cea::default_prior(target, other, prior_mass));
    const std::size_t k = std::min(top_k, result.entries.size());
    out.assign(result.entries.begin(), result.entries.begin() + static_cast<long>(k));
    return out;
  };
  const auto ce = rank(ce_target, ce_other);
  const auto non_ce = rank(non_target, non_other);

  auto to_json = [](const std::vector<cea::LogOddsEntry>& entries) {
    json arr = json::array();
    for (const auto& e : entries)
      arr.push_back({{"ngram", e.ngram},
                     {"delta", e.delta},
                     {"variance", e.variance},
                     {"z", e.z_score}});
    return arr;
  };
  std::cout << json{{"target_label", target_label},
                    {"ce", to_json(ce)},
                    {"non_ce", to_json(non_ce)}}
                   .dump(2)
            << '\n';

  if (!tsv_prefix.empty()) {
    auto dump_tsv = [](const std::string& path, const std::vector<cea::LogOddsEntry>& list) {
      std::ofstream tsv(path);
      if (!tsv) throw std::runtime_error("cannot open '" + path + "' for writing");
      tsv << "ngram\tdelta\tvariance\tz\n";
      for (const auto& e : list)
        tsv << e.ngram << '\t' << e.delta << '\t' << e.variance << '\t' << e.z_score << '\n';
    };
    dump_tsv(tsv_prefix + ".ce.tsv", ce);
    dump_tsv(tsv_prefix + ".non_ce.tsv", non_ce);
  }
  return 0;
}

int cmd_synth(const std::string& out_dir, std::size_t n, std::uint64_t seed, int dim,
              bool untagged) {
  std::cerr << "seed: " << seed << '\n';
  cea::SynthOptions opt;
  opt.n_messages = n;
  opt.seed = seed;
  opt.keep_tags = !untagged;
  const cea::Corpus corpus = cea::synth_corpus(opt);
  cea::Corpus train, val, test;
  cea::split_corpus(corpus, 0.8, 0.1, train, val, test);
  cea::save_jsonl(train, out_dir + "/train.jsonl");
  cea::save_jsonl(val, out_dir + "/val.jsonl");
  cea::save_jsonl(test, out_dir + "/test.jsonl");
  cea::write_synth_embeddings(out_dir + "/embeddings.txt", dim, seed);
  std::cerr << "wrote " << train.messages.size() << "/" << val.messages.size() << "/"
            << test.messages.size() << " messages and dim-" << dim << " embeddings to "
            << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal explanation analysis for social-media text"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "train the CP + CEI pipeline");
  std::string train_path, val_path, emb_path, out_path, lexicon_path, sentiment_path;
  int emb_dim = 0;
  ConfigFlags flags;
  train->add_option("--train", train_path, "training JSONL")->required();
  train->add_option("--val", val_path, "validation JSONL")->required();
  train->add_option("--embeddings", emb_path, "GloVe-format embeddings")->required();
  train->add_option("--dim", emb_dim, "embedding dimension (0 = infer)");
  train->add_option("--out", out_path, "output model file")->required();
  train->add_option("--lexicon", lexicon_path, "connective lexicon override");
  train->add_option("--sentiment", sentiment_path, "sentiment lexicon override");
  flags.add_to(train);

  // predict
  auto* predict = app.add_subcommand("predict", "annotate JSONL with predictions");
  std::string p_model, p_emb, p_in, p_out, p_mode;
  int p_dim = 0;
  predict->add_option("--model", p_model, "model file")->required();
  predict->add_option("--embeddings", p_emb, "embeddings used at training time")->required();
  predict->add_option("--dim", p_dim, "embedding dimension (0 = from model)");
  predict->add_option("--in", p_in, "input JSONL (default stdin)");
  predict->add_option("--out", p_out, "output JSONL (default stdout)");
  predict->add_option("--mode", p_mode, "two_stage | cei_only (default: model setting)");

  // segment
  auto* seg = app.add_subcommand("segment", "split messages into discourse arguments");
  std::string s_model, s_lexicon, s_in, s_out;
  seg->add_option("--model", s_model, "model file providing the POS tagger");
  seg->add_option("--lexicon", s_lexicon, "connective lexicon override");
  seg->add_option("--in", s_in, "input JSONL (default stdin)");
  seg->add_option("--out", s_out, "output JSONL (default stdout)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold labels");
  std::string e_gold, e_pred, e_task = "cp", e_name;
  bool e_json = false;
  eval_cmd->add_option("--gold", e_gold, "gold JSONL")->required();
  eval_cmd->add_option("--pred", e_pred, "predictions JSONL")->required();
  eval_cmd->add_option("--task", e_task, "cp | cei | pipeline");
  eval_cmd->add_option("--name", e_name, "row label for the table");
  eval_cmd->add_flag("--json", e_json, "emit the full report as JSON");

  // mcnemar
  auto* mc = app.add_subcommand("mcnemar", "paired significance test of two models");
  std::string m_gold, m_a, m_b, m_task = "cp";
  mc->add_option("--gold", m_gold, "gold JSONL")->required();
  mc->add_option("--pred-a", m_a, "predictions JSONL (model A)")->required();
  mc->add_option("--pred-b", m_b, "predictions JSONL (model B)")->required();
  mc->add_option("--task", m_task, "cp | cei | pipeline");

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the networks");
  int g_dim = 5, g_hidden = 4, g_instances = 20;
  double g_eps = 1e-3;
  std::uint64_t g_seed = 13;
  gc->add_option("--dim", g_dim, "embedding dimension");
  gc->add_option("--hidden-dim", g_hidden, "hidden size");
  gc->add_option("--instances", g_instances, "random instances per configuration");
  gc->add_option("--eps", g_eps, "finite-difference step");
  gc->add_option("--seed", g_seed, "RNG seed");

  // analyze-demographics
  auto* ad = app.add_subcommand("analyze-demographics",
                                "per-user causality rate vs age and group");
  std::string ad_pred, ad_demo, ad_tsv;
  ad->add_option("--pred", ad_pred, "predictions JSONL (with user_id)")->required();
  ad->add_option("--demographics", ad_demo, "CSV sidecar: user_id,age,group")->required();
  ad->add_option("--tsv", ad_tsv, "write the per-user table here");

  // analyze-logodds
  auto* al = app.add_subcommand("analyze-logodds",
                                "ngram log-odds inside vs outside explanations");
  std::string al_pred, al_label = "negative", al_tsv;
  std::size_t al_topk = 10;
  double al_mass = 500.0;
  al->add_option("--pred", al_pred, "predictions JSONL (with label)")->required();
  al->add_option("--label", al_label, "target label (default: negative)");
  al->add_option("--top-k", al_topk, "entries per list");
  al->add_option("--prior-mass", al_mass, "Dirichlet prior mass");
  al->add_option("--tsv-prefix", al_tsv, "write <prefix>.ce.tsv and <prefix>.non_ce.tsv");

  // synth
  auto* sy = app.add_subcommand("synth", "generate the synthetic demo corpus");
  std::string sy_dir;
  std::size_t sy_n = 2000;
  std::uint64_t sy_seed = 13;
  int sy_dim = 10;
  bool sy_untagged = false;
  sy->add_option("--out-dir", sy_dir, "output directory")->required();
  sy->add_option("--n", sy_n, "number of messages");
  sy->add_option("--seed", sy_seed, "RNG seed");
  sy->add_option("--dim", sy_dim, "embedding dimension");
  sy->add_flag("--untagged", sy_untagged, "strip gold POS tags");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train)
      return cmd_train(train_path, val_path, emb_path, emb_dim, out_path, lexicon_path,
                       sentiment_path, flags);
    if (*predict) return cmd_predict(p_model, p_emb, p_dim, p_in, p_out, p_mode);
    if (*seg) return cmd_segment(s_model, s_lexicon, s_in, s_out);
    if (*eval_cmd) return cmd_eval(e_gold, e_pred, e_task, e_name, e_json);
    if (*mc) return cmd_mcnemar(m_gold, m_a, m_b, m_task);
    if (*gc) return cmd_gradcheck(g_dim, g_hidden, g_instances, g_eps, g_seed);
    if (*ad) return cmd_analyze_demographics(ad_pred, ad_demo, ad_tsv);
    if (*al) return cmd_analyze_logodds(al_pred, al_label, al_topk, al_mass, al_tsv);
    if (*sy) return cmd_synth(sy_dir, sy_n, sy_seed, sy_dim, sy_untagged);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
