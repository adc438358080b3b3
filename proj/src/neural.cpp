#include "cea/neural.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cea/metrics.hpp"
#include "cea/text.hpp"

namespace cea {

std::string to_string(Task t) { return t == Task::cp ? "cp" : "cei"; }

std::string to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::word_only: return "word_only";
    case Variant::da_avg: return "da_avg";
  }
  return "full";
}

Task task_from_string(const std::string& s) {
  if (s == "cp") return Task::cp;
  if (s == "cei") return Task::cei;
  throw std::invalid_argument("unknown task '" + s + "'");
}

Variant variant_from_string(const std::string& s) {
  if (s == "full") return Variant::full;
  if (s == "word_only") return Variant::word_only;
  if (s == "da_avg") return Variant::da_avg;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

namespace {

Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

LstmGates register_gates(ad::ParamStore& ps, const std::string& prefix, int in, int hidden) {
  LstmGates g;
  g.wi = ps.add(prefix + ".wi", hidden, in);
  g.ui = ps.add(prefix + ".ui", hidden, hidden);
  g.bi = ps.add(prefix + ".bi", hidden, 1);
  g.wf = ps.add(prefix + ".wf", hidden, in);
  g.uf = ps.add(prefix + ".uf", hidden, hidden);
  g.bf = ps.add(prefix + ".bf", hidden, 1);
  g.wo = ps.add(prefix + ".wo", hidden, in);
  g.uo = ps.add(prefix + ".uo", hidden, hidden);
  g.bo = ps.add(prefix + ".bo", hidden, 1);
  g.wg = ps.add(prefix + ".wg", hidden, in);
  g.ug = ps.add(prefix + ".ug", hidden, hidden);
  g.bg = ps.add(prefix + ".bg", hidden, 1);
  return g;
}

std::vector<std::string> argument_word_list(const Message& m, const DiscourseArgument& arg) {
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(arg.size()));
  for (int i = arg.first; i <= arg.last; ++i) words.push_back(m.tokens[i].text);
  return words;
}

}  // namespace

LstmParams register_lstm_params(ad::ParamStore& params, const std::string& prefix,
                                int input_dim, int hidden_dim) {
  LstmParams lstm;
  lstm.input_dim = input_dim;
  lstm.hidden_dim = hidden_dim;
  lstm.fwd = register_gates(params, prefix + ".fwd", input_dim, hidden_dim);
  lstm.bwd = register_gates(params, prefix + ".bwd", input_dim, hidden_dim);
  return lstm;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_step(
    const ad::ParamStore& params, const LstmParams& lstm, bool backward_dir,
    const Eigen::VectorXd& x_t, const Eigen::VectorXd& h_prev,
    const Eigen::VectorXd& c_prev) {
  if (x_t.size() != lstm.input_dim || h_prev.size() != lstm.hidden_dim ||
      c_prev.size() != lstm.hidden_dim)
    throw std::invalid_argument("lstm_step dimension mismatch");
  const LstmGates& g = backward_dir ? lstm.bwd : lstm.fwd;
  auto affine = [&](int w, int u, int b) -> Eigen::VectorXd {
    return params.value(w) * x_t + params.value(u) * h_prev + params.value(b).col(0);
  };
  const Eigen::VectorXd i = sigmoid_vec(affine(g.wi, g.ui, g.bi));
  const Eigen::VectorXd f = sigmoid_vec(affine(g.wf, g.uf, g.bf));
  const Eigen::VectorXd o = sigmoid_vec(affine(g.wo, g.uo, g.bo));
  const Eigen::VectorXd cand = affine(g.wg, g.ug, g.bg).array().tanh();
  Eigen::VectorXd c = f.cwiseProduct(c_prev) + i.cwiseProduct(cand);
  Eigen::VectorXd h = o.cwiseProduct(c.array().tanh().matrix());
  return {std::move(h), std::move(c)};
}

std::optional<Eigen::VectorXd> da_average(const EmbeddingTable& embeddings,
                                          const std::vector<std::string>& words) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(embeddings.dim());
  long n = 0;
  for (const auto& w : words) {
    if (const Eigen::VectorXd* v = embeddings.lookup(w)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

NeuralModel::NeuralModel(Task task, Variant variant, const EmbeddingTable* embeddings,
                         int hidden_dim, double dropout_p, std::uint64_t init_seed)
    : NeuralModel(task, variant, embeddings, hidden_dim, dropout_p, true, init_seed) {}

NeuralModel NeuralModel::restore(Task task, Variant variant, const EmbeddingTable* embeddings,
                                 int hidden_dim, double dropout_p) {
  return NeuralModel(task, variant, embeddings, hidden_dim, dropout_p, false, 0);
}

NeuralModel::NeuralModel(Task task, Variant variant, const EmbeddingTable* embeddings,
                         int hidden_dim, double dropout_p, bool initialize,
                         std::uint64_t init_seed)
    : task_(task),
      variant_(variant),
      embeddings_(embeddings),
      emb_dim_(embeddings ? embeddings->dim() : 0),
      hidden_dim_(hidden_dim > 0 ? hidden_dim : emb_dim_),
      dropout_p_(dropout_p) {
  if (!embeddings_) throw std::invalid_argument("neural model needs an embedding table");
  if (emb_dim_ <= 0) throw std::invalid_argument("embedding table has no dimension");
  if (hidden_dim_ <= 0) throw std::invalid_argument("hidden_dim must be positive");
  if (dropout_p_ < 0.0 || dropout_p_ >= 1.0)
    throw std::invalid_argument("dropout_p must lie in [0, 1)");

  if (variant_ == Variant::full || variant_ == Variant::word_only)
    word_lstm_ = register_lstm_params(params_, "word", emb_dim_, hidden_dim_);
  if (variant_ == Variant::full || variant_ == Variant::da_avg) {
    const int da_in = variant_ == Variant::full ? 2 * hidden_dim_ : emb_dim_;
    da_lstm_ = register_lstm_params(params_, "da", da_in, hidden_dim_);
  }
  out_w_ = params_.add("out.w", 2, 2 * hidden_dim_);
  out_b_ = params_.add("out.b", 2, 1);

  if (initialize) {
    Rng rng(init_seed);
    for (int id = 0; id < static_cast<int>(params_.entries().size()); ++id) {
      const auto& e = params_.entry(id);
      const int fan_in = e.cols > 1 ? e.cols : e.rows;
      params_.init_uniform(id, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
    }
  }
}

void NeuralModel::set_embeddings(const EmbeddingTable* embeddings) {
  if (!embeddings || embeddings->dim() != emb_dim_)
    throw std::invalid_argument("embedding table dimension mismatch");
  embeddings_ = embeddings;
}

std::vector<ad::Tape::NodeId> NeuralModel::embed_words(
    ad::Tape& tape, const std::vector<std::string>& words) const {
  std::vector<ad::Tape::NodeId> out;
  out.reserve(words.size());
  for (const auto& w : words)
    if (const Eigen::VectorXd* v = embeddings_->lookup(w)) out.push_back(tape.constant(*v));
  return out;
}

// One LSTM direction over xs; returns the final hidden state (zeros for an
// empty sequence) and optionally the per-position hidden states aligned to
// the original order.
ad::Tape::NodeId NeuralModel::run_direction(ad::Tape& tape, const LstmParams& lstm,
                                            bool backward_dir,
                                            const std::vector<ad::Tape::NodeId>& xs,
                                            std::vector<ad::Tape::NodeId>* per_step) const {
  const LstmGates& g = backward_dir ? lstm.bwd : lstm.fwd;
  if (per_step) per_step->assign(xs.size(), -1);
  ad::Tape::NodeId h = tape.zeros(lstm.hidden_dim);
  ad::Tape::NodeId c = tape.zeros(lstm.hidden_dim);
  const int n = static_cast<int>(xs.size());
  for (int step = 0; step < n; ++step) {
    const int t = backward_dir ? n - 1 - step : step;
    const ad::Tape::NodeId x = xs[static_cast<std::size_t>(t)];
    const auto gate_i = tape.sigmoid(tape.linear(g.wi, x, g.ui, h, g.bi));
    const auto gate_f = tape.sigmoid(tape.linear(g.wf, x, g.uf, h, g.bf));
    const auto gate_o = tape.sigmoid(tape.linear(g.wo, x, g.uo, h, g.bo));
    const auto cand = tape.tanh(tape.linear(g.wg, x, g.ug, h, g.bg));
    c = tape.add(tape.emul(gate_f, c), tape.emul(gate_i, cand));
    h = tape.emul(gate_o, tape.tanh(c));
    if (per_step) (*per_step)[static_cast<std::size_t>(t)] = h;
  }
  return h;
}

ad::Tape::NodeId NeuralModel::encode_words_node(ad::Tape& tape,
                                                const std::vector<ad::Tape::NodeId>& xs) const {
  const ad::Tape::NodeId hf = run_direction(tape, *word_lstm_, false, xs, nullptr);
  const ad::Tape::NodeId hb = run_direction(tape, *word_lstm_, true, xs, nullptr);
  return tape.concat(hf, hb);
}

NeuralModel::Graph NeuralModel::build(ad::Tape& tape, const Message& message,
                                      const std::vector<DiscourseArgument>& args,
                                      bool train_mode, Rng* dropout_rng, const int* cp_gold,
                                      const std::vector<int>* cei_gold) const {
  if (args.empty()) throw std::runtime_error("message '" + message.id + "' has no arguments");

  Graph graph;
  std::vector<ad::Tape::NodeId> logits;

  if (variant_ == Variant::word_only) {
    if (task_ == Task::cp) {
      std::vector<std::string> words;
      for (const auto& t : message.tokens) words.push_back(t.text);
      logits.push_back(
          tape.linear(out_w_, encode_words_node(tape, embed_words(tape, words)), -1, -1, out_b_));
    } else {
      for (const auto& arg : args) {
        const auto xs = embed_words(tape, argument_word_list(message, arg));
        logits.push_back(tape.linear(out_w_, encode_words_node(tape, xs), -1, -1, out_b_));
      }
    }
  } else {
    // argument vectors for the DA-level LSTM
    std::vector<ad::Tape::NodeId> da_vecs(args.size(), -1);
    std::vector<std::size_t> missing;
    std::vector<ad::Tape::NodeId> present;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const auto words = argument_word_list(message, args[i]);
      if (variant_ == Variant::full) {
        const auto xs = embed_words(tape, words);
        if (xs.empty()) {
          missing.push_back(i);
        } else {
          da_vecs[i] = encode_words_node(tape, xs);
          present.push_back(da_vecs[i]);
        }
      } else {
        if (auto avg = da_average(*embeddings_, words)) {
          da_vecs[i] = tape.constant(*avg);
          present.push_back(da_vecs[i]);
        } else {
          missing.push_back(i);
        }
      }
    }
    // an argument with no embedded words takes the mean of the others
    const int da_in = variant_ == Variant::full ? 2 * hidden_dim_ : emb_dim_;
    for (const std::size_t i : missing)
      da_vecs[i] = present.empty() ? tape.zeros(da_in) : tape.mean(present);

    // dropout between the word level and the DA level (full variant only)
    if (variant_ == Variant::full && train_mode && dropout_p_ > 0.0 && dropout_rng) {
      const double keep_scale = 1.0 / (1.0 - dropout_p_);
      for (auto& v : da_vecs) {
        Eigen::VectorXd m(da_in);
        for (int k = 0; k < da_in; ++k)
          m[k] = dropout_rng->next_double() < dropout_p_ ? 0.0 : keep_scale;
        v = tape.mask(v, std::move(m));
      }
    }

    if (task_ == Task::cp) {
      const ad::Tape::NodeId hf = run_direction(tape, *da_lstm_, false, da_vecs, nullptr);
      const ad::Tape::NodeId hb = run_direction(tape, *da_lstm_, true, da_vecs, nullptr);
      logits.push_back(tape.linear(out_w_, tape.concat(hf, hb), -1, -1, out_b_));
    } else {
      std::vector<ad::Tape::NodeId> fwd_steps, bwd_steps;
      run_direction(tape, *da_lstm_, false, da_vecs, &fwd_steps);
      run_direction(tape, *da_lstm_, true, da_vecs, &bwd_steps);
      for (std::size_t i = 0; i < args.size(); ++i)
        logits.push_back(
            tape.linear(out_w_, tape.concat(fwd_steps[i], bwd_steps[i]), -1, -1, out_b_));
    }
  }

  for (const auto l : logits) graph.outputs.push_back(tape.log_softmax(l));

  if (cp_gold) {
    graph.loss = tape.nll(graph.outputs[0], *cp_gold);
  } else if (cei_gold) {
    if (cei_gold->size() != graph.outputs.size())
      throw std::invalid_argument("cei gold labels do not match argument count");
    std::vector<ad::Tape::NodeId> losses;
    for (std::size_t i = 0; i < graph.outputs.size(); ++i)
      losses.push_back(tape.nll(graph.outputs[i], (*cei_gold)[i]));
    graph.loss = tape.sum(losses);
  }
  return graph;
}

Eigen::VectorXd NeuralModel::forward_cp(const Message& message,
                                        const std::vector<DiscourseArgument>& args,
                                        bool train_mode, Rng* dropout_rng) {
  if (task_ != Task::cp) throw std::logic_error("forward_cp on a CEI model");
  ad::Tape tape(&params_);
  const Graph g = build(tape, message, args, train_mode, dropout_rng, nullptr, nullptr);
  return tape.value(g.outputs[0]);
}

Eigen::VectorXd NeuralModel::forward_cp_seeded(const Message& message,
                                               const std::vector<DiscourseArgument>& args,
                                               bool train_mode, std::uint64_t seed) {
  Rng rng(seed);
  return forward_cp(message, args, train_mode, &rng);
}

std::vector<Eigen::VectorXd> NeuralModel::forward_cei(const Message& message,
                                                      const std::vector<DiscourseArgument>& args,
                                                      bool train_mode, Rng* dropout_rng) {
  if (task_ != Task::cei) throw std::logic_error("forward_cei on a CP model");
  ad::Tape tape(&params_);
  const Graph g = build(tape, message, args, train_mode, dropout_rng, nullptr, nullptr);
  std::vector<Eigen::VectorXd> out;
  out.reserve(g.outputs.size());
  for (const auto id : g.outputs) out.push_back(tape.value(id));
  return out;
}

std::vector<Eigen::VectorXd> NeuralModel::forward_cei_seeded(
    const Message& message, const std::vector<DiscourseArgument>& args, bool train_mode,
    std::uint64_t seed) {
  Rng rng(seed);
  return forward_cei(message, args, train_mode, &rng);
}

Eigen::VectorXd NeuralModel::encode_argument(const std::vector<std::string>& words) {
  if (!word_lstm_) throw std::logic_error("variant has no word-level LSTM");
  ad::Tape tape(&params_);
  return tape.value(encode_words_node(tape, embed_words(tape, words)));
}

double NeuralModel::loss(const NeuralExample& example) {
  ad::Tape tape(&params_);
  const int cp = example.cp_gold;
  const Graph g = task_ == Task::cp
                      ? build(tape, *example.message, example.args, false, nullptr, &cp, nullptr)
                      : build(tape, *example.message, example.args, false, nullptr, nullptr,
                              &example.cei_gold);
  return tape.value(g.loss)[0];
}

double NeuralModel::loss_and_gradients(const NeuralExample& example, bool train_mode,
                                       Rng* dropout_rng) {
  ad::Tape tape(&params_);
  const int cp = example.cp_gold;
  const Graph g =
      task_ == Task::cp
          ? build(tape, *example.message, example.args, train_mode, dropout_rng, &cp, nullptr)
          : build(tape, *example.message, example.args, train_mode, dropout_rng, nullptr,
                  &example.cei_gold);
  params_.zero_grad();
  tape.backward(g.loss);
  return tape.value(g.loss)[0];
}

namespace {

void check_examples(Task task, const std::vector<NeuralExample>& examples) {
  for (const auto& ex : examples) {
    if (!ex.message) throw std::invalid_argument("example without a message");
    if (ex.args.empty())
      throw std::runtime_error("message '" + ex.message->id + "' has no arguments");
    if (task == Task::cp && ex.cp_gold != 0 && ex.cp_gold != 1)
      throw std::runtime_error("message '" + ex.message->id + "' is missing a gold label");
    if (task == Task::cei && ex.cei_gold.size() != ex.args.size())
      throw std::runtime_error("message '" + ex.message->id +
                               "' is missing per-argument gold labels");
  }
}

double validation_weighted_f1(NeuralModel& model, const std::vector<NeuralExample>& val) {
  std::vector<int> preds, golds;
  for (const auto& ex : val) {
    if (model.task() == Task::cp) {
      const Eigen::VectorXd lp = model.forward_cp(*ex.message, ex.args);
      preds.push_back(lp[1] > lp[0] ? 1 : 0);
      golds.push_back(ex.cp_gold);
    } else {
      const auto lps = model.forward_cei(*ex.message, ex.args);
      for (std::size_t i = 0; i < lps.size(); ++i) {
        preds.push_back(lps[i][1] > lps[i][0] ? 1 : 0);
        golds.push_back(ex.cei_gold[i]);
      }
    }
  }
  if (preds.empty()) return 0.0;
  return evaluate(preds, golds).weighted_f1;
}

}  // namespace

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t n_params)
    : kind_(kind), lr_(learning_rate), m_(n_params, 0.0), v_(n_params, 0.0) {}

void Optimizer::step(ad::ParamStore& params) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  auto& values = params.values();
  auto& grads = params.grads();
  if (kind_ == OptimizerKind::sgd) {
    for (std::size_t k = 0; k < values.size(); ++k) values[k] -= lr_ * grads[k];
    return;
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < values.size(); ++k) {
    m_[k] = kBeta1 * m_[k] + (1.0 - kBeta1) * grads[k];
    v_[k] = kBeta2 * v_[k] + (1.0 - kBeta2) * grads[k] * grads[k];
    const double mhat = m_[k] / bc1;
    const double vhat = v_[k] / bc2;
    values[k] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
  }
}

TrainResult train_neural(NeuralModel& model, const std::vector<NeuralExample>& train,
                         const std::vector<NeuralExample>* validation,
                         const TrainConfig& config) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  if (config.learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be > 0");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  check_examples(model.task(), train);
  if (validation) check_examples(model.task(), *validation);

  Rng rng(config.seed);
  Optimizer opt(config.optimizer, config.learning_rate, model.params().size());

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  std::vector<double> best_values;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (const std::size_t i : order) {
      total += model.loss_and_gradients(train[i], true, &rng);
      opt.step(model.params());
    }
    result.epoch_loss.push_back(total / static_cast<double>(train.size()));

    if (validation) {
      const double f1 = validation_weighted_f1(model, *validation);
      if (f1 > result.best_val_f1) {
        result.best_val_f1 = f1;
        result.best_epoch = epoch;
        best_values = model.params().values();
      } else if (epoch - result.best_epoch > config.patience) {
        break;
      }
    } else {
      result.best_epoch = epoch;
    }
  }
  if (!best_values.empty()) model.params().values() = best_values;
  return result;
}

double gradient_check(NeuralModel& model, const NeuralExample& example, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
  model.loss_and_gradients(example, false, nullptr);
  const std::vector<double> analytic = model.params().grads();

  auto& values = model.params().values();
  double max_err = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double orig = values[k];
    auto at = [&](double offset) {
      values[k] = orig + offset;
      const double l = model.loss(example);
      values[k] = orig;
      return l;
    };
    // fourth-order central stencil, differences first: equal losses cancel
    // exactly, so parameters the loss does not depend on come out as 0
    const double d1 = at(eps) - at(-eps);
    const double d2 = at(2.0 * eps) - at(-2.0 * eps);
    const double numeric = (8.0 * d1 - d2) / (12.0 * eps);
    const double err =
        std::abs(analytic[k] - numeric) / std::max(1e-8, std::abs(analytic[k]) + std::abs(numeric));
    max_err = std::max(max_err, err);
  }
  return max_err;
}

}  // namespace cea
