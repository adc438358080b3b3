#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cea/autodiff.hpp"
#include "cea/corpus.hpp"
#include "cea/embeddings.hpp"
#include "cea/rng.hpp"
#include "cea/segmenter.hpp"

namespace cea {

enum class Task { cp, cei };
enum class Variant { full, word_only, da_avg };
enum class OptimizerKind { sgd, adam };

std::string to_string(Task t);
std::string to_string(Variant v);
Task task_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

// Parameter ids of one LSTM direction (input/forget/output/candidate gates).
struct LstmGates {
  int wi, ui, bi, wf, uf, bf, wo, uo, bo, wg, ug, bg;
};

struct LstmParams {
  int input_dim = 0;
  int hidden_dim = 0;
  LstmGates fwd, bwd;
};

// Registers the 24 gate tensors of a BiLSTM under `prefix` (zero-valued).
LstmParams register_lstm_params(ad::ParamStore& params, const std::string& prefix,
                                int input_dim, int hidden_dim);

// Standard LSTM cell update for one direction; pure function used by tests
// and as the single source of the gate equations via the tape ops.
std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_step(
    const ad::ParamStore& params, const LstmParams& lstm, bool backward_dir,
    const Eigen::VectorXd& x_t, const Eigen::VectorXd& h_prev,
    const Eigen::VectorXd& c_prev);

// Mean of in-vocabulary word vectors; nullopt when every word is missing.
std::optional<Eigen::VectorXd> da_average(const EmbeddingTable& embeddings,
                                          const std::vector<std::string>& words);

struct NeuralExample {
  const Message* message = nullptr;
  std::vector<DiscourseArgument> args;
  int cp_gold = -1;            // 0 = non-causal, 1 = causal
  std::vector<int> cei_gold;   // per-argument 0/1
};

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 0.001;
  int epochs = 30;
  std::uint64_t seed = 13;
  int hidden_dim = 0;  // 0 -> embedding dim
  double dropout_p = 0.3;
  int patience = 5;    // early stopping on validation weighted F1
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean per-message NLL
  int best_epoch = -1;             // epoch whose weights were kept
  double best_val_f1 = -1.0;       // -1 when no validation set was given
};

// Per-example parameter updates. Adam uses beta1=0.9, beta2=0.999, eps=1e-8
// with bias correction.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t n_params);
  void step(ad::ParamStore& params);

 private:
  OptimizerKind kind_;
  double lr_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

// Hierarchical BiLSTM classifier. Word-level BiLSTM encodes each discourse
// argument as [h_fwd; h_bwd]; the argument-level BiLSTM runs over those
// vectors. CP reads the final states once per message, CEI reads every
// position. word_only drops the argument level (for CEI it scores each
// argument's word sequence independently); da_avg replaces the word LSTM
// with the mean embedding. Dropout sits between the two levels, so only the
// full variant has a place for it.
class NeuralModel {
 public:
  NeuralModel(Task task, Variant variant, const EmbeddingTable* embeddings,
              int hidden_dim, double dropout_p, std::uint64_t init_seed);

  // Registers parameters (all zero) without initialization; used when
  // loading a persisted model.
  static NeuralModel restore(Task task, Variant variant, const EmbeddingTable* embeddings,
                             int hidden_dim, double dropout_p);

  Task task() const { return task_; }
  Variant variant() const { return variant_; }
  int hidden_dim() const { return hidden_dim_; }
  int embedding_dim() const { return emb_dim_; }
  double dropout_p() const { return dropout_p_; }

  ad::ParamStore& params() { return params_; }
  const ad::ParamStore& params() const { return params_; }
  const EmbeddingTable& embeddings() const { return *embeddings_; }
  void set_embeddings(const EmbeddingTable* embeddings);
  const LstmParams* word_lstm() const { return word_lstm_ ? &*word_lstm_ : nullptr; }
  const LstmParams* da_lstm() const { return da_lstm_ ? &*da_lstm_ : nullptr; }

  // log-probabilities over {non-causal, causal}
  Eigen::VectorXd forward_cp(const Message& message, const std::vector<DiscourseArgument>& args,
                             bool train_mode = false, Rng* dropout_rng = nullptr);
  Eigen::VectorXd forward_cp_seeded(const Message& message,
                                    const std::vector<DiscourseArgument>& args,
                                    bool train_mode, std::uint64_t seed);

  // one log-probability pair {not-explanation, explanation} per argument
  std::vector<Eigen::VectorXd> forward_cei(const Message& message,
                                           const std::vector<DiscourseArgument>& args,
                                           bool train_mode = false, Rng* dropout_rng = nullptr);
  std::vector<Eigen::VectorXd> forward_cei_seeded(const Message& message,
                                                  const std::vector<DiscourseArgument>& args,
                                                  bool train_mode, std::uint64_t seed);

  // [h_fwd; h_bwd] encoding of a word sequence (word-level LSTM variants)
  Eigen::VectorXd encode_argument(const std::vector<std::string>& words);

  // total NLL of one example under the current parameters (no dropout)
  double loss(const NeuralExample& example);
  // same, accumulating gradients into params()
  double loss_and_gradients(const NeuralExample& example, bool train_mode, Rng* dropout_rng);

 private:
  NeuralModel(Task task, Variant variant, const EmbeddingTable* embeddings,
              int hidden_dim, double dropout_p, bool initialize, std::uint64_t init_seed);

  struct Graph {
    ad::Tape::NodeId loss = -1;
    std::vector<ad::Tape::NodeId> outputs;  // CP: one; CEI: per argument
  };
  Graph build(ad::Tape& tape, const Message& message,
              const std::vector<DiscourseArgument>& args, bool train_mode, Rng* dropout_rng,
              const int* cp_gold, const std::vector<int>* cei_gold) const;

  std::vector<ad::Tape::NodeId> embed_words(ad::Tape& tape,
                                            const std::vector<std::string>& words) const;
  ad::Tape::NodeId run_direction(ad::Tape& tape, const LstmParams& lstm, bool backward_dir,
                                 const std::vector<ad::Tape::NodeId>& xs,
                                 std::vector<ad::Tape::NodeId>* per_step) const;
  ad::Tape::NodeId encode_words_node(ad::Tape& tape,
                                     const std::vector<ad::Tape::NodeId>& xs) const;

  Task task_;
  Variant variant_;
  const EmbeddingTable* embeddings_;
  int emb_dim_;
  int hidden_dim_;
  double dropout_p_;
  ad::ParamStore params_;
  std::optional<LstmParams> word_lstm_;
  std::optional<LstmParams> da_lstm_;
  int out_w_ = -1, out_b_ = -1;
};

TrainResult train_neural(NeuralModel& model, const std::vector<NeuralExample>& train,
                         const std::vector<NeuralExample>* validation,
                         const TrainConfig& config);

// Central finite differences against the analytic gradient over every
// parameter; returns max |g_a - g_n| / max(1e-8, |g_a| + |g_n|).
double gradient_check(NeuralModel& model, const NeuralExample& example, double eps);

}  // namespace cea
