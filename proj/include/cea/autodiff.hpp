#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cea/rng.hpp"

namespace cea::ad {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Flat storage for all trainable parameters of a model. Gradients live in a
// parallel buffer; optimizers and serialization only ever see the flat
// arrays, which keeps training deterministic and round-trips exact.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    std::size_t offset;
    int rows, cols;
  };

  // Registration order is the storage order (and the file order).
  int add(const std::string& name, int rows, int cols);
  int id_of(const std::string& name) const;

  Eigen::Map<Mat> value(int id);
  Eigen::Map<const Mat> value(int id) const;
  Eigen::Map<Mat> grad(int id);
  const Entry& entry(int id) const { return entries_[static_cast<std::size_t>(id)]; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& grads() { return grads_; }

  void zero_grad();
  void init_uniform(int id, double bound, Rng& rng);
  // Rounds every parameter to the nearest float32; models are stored on disk
  // in single precision, so a trained model is snapped to the file grid
  // before evaluation and saving.
  void round_to_f32();

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
  std::vector<double> values_, grads_;
};

// Reverse-mode tape over vector-valued nodes. Nodes are created in forward
// (topological) order; backward() sweeps the tape once in reverse.
class Tape {
 public:
  using NodeId = int;

  explicit Tape(ParamStore* params) : params_(params) {}

  NodeId constant(Vec v);
  NodeId zeros(int n);

  // y = W x [+ U h] [+ b]  with W, U, b parameter ids
  NodeId linear(int w_id, NodeId x, int u_id = -1, NodeId h = -1, int b_id = -1);
  NodeId sigmoid(NodeId x);
  NodeId tanh(NodeId x);
  NodeId add(NodeId a, NodeId b);
  NodeId emul(NodeId a, NodeId b);
  NodeId concat(NodeId a, NodeId b);
  NodeId mean(const std::vector<NodeId>& xs);
  NodeId mask(NodeId x, Vec mask);  // elementwise scale (dropout)
  NodeId log_softmax(NodeId x);
  NodeId nll(NodeId log_probs, int gold);           // scalar node
  NodeId sum(const std::vector<NodeId>& scalars);   // scalar node

  const Vec& value(NodeId id) const { return values_[static_cast<std::size_t>(id)]; }
  const Vec& grad_of(NodeId id) const { return grads_[static_cast<std::size_t>(id)]; }

  // Seeds d(root)/d(root) = 1 and accumulates into ParamStore grads.
  void backward(NodeId root);

 private:
  NodeId push(Vec value, std::function<void()> back);

  ParamStore* params_;
  std::vector<Vec> values_;
  std::vector<Vec> grads_;
  std::vector<std::function<void()>> backs_;
};

}  // namespace cea::ad
