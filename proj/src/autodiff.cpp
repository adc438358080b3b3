#include "cea/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace cea::ad {

int ParamStore::add(const std::string& name, int rows, int cols) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  Entry e{name, values_.size(), rows, cols};
  const int id = static_cast<int>(entries_.size());
  entries_.push_back(e);
  index_.emplace(name, id);
  values_.resize(values_.size() + static_cast<std::size_t>(rows) * cols, 0.0);
  grads_.resize(values_.size(), 0.0);
  return id;
}

int ParamStore::id_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown parameter '" + name + "'");
  return it->second;
}

Eigen::Map<Mat> ParamStore::value(int id) {
  const Entry& e = entries_[static_cast<std::size_t>(id)];
  return {values_.data() + e.offset, e.rows, e.cols};
}

Eigen::Map<const Mat> ParamStore::value(int id) const {
  const Entry& e = entries_[static_cast<std::size_t>(id)];
  return {values_.data() + e.offset, e.rows, e.cols};
}

Eigen::Map<Mat> ParamStore::grad(int id) {
  const Entry& e = entries_[static_cast<std::size_t>(id)];
  return {grads_.data() + e.offset, e.rows, e.cols};
}

void ParamStore::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

void ParamStore::init_uniform(int id, double bound, Rng& rng) {
  auto v = value(id);
  for (int c = 0; c < v.cols(); ++c)
    for (int r = 0; r < v.rows(); ++r) v(r, c) = rng.next_uniform(-bound, bound);
}

void ParamStore::round_to_f32() {
  for (double& v : values_) v = static_cast<double>(static_cast<float>(v));
}

Tape::NodeId Tape::push(Vec value, std::function<void()> back) {
  const NodeId id = static_cast<NodeId>(values_.size());
  values_.push_back(std::move(value));
  grads_.emplace_back();
  backs_.push_back(std::move(back));
  return id;
}

Tape::NodeId Tape::constant(Vec v) {
  return push(std::move(v), nullptr);
}

Tape::NodeId Tape::zeros(int n) { return constant(Vec::Zero(n)); }

Tape::NodeId Tape::linear(int w_id, NodeId x, int u_id, NodeId h, int b_id) {
  Vec out = params_->value(w_id) * values_[static_cast<std::size_t>(x)];
  if (u_id >= 0) out += params_->value(u_id) * values_[static_cast<std::size_t>(h)];
  if (b_id >= 0) out += params_->value(b_id).col(0);
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, w_id, x, u_id, h, b_id]() {
    const Vec& g = grads_[static_cast<std::size_t>(id)];
    params_->grad(w_id) += g * values_[static_cast<std::size_t>(x)].transpose();
    grads_[static_cast<std::size_t>(x)] += params_->value(w_id).transpose() * g;
    if (u_id >= 0) {
      params_->grad(u_id) += g * values_[static_cast<std::size_t>(h)].transpose();
      grads_[static_cast<std::size_t>(h)] += params_->value(u_id).transpose() * g;
    }
    if (b_id >= 0) params_->grad(b_id).col(0) += g;
  };
  return id;
}

Tape::NodeId Tape::sigmoid(NodeId x) {
  const Vec& in = values_[static_cast<std::size_t>(x)];
  Vec out = in.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, x]() {
    const Vec& y = values_[static_cast<std::size_t>(id)];
    const Vec& g = grads_[static_cast<std::size_t>(id)];
    grads_[static_cast<std::size_t>(x)].array() += g.array() * y.array() * (1.0 - y.array());
  };
  return id;
}

Tape::NodeId Tape::tanh(NodeId x) {
  Vec out = values_[static_cast<std::size_t>(x)].array().tanh();
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, x]() {
    const Vec& y = values_[static_cast<std::size_t>(id)];
    const Vec& g = grads_[static_cast<std::size_t>(id)];
    grads_[static_cast<std::size_t>(x)].array() += g.array() * (1.0 - y.array().square());
  };
  return id;
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  Vec out = values_[static_cast<std::size_t>(a)] + values_[static_cast<std::size_t>(b)];
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, a, b]() {
    const Vec& g = grads_[static_cast<std::size_t>(id)];
    grads_[static_cast<std::size_t>(a)] += g;
    grads_[static_cast<std::size_t>(b)] += g;
  };
  return id;
}

Tape::NodeId Tape::emul(NodeId a, NodeId b) {
  Vec out = values_[static_cast<std::size_t>(a)].cwiseProduct(values_[static_cast<std::size_t>(b)]);
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, a, b]() {
    const Vec& g = grads_[static_cast<std::size_t>(id)];
    grads_[static_cast<std::size_t>(a)].array() +=
        g.array() * values_[static_cast<std::size_t>(b)].array();
    grads_[static_cast<std::size_t>(b)].array() +=
        g.array() * values_[static_cast<std::size_t>(a)].array();
  };
  return id;
}

Tape::NodeId Tape::concat(NodeId a, NodeId b) {
  const Vec& va = values_[static_cast<std::size_t>(a)];
  const Vec& vb = values_[static_cast<std::size_t>(b)];
  const auto na = va.size();  // push() may reallocate values_, read sizes first
  Vec out(va.size() + vb.size());
  out << va, vb;
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, a, b, na]() {
    const Vec& g = grads_[static_cast<std::size_t>(id)];
    grads_[static_cast<std::size_t>(a)] += g.head(na);
    grads_[static_cast<std::size_t>(b)] += g.tail(g.size() - na);
  };
  return id;
}

Tape::NodeId Tape::mean(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of zero nodes");
  Vec out = values_[static_cast<std::size_t>(xs[0])];
  for (std::size_t i = 1; i < xs.size(); ++i) out += values_[static_cast<std::size_t>(xs[i])];
  out /= static_cast<double>(xs.size());
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, xs]() {
    const Vec g = grads_[static_cast<std::size_t>(id)] / static_cast<double>(xs.size());
    for (const NodeId x : xs) grads_[static_cast<std::size_t>(x)] += g;
  };
  return id;
}

Tape::NodeId Tape::mask(NodeId x, Vec m) {
  Vec out = values_[static_cast<std::size_t>(x)].cwiseProduct(m);
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, x, m = std::move(m)]() {
    grads_[static_cast<std::size_t>(x)].array() +=
        grads_[static_cast<std::size_t>(id)].array() * m.array();
  };
  return id;
}

Tape::NodeId Tape::log_softmax(NodeId x) {
  const Vec& in = values_[static_cast<std::size_t>(x)];
  const double mx = in.maxCoeff();
  const double lse = mx + std::log((in.array() - mx).exp().sum());
  Vec out = in.array() - lse;
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, x]() {
    const Vec& y = values_[static_cast<std::size_t>(id)];
    const Vec& g = grads_[static_cast<std::size_t>(id)];
    grads_[static_cast<std::size_t>(x)] += g - y.array().exp().matrix() * g.sum();
  };
  return id;
}

Tape::NodeId Tape::nll(NodeId log_probs, int gold) {
  const Vec& lp = values_[static_cast<std::size_t>(log_probs)];
  if (gold < 0 || gold >= lp.size()) throw std::invalid_argument("gold class out of range");
  Vec out(1);
  out[0] = -lp[gold];
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, log_probs, gold]() {
    grads_[static_cast<std::size_t>(log_probs)][gold] -= grads_[static_cast<std::size_t>(id)][0];
  };
  return id;
}

Tape::NodeId Tape::sum(const std::vector<NodeId>& scalars) {
  if (scalars.empty()) throw std::invalid_argument("sum of zero nodes");
  Vec out(1);
  out[0] = 0.0;
  for (const NodeId s : scalars) out[0] += values_[static_cast<std::size_t>(s)][0];
  const NodeId id = push(std::move(out), nullptr);
  backs_[static_cast<std::size_t>(id)] = [this, id, scalars]() {
    const double g = grads_[static_cast<std::size_t>(id)][0];
    for (const NodeId s : scalars) grads_[static_cast<std::size_t>(s)][0] += g;
  };
  return id;
}

void Tape::backward(NodeId root) {
  for (std::size_t i = 0; i < values_.size(); ++i)
    grads_[i] = Vec::Zero(values_[i].size());
  grads_[static_cast<std::size_t>(root)][0] = 1.0;
  for (std::size_t i = values_.size(); i-- > 0;)
    if (backs_[i]) backs_[i]();
}

}  // namespace cea::ad
