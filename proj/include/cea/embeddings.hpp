#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>

namespace cea {

// Word vectors in GloVe text format: one "word v1 ... vd" per line. Lookups
// are lowercased; duplicate words keep the last definition.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  void insert(const std::string& word, Eigen::VectorXd vector);
  const Eigen::VectorXd* lookup(const std::string& word) const;

  // 64-bit FNV-1a over the source file bytes; recorded in model files so a
  // mismatched embedding file is rejected at prediction time.
  std::uint64_t fingerprint() const { return fingerprint_; }
  void set_fingerprint(std::uint64_t fp) { fingerprint_ = fp; }

 private:
  int dim_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
};

EmbeddingTable load_embeddings(const std::string& path, int expected_dim);

std::uint64_t fnv1a_file(const std::string& path);

}  // namespace cea
