#include "cea/embeddings.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cea/text.hpp"

namespace cea {

void EmbeddingTable::insert(const std::string& word, Eigen::VectorXd vector) {
  if (vector.size() != dim_)
    throw std::invalid_argument("embedding dimension mismatch for '" + word + "'");
  vectors_[text::lower(word)] = std::move(vector);
}

const Eigen::VectorXd* EmbeddingTable::lookup(const std::string& word) const {
  auto it = vectors_.find(text::lower(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

EmbeddingTable load_embeddings(const std::string& path, int expected_dim) {
  if (expected_dim <= 0) throw std::invalid_argument("expected_dim must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings '" + path + "'");

  EmbeddingTable table(expected_dim);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string word;
    iss >> word;
    Eigen::VectorXd v(expected_dim);
    int count = 0;
    double value;
    while (iss >> value) {
      if (count < expected_dim) v[count] = value;
      ++count;
    }
    if (count != expected_dim)
      throw std::runtime_error("embeddings line " + std::to_string(lineno) + ": expected " +
                               std::to_string(expected_dim) + " values, got " +
                               std::to_string(count));
    table.insert(word, std::move(v));
  }
  table.set_fingerprint(fnv1a_file(path));
  return table;
}

}  // namespace cea
