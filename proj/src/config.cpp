#include "cea/config.hpp"

#include <fstream>
#include <stdexcept>

#include "cea/text.hpp"

namespace cea {

std::string to_string(CeiTrainingMode m) {
  return m == CeiTrainingMode::causal_only ? "causal_only" : "all";
}

CeiTrainingMode cei_training_mode_from_string(const std::string& s) {
  if (s == "causal_only") return CeiTrainingMode::causal_only;
  if (s == "all") return CeiTrainingMode::all;
  throw std::invalid_argument("unknown cei training mode '" + s + "'");
}

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::sgd ? "sgd" : "adam";
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam") return OptimizerKind::adam;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!text::split_ws(line).empty())
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": expected key = value");
      continue;
    }
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\"");
      const auto b = s.find_last_not_of(" \t\"\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    try {
      if (key == "seed") base.seed = std::stoull(value);
      else if (key == "hidden_dim") base.hidden_dim = std::stoi(value);
      else if (key == "dropout_p") base.dropout_p = std::stod(value);
      else if (key == "optimizer") base.optimizer = optimizer_from_string(value);
      else if (key == "learning_rate") base.learning_rate = std::stod(value);
      else if (key == "epochs") base.epochs = std::stoi(value);
      else if (key == "patience") base.patience = std::stoi(value);
      else if (key == "svm_epochs") base.svm_epochs = std::stoi(value);
      else if (key == "svm_lambda") base.svm_lambda = std::stod(value);
      else if (key == "tagger_epochs") base.tagger_epochs = std::stoi(value);
      else if (key == "alpha_fwe") base.alpha_fwe = std::stod(value);
      else if (key == "min_doc_count") base.min_doc_count = std::stol(value);
      else if (key == "cei_variant") base.cei_variant = variant_from_string(value);
      else if (key == "cei_training_mode")
        base.cei_training_mode = cei_training_mode_from_string(value);
      else if (key == "pipeline_mode") base.pipeline_mode = pipeline_mode_from_string(value);
      else
        throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

}  // namespace cea
