#include "cea/model_io.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cea {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts are unsupported");

using json = nlohmann::json;  // std::map-backed: keys serialize sorted

namespace {

constexpr char kMagic[8] = {'C', 'E', 'A', 'M', 'O', 'D', 'E', 'L'};

std::string fingerprint_hex(std::uint64_t fp) {
  std::ostringstream os;
  os << std::hex << fp;
  return os.str();
}

std::uint64_t fingerprint_from_hex(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("model file truncated");
  return v;
}

void write_f32_array(std::ostream& out, const std::vector<double>& values) {
  write_u32(out, static_cast<std::uint32_t>(values.size()));
  for (const double v : values) {
    const float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), sizeof(f));
  }
}

std::vector<double> read_f32_array(std::istream& in, std::size_t expected) {
  const std::uint32_t n = read_u32(in);
  if (n != expected)
    throw std::runtime_error("model file array length mismatch: expected " +
                             std::to_string(expected) + ", found " + std::to_string(n));
  std::vector<double> values(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    float f = 0.0f;
    in.read(reinterpret_cast<char*>(&f), sizeof(f));
    if (!in) throw std::runtime_error("model file truncated");
    values[i] = static_cast<double>(f);
  }
  return values;
}

json tagger_to_json(const PosTagger& tagger) {
  json weights = json::object();
  const auto& tags = tagset();
  for (const auto& [feature, row] : tagger.weights()) {
    json cell = json::object();
    for (std::size_t t = 0; t < tags.size(); ++t)
      if (row[t] != 0.0) cell[tags[t]] = row[t];
    weights[feature] = std::move(cell);
  }
  return json{{"averaged", tagger.trained()}, {"weights", std::move(weights)}};
}

PosTagger tagger_from_json(const json& j) {
  const auto& tags = tagset();
  PosTagger::WeightMap weights;
  for (const auto& [feature, cell] : j.at("weights").items()) {
    std::vector<double> row(tags.size(), 0.0);
    for (const auto& [tag, w] : cell.items()) {
      for (std::size_t t = 0; t < tags.size(); ++t)
        if (tags[t] == tag) row[t] = w.get<double>();
    }
    weights.emplace(feature, std::move(row));
  }
  PosTagger tagger;
  tagger.set_weights(std::move(weights), j.at("averaged").get<bool>());
  return tagger;
}

}  // namespace

void PipelineModel::finalize() {
  for (double& w : cp.weights) w = static_cast<double>(static_cast<float>(w));
  cp.bias = static_cast<double>(static_cast<float>(cp.bias));
  if (cei) cei->params().round_to_f32();
}

void save_model(const PipelineModel& model, const std::string& path) {
  if (!model.cei) throw std::invalid_argument("model has no CEI component");

  json manifest;
  manifest["format_version"] = model.format_version;
  manifest["tagger"] = tagger_to_json(model.tagger);
  manifest["connective_lexicon"] = model.lexicon.to_lines();

  json sentiment = json::object();
  for (const auto& [word, pol] : model.sentiment.entries())
    sentiment[word] = pol > 0 ? "positive" : "negative";
  manifest["sentiment_lexicon"] = std::move(sentiment);

  json space;
  space["alpha"] = model.cp.feature_space.selection_alpha;
  space["selected"] = model.cp.feature_space.selected;
  json df = json::object();
  for (const auto& name : model.cp.feature_space.selected) {
    auto it = model.cp.feature_space.doc_frequency.find(name);
    if (it != model.cp.feature_space.doc_frequency.end()) df[name] = it->second;
  }
  space["doc_frequency"] = std::move(df);
  manifest["feature_space"] = std::move(space);

  manifest["cp"] = json{{"lambda", model.cp.lambda}, {"bias", model.cp.bias}};

  const auto& cei = *model.cei;
  json cei_json;
  cei_json["task"] = to_string(cei.task());
  cei_json["variant"] = to_string(cei.variant());
  cei_json["hidden_dim"] = cei.hidden_dim();
  cei_json["dropout_p"] = cei.dropout_p();
  json params = json::array();
  for (const auto& e : cei.params().entries())
    params.push_back(json{{"name", e.name}, {"rows", e.rows}, {"cols", e.cols}});
  cei_json["params"] = std::move(params);
  manifest["cei"] = std::move(cei_json);

  manifest["embedding"] = json{{"fingerprint", fingerprint_hex(model.embedding_fingerprint)},
                               {"dim", model.embedding_dim}};

  const RunConfig& c = model.config;
  manifest["config"] = json{{"seed", c.seed},
                            {"hidden_dim", c.hidden_dim},
                            {"dropout_p", c.dropout_p},
                            {"optimizer", to_string(c.optimizer)},
                            {"learning_rate", c.learning_rate},
                            {"epochs", c.epochs},
                            {"patience", c.patience},
                            {"svm_epochs", c.svm_epochs},
                            {"svm_lambda", c.svm_lambda},
                            {"tagger_epochs", c.tagger_epochs},
                            {"alpha_fwe", c.alpha_fwe},
                            {"min_doc_count", c.min_doc_count},
                            {"cei_variant", to_string(c.cei_variant)},
                            {"cei_training_mode", to_string(c.cei_training_mode)},
                            {"pipeline_mode", to_string(c.pipeline_mode)}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  const std::string encoded = manifest.dump();
  write_u32(out, static_cast<std::uint32_t>(encoded.size()));
  out.write(encoded.data(), static_cast<std::streamsize>(encoded.size()));

  write_f32_array(out, model.cp.weights);
  const auto& store = cei.params();
  for (const auto& e : store.entries()) {
    std::vector<double> buf(store.values().begin() + static_cast<std::ptrdiff_t>(e.offset),
                            store.values().begin() +
                                static_cast<std::ptrdiff_t>(e.offset) +
                                static_cast<std::ptrdiff_t>(e.rows) * e.cols);
    write_f32_array(out, buf);
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

namespace {

json read_manifest(std::istream& in, const std::string& path) {
  char magic[sizeof(kMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::string_view(magic, sizeof(magic)) != std::string_view(kMagic, sizeof(kMagic)))
    throw std::runtime_error("'" + path + "' is not a model file");
  const std::uint32_t len = read_u32(in);
  std::string encoded(len, '\0');
  in.read(encoded.data(), len);
  if (!in) throw std::runtime_error("model file truncated");
  json manifest = json::parse(encoded, nullptr, false);
  if (manifest.is_discarded())
    throw std::runtime_error("model manifest is corrupt");
  const int version = manifest.at("format_version").get<int>();
  if (version != PipelineModel::kFormatVersion)
    throw std::runtime_error("unsupported model format version " + std::to_string(version) +
                             " (supported: " + std::to_string(PipelineModel::kFormatVersion) +
                             ")");
  return manifest;
}

}  // namespace

ModelInfo read_model_info(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const json manifest = read_manifest(in, path);
  ModelInfo info;
  info.format_version = manifest.at("format_version").get<int>();
  info.embedding_dim = manifest.at("embedding").at("dim").get<int>();
  info.embedding_fingerprint =
      fingerprint_from_hex(manifest.at("embedding").at("fingerprint").get<std::string>());
  return info;
}

std::pair<PosTagger, ConnectiveLexicon> load_tagger_and_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const json manifest = read_manifest(in, path);
  ConnectiveLexicon lexicon;
  for (const auto& line : manifest.at("connective_lexicon"))
    lexicon.add(line.get<std::string>());
  return {tagger_from_json(manifest.at("tagger")), std::move(lexicon)};
}

PipelineModel load_model(const std::string& path, const EmbeddingTable& embeddings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const json manifest = read_manifest(in, path);

  PipelineModel model;
  model.format_version = manifest.at("format_version").get<int>();

  model.embedding_dim = manifest.at("embedding").at("dim").get<int>();
  model.embedding_fingerprint =
      fingerprint_from_hex(manifest.at("embedding").at("fingerprint").get<std::string>());
  if (embeddings.dim() != model.embedding_dim)
    throw std::runtime_error("embedding dimension mismatch: model wants " +
                             std::to_string(model.embedding_dim) + ", table has " +
                             std::to_string(embeddings.dim()));
  if (embeddings.fingerprint() != model.embedding_fingerprint)
    throw std::runtime_error("embedding fingerprint mismatch: the model was trained "
                             "with a different embedding file");

  model.tagger = tagger_from_json(manifest.at("tagger"));
  for (const auto& line : manifest.at("connective_lexicon"))
    model.lexicon.add(line.get<std::string>());
  for (const auto& [word, pol] : manifest.at("sentiment_lexicon").items())
    model.sentiment.add(word, pol.get<std::string>() == "positive");

  FeatureSpace space;
  space.selection_alpha = manifest.at("feature_space").at("alpha").get<double>();
  for (const auto& name : manifest.at("feature_space").at("selected"))
    space.selected.push_back(name.get<std::string>());
  for (const auto& [name, count] : manifest.at("feature_space").at("doc_frequency").items())
    space.doc_frequency[name] = count.get<long>();
  space.reindex();

  model.cp.feature_space = std::move(space);
  model.cp.lambda = manifest.at("cp").at("lambda").get<double>();
  model.cp.bias = manifest.at("cp").at("bias").get<double>();
  model.cp.weights = read_f32_array(in, model.cp.feature_space.selected.size());

  const auto& cei_json = manifest.at("cei");
  auto cei = std::make_unique<NeuralModel>(NeuralModel::restore(
      task_from_string(cei_json.at("task").get<std::string>()),
      variant_from_string(cei_json.at("variant").get<std::string>()), &embeddings,
      cei_json.at("hidden_dim").get<int>(), cei_json.at("dropout_p").get<double>()));

  const auto& entries = cei->params().entries();
  const auto& declared = cei_json.at("params");
  if (declared.size() != entries.size())
    throw std::runtime_error("model file parameter list mismatch");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (declared[i].at("name").get<std::string>() != e.name ||
        declared[i].at("rows").get<int>() != e.rows ||
        declared[i].at("cols").get<int>() != e.cols)
      throw std::runtime_error("model file parameter '" + e.name + "' shape mismatch");
    const auto buf = read_f32_array(in, static_cast<std::size_t>(e.rows) * e.cols);
    std::copy(buf.begin(), buf.end(),
              cei->params().values().begin() + static_cast<std::ptrdiff_t>(e.offset));
  }
  model.cei = std::move(cei);

  const auto& cj = manifest.at("config");
  RunConfig rc;
  rc.seed = cj.at("seed").get<std::uint64_t>();
  rc.hidden_dim = cj.at("hidden_dim").get<int>();
  rc.dropout_p = cj.at("dropout_p").get<double>();
  rc.optimizer = optimizer_from_string(cj.at("optimizer").get<std::string>());
  rc.learning_rate = cj.at("learning_rate").get<double>();
  rc.epochs = cj.at("epochs").get<int>();
  rc.patience = cj.at("patience").get<int>();
  rc.svm_epochs = cj.at("svm_epochs").get<int>();
  rc.svm_lambda = cj.at("svm_lambda").get<double>();
  rc.tagger_epochs = cj.at("tagger_epochs").get<int>();
  rc.alpha_fwe = cj.at("alpha_fwe").get<double>();
  rc.min_doc_count = cj.at("min_doc_count").get<long>();
  rc.cei_variant = variant_from_string(cj.at("cei_variant").get<std::string>());
  rc.cei_training_mode =
      cei_training_mode_from_string(cj.at("cei_training_mode").get<std::string>());
  rc.pipeline_mode = pipeline_mode_from_string(cj.at("pipeline_mode").get<std::string>());
  model.config = rc;

  return model;
}

}  // namespace cea
