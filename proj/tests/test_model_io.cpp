#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cea/model_io.hpp"
#include "cea/synth.hpp"
#include "cea/workflow.hpp"

using namespace cea;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  fs::path dir;
  EmbeddingTable embeddings;
  Corpus train, val, test;
  RunConfig config;

  Fixture() {
    dir = fs::temp_directory_path() / "cea_model_io_test";
    fs::create_directories(dir);
    const auto emb_path = (dir / "embeddings.txt").string();
    write_synth_embeddings(emb_path, 6, 42);
    embeddings = load_embeddings(emb_path, 6);

    SynthOptions opt;
    opt.n_messages = 120;
    opt.seed = 42;
    const Corpus corpus = synth_corpus(opt);
    split_corpus(corpus, 0.7, 0.15, train, val, test);

    config.seed = 42;
    config.epochs = 3;
    config.svm_epochs = 10;
    config.tagger_epochs = 2;
    config.hidden_dim = 6;
  }

  PipelineModel train_once() const {
    return train_pipeline(config, train, val, embeddings, ConnectiveLexicon::defaults(),
                          SentimentLexicon::defaults());
  }
};

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("model save/load round trip") {
  const Fixture fx;
  PipelineModel model = fx.train_once();
  const auto path = (fx.dir / "model.cea").string();
  save_model(model, path);

  SUBCASE("parameters survive bit-exactly") {
    const PipelineModel loaded = load_model(path, fx.embeddings);
    CHECK(loaded.cp.weights == model.cp.weights);
    CHECK(loaded.cp.bias == model.cp.bias);
    CHECK(loaded.cp.feature_space.selected == model.cp.feature_space.selected);
    CHECK(loaded.cei->params().values() == model.cei->params().values());
    CHECK(loaded.embedding_fingerprint == model.embedding_fingerprint);
    CHECK(loaded.config.seed == model.config.seed);
    CHECK(loaded.lexicon.size() == model.lexicon.size());
  }

  SUBCASE("save -> load -> save is byte-identical") {
    const PipelineModel loaded = load_model(path, fx.embeddings);
    const auto path2 = (fx.dir / "model2.cea").string();
    save_model(loaded, path2);
    CHECK(file_bytes(path) == file_bytes(path2));
  }

  SUBCASE("identical seeds give byte-identical model files") {
    PipelineModel again = fx.train_once();
    const auto path2 = (fx.dir / "model_again.cea").string();
    save_model(again, path2);
    CHECK(file_bytes(path) == file_bytes(path2));
  }

  SUBCASE("round trip preserves predictions exactly") {
    PipelineModel loaded = load_model(path, fx.embeddings);
    const CorpusPredictions a = predict_corpus(fx.test, model, PipelineMode::two_stage);
    const CorpusPredictions b = predict_corpus(fx.test, loaded, PipelineMode::two_stage);
    CHECK(a.cp_pred == b.cp_pred);
    CHECK(a.pipe_pred == b.pipe_pred);
  }

  SUBCASE("manifest-only reads") {
    const ModelInfo info = read_model_info(path);
    CHECK(info.format_version == PipelineModel::kFormatVersion);
    CHECK(info.embedding_dim == 6);
    CHECK(info.embedding_fingerprint == fx.embeddings.fingerprint());
    const auto [tagger, lexicon] = load_tagger_and_lexicon(path);
    CHECK(tagger.trained());
    CHECK(lexicon.contains({"because"}));
  }
}

TEST_CASE("model file error paths") {
  const Fixture fx;
  PipelineModel model = fx.train_once();
  const auto path = (fx.dir / "model_err.cea").string();
  save_model(model, path);

  SUBCASE("truncated file") {
    const std::string bytes = file_bytes(path);
    const auto cut = (fx.dir / "cut.cea").string();
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_WITH_AS(load_model(cut, fx.embeddings), doctest::Contains("truncated"),
                         std::runtime_error);
  }

  SUBCASE("wrong magic") {
    const auto bad = (fx.dir / "bad.cea").string();
    std::ofstream out(bad, std::ios::binary);
    out << "definitely not a model";
    out.close();
    CHECK_THROWS_WITH_AS(load_model(bad, fx.embeddings), doctest::Contains("not a model"),
                         std::runtime_error);
  }

  SUBCASE("unsupported future format version") {
    std::string bytes = file_bytes(path);
    const auto pos = bytes.find("\"format_version\":1");
    REQUIRE(pos != std::string::npos);
    bytes.replace(pos, 18, "\"format_version\":9");
    const auto future = (fx.dir / "future.cea").string();
    std::ofstream out(future, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    CHECK_THROWS_WITH_AS(load_model(future, fx.embeddings),
                         doctest::Contains("unsupported model format version 9"),
                         std::runtime_error);
  }

  SUBCASE("embedding fingerprint mismatch") {
    const auto other_emb_path = (fx.dir / "other_emb.txt").string();
    write_synth_embeddings(other_emb_path, 6, 999);
    const EmbeddingTable other = load_embeddings(other_emb_path, 6);
    CHECK_THROWS_WITH_AS(load_model(path, other), doctest::Contains("fingerprint"),
                         std::runtime_error);
  }

  SUBCASE("embedding dimension mismatch") {
    const auto small_path = (fx.dir / "small_emb.txt").string();
    write_synth_embeddings(small_path, 3, 42);
    const EmbeddingTable small = load_embeddings(small_path, 3);
    CHECK_THROWS_WITH_AS(load_model(path, small), doctest::Contains("dimension"),
                         std::runtime_error);
  }
}

TEST_CASE("run config file parsing") {
  const auto dir = fs::temp_directory_path();
  const auto path = (dir / "cea_config_test.toml").string();
  {
    std::ofstream out(path);
    out << "# training setup\n";
    out << "seed = 7\n";
    out << "optimizer = \"sgd\"\n";
    out << "learning_rate = 0.01\n";
    out << "cei_training_mode = all\n";
    out << "min_doc_count = 3\n";
  }
  const RunConfig rc = load_run_config(path);
  CHECK(rc.seed == 7);
  CHECK(rc.optimizer == OptimizerKind::sgd);
  CHECK(rc.learning_rate == doctest::Approx(0.01));
  CHECK(rc.cei_training_mode == CeiTrainingMode::all);
  CHECK(rc.min_doc_count == 3);
  CHECK(rc.epochs == 30);  // untouched default

  SUBCASE("unknown keys are rejected with the line number") {
    const auto bad = (dir / "cea_config_bad.toml").string();
    std::ofstream out(bad);
    out << "seed = 1\n";
    out << "typo_key = 5\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_run_config(bad), doctest::Contains("line 2"),
                         std::runtime_error);
  }
}
