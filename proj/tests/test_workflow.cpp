#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cea/synth.hpp"
#include "cea/workflow.hpp"

using namespace cea;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Trained {
  fs::path dir;
  EmbeddingTable embeddings;
  Corpus train, val, test;
  PipelineModel model;

  Trained() {
    dir = fs::temp_directory_path() / "cea_workflow_test";
    fs::create_directories(dir);
    write_synth_embeddings((dir / "emb.txt").string(), 6, 21);
    embeddings = load_embeddings((dir / "emb.txt").string(), 6);

    SynthOptions opt;
    opt.n_messages = 150;
    opt.seed = 21;
    const Corpus corpus = synth_corpus(opt);
    split_corpus(corpus, 0.7, 0.15, train, val, test);

    RunConfig config;
    config.seed = 21;
    config.epochs = 6;
    config.svm_epochs = 15;
    config.tagger_epochs = 3;
    config.hidden_dim = 6;
    model = train_pipeline(config, train, val, embeddings, ConnectiveLexicon::defaults(),
                           SentimentLexicon::defaults());
  }
};

Trained& fixture() {
  static Trained t;
  return t;
}

}  // namespace

TEST_CASE("two_stage gating: CEI runs exactly on CP-positive messages") {
  auto& fx = fixture();
  long cp_positive = 0, cei_invoked = 0;
  for (const auto& original : fx.test.messages) {
    Message m = original;
    prepare_message(m, fx.model.tagger);
    const PipelineResult r = run_pipeline(m, fx.model.lexicon, fx.model.sentiment,
                                          fx.model.cp, *fx.model.cei,
                                          PipelineMode::two_stage);
    if (r.causality) ++cp_positive;
    if (r.cei_invoked) ++cei_invoked;
  }
  CHECK(cei_invoked == cp_positive);
}

TEST_CASE("predict_line: annotations added, input fields preserved, reparseable") {
  auto& fx = fixture();
  const std::string line =
      R"({"id":"p1","text":"my parser failed because i was tired.","user_id":"u9","custom":42})";
  const std::string out = predict_line(line, 1, fx.model, PipelineMode::two_stage);

  const ojson j = ojson::parse(out);
  CHECK(j.at("id") == "p1");
  CHECK(j.at("custom") == 42);  // unknown input fields ride along
  CHECK(j.at("user_id") == "u9");
  CHECK(j.contains("causality"));
  CHECK(j.at("arguments").is_array());
  CHECK(j.at("explanations").is_array());
  CHECK(j.at("tokens").is_array());

  // output re-parses under the corpus schema (prediction fields stripped the
  // same way load_predictions does)
  ojson sanitized = j;
  sanitized.erase("causality");
  sanitized.erase("explanation_span");
  CHECK_NOTHROW(message_from_json_line(sanitized.dump(), 1));

  SUBCASE("causal toy message flags the 'because' argument") {
    CHECK(j.at("causality") == true);
    REQUIRE(j.at("arguments").size() == 2);
    REQUIRE(j.at("explanations").size() == 1);
    CHECK(j.at("explanations")[0] == 1);
  }
  SUBCASE("non-causal message has empty explanations") {
    const std::string quiet =
        R"({"id":"p2","text":"my parser worked today."})";
    const ojson q = ojson::parse(predict_line(quiet, 1, fx.model, PipelineMode::two_stage));
    CHECK(q.at("causality") == false);
    CHECK(q.at("explanations").empty());
  }
}

TEST_CASE("segment_line adds arguments and tokens") {
  auto& fx = fixture();
  const std::string line = R"({"id":"s1","text":"i failed because i was tired."})";
  const ojson j = ojson::parse(segment_line(line, 1, &fx.model.tagger, fx.model.lexicon));
  CHECK(j.at("arguments").size() == 2);
  CHECK(j.at("tokens").is_array());

  SUBCASE("without a tagger, untagged text errors") {
    CHECK_THROWS_WITH_AS(segment_line(line, 1, nullptr, fx.model.lexicon),
                         "no tag source", std::runtime_error);
  }
  SUBCASE("pre-tagged input needs no tagger") {
    const std::string tagged =
        R"({"id":"s2","text":"ok :(","tokens":[{"t":"ok","pos":"!","start":0,"end":2},{"t":":(","pos":"E","start":3,"end":5}]})";
    const ojson out = ojson::parse(segment_line(tagged, 1, nullptr, fx.model.lexicon));
    CHECK(out.at("arguments").size() == 2);  // plain + emoji argument
  }
}

TEST_CASE("jsonl streaming: parallel output equals serial output, in order") {
  auto& fx = fixture();
  std::ostringstream serial, parallel;
  auto fn = [&](const std::string& line, std::size_t lineno) {
    return predict_line(line, lineno, fx.model, PipelineMode::two_stage);
  };
  {
    std::ostringstream input;
    for (const auto& m : fx.test.messages) input << message_to_json_line(m) << '\n';
    std::istringstream in1(input.str()), in2(input.str());
    process_jsonl_stream(in1, serial, 1, fn);
    process_jsonl_stream(in2, parallel, 4, fn);
  }
  CHECK(serial.str() == parallel.str());
}

TEST_CASE("predictions file round trip and task label extraction") {
  auto& fx = fixture();
  const auto pred_path = (fx.dir / "preds.jsonl").string();
  {
    std::ostringstream input;
    for (const auto& m : fx.test.messages) input << message_to_json_line(m) << '\n';
    std::istringstream in(input.str());
    std::ofstream out(pred_path);
    process_jsonl_stream(in, out, 1, [&](const std::string& line, std::size_t lineno) {
      return predict_line(line, lineno, fx.model, PipelineMode::two_stage);
    });
  }
  const auto preds = load_predictions(pred_path);
  CHECK(preds.size() == fx.test.messages.size());

  const auto [cp_pred, cp_gold] = labels_for_task(fx.test, preds, "cp");
  CHECK(cp_pred.size() == fx.test.messages.size());
  const double cp_f1 = evaluate(cp_pred, cp_gold).weighted_f1;

  // the same numbers fall out of the in-memory path
  const CorpusPredictions direct = predict_corpus(fx.test, fx.model, PipelineMode::two_stage);
  CHECK(evaluate(direct.cp_pred, direct.cp_gold).weighted_f1 == doctest::Approx(cp_f1));

  const auto [pipe_pred, pipe_gold] = labels_for_task(fx.test, preds, "pipeline");
  CHECK(pipe_pred.size() == direct.pipe_pred.size());
  CHECK(evaluate(pipe_pred, pipe_gold).weighted_f1 ==
        doctest::Approx(evaluate(direct.pipe_pred, direct.pipe_gold).weighted_f1));

  CHECK_THROWS(labels_for_task(fx.test, preds, "nonsense"));
}

TEST_CASE("threads env variable parsing") {
#ifdef _WIN32
#else
  setenv("CAUSE_PIPELINE_THREADS", "3", 1);
  CHECK(pipeline_threads_from_env() == 3);
  setenv("CAUSE_PIPELINE_THREADS", "0", 1);
  CHECK(pipeline_threads_from_env() == 1);  // clamped
  unsetenv("CAUSE_PIPELINE_THREADS");
  CHECK(pipeline_threads_from_env() == 1);
#endif
}

TEST_CASE("cli binary: exit codes") {
#ifdef CEA_CLI_PATH
  const std::string cli = CEA_CLI_PATH;
  CHECK(std::system((cli + " --help > /dev/null 2>&1").c_str()) == 0);
  CHECK(std::system((cli + " eval --gold /nope.jsonl --pred /nope.jsonl > /dev/null 2>&1")
                        .c_str()) != 0);
  CHECK(std::system((cli + " bogus-subcommand > /dev/null 2>&1").c_str()) != 0);
  CHECK(std::system((cli + " predict --model /nope --embeddings /nope > /dev/null 2>&1")
                        .c_str()) != 0);
#endif
}
