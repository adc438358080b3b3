#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cea/neural.hpp"
#include "helpers.hpp"

using namespace cea;
using cea::testing::make_message;

namespace {

EmbeddingTable tiny_embeddings(int dim, std::uint64_t seed = 11) {
  EmbeddingTable emb(dim);
  Rng rng(seed);
  for (const char* w : {"good", "bad", "alpha", "beta", "gamma", "delta", "mid"}) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v[k] = rng.next_uniform(-0.5, 0.5);
    emb.insert(w, std::move(v));
  }
  return emb;
}

NeuralExample example_for(const Message& m, Task task, int gold_arg) {
  NeuralExample ex;
  ex.message = &m;
  const int n = static_cast<int>(m.tokens.size());
  // two arguments split in the middle
  ex.args = {{0, n / 2, ArgKind::plain, std::nullopt},
             {n / 2 + 1, n - 1, ArgKind::plain, std::nullopt}};
  if (task == Task::cp) {
    ex.cp_gold = gold_arg;
  } else {
    ex.cei_gold.assign(ex.args.size(), 0);
    ex.cei_gold[static_cast<std::size_t>(gold_arg)] = 1;
  }
  return ex;
}

}  // namespace

TEST_CASE("lstm_step: zero parameters give zero outputs") {
  ad::ParamStore ps;
  const LstmParams lstm = register_lstm_params(ps, "t", 3, 4);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.7);
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(4);
  const auto [h, c] = lstm_step(ps, lstm, false, x, zeros, zeros);
  CHECK(h.norm() == doctest::Approx(0.0));
  CHECK(c.norm() == doctest::Approx(0.0));
}

TEST_CASE("lstm_step: saturated forget gate carries the cell through") {
  ad::ParamStore ps;
  const LstmParams lstm = register_lstm_params(ps, "t", 2, 3);
  ps.value(ps.id_of("t.fwd.bf")).setConstant(50.0);  // forget gate ~ 1
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 0.3);
  const Eigen::VectorXd h0 = Eigen::VectorXd::Zero(3);
  const Eigen::VectorXd c0 = Eigen::VectorXd::Ones(3);
  const auto [h, c] = lstm_step(ps, lstm, false, x, h0, c0);
  CHECK((c - c0).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lstm_step: hidden state is bounded by tanh * sigmoid") {
  ad::ParamStore ps;
  const LstmParams lstm = register_lstm_params(ps, "t", 2, 3);
  Rng rng(4);
  for (int id = 0; id < static_cast<int>(ps.entries().size()); ++id)
    ps.init_uniform(id, 3.0, rng);
  Eigen::VectorXd x(2), h0(3), c0(3);
  for (int iter = 0; iter < 50; ++iter) {
    for (int k = 0; k < 2; ++k) x[k] = rng.next_uniform(-5, 5);
    for (int k = 0; k < 3; ++k) h0[k] = rng.next_uniform(-1, 1);
    for (int k = 0; k < 3; ++k) c0[k] = rng.next_uniform(-2, 2);
    const auto [h, c] = lstm_step(ps, lstm, false, x, h0, c0);
    CHECK(h.cwiseAbs().maxCoeff() < 1.0);
  }
  CHECK_THROWS(lstm_step(ps, lstm, false, Eigen::VectorXd::Zero(5), h0, c0));
}

TEST_CASE("encode_argument: shape, zero model, single-word equivalence") {
  const EmbeddingTable emb = tiny_embeddings(3);
  NeuralModel model(Task::cei, Variant::full, &emb, 4, 0.0, 21);

  SUBCASE("always 2*hidden long") {
    CHECK(model.encode_argument({"alpha", "beta"}).size() == 8);
    CHECK(model.encode_argument({}).size() == 8);
  }
  SUBCASE("all-OOV gives the zero placeholder") {
    CHECK(model.encode_argument({"zzz", "qqq"}).norm() == doctest::Approx(0.0));
  }
  SUBCASE("zero parameters give the zero vector") {
    NeuralModel zero = NeuralModel::restore(Task::cei, Variant::full, &emb, 4, 0.0);
    CHECK(zero.encode_argument({"alpha"}).norm() == doctest::Approx(0.0));
  }
  SUBCASE("single word equals one lstm_step from the zero state per direction") {
    const Eigen::VectorXd enc = model.encode_argument({"alpha"});
    const Eigen::VectorXd x = *emb.lookup("alpha");
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
    const auto [hf, cf] = lstm_step(model.params(), *model.word_lstm(), false, x, z, z);
    const auto [hb, cb] = lstm_step(model.params(), *model.word_lstm(), true, x, z, z);
    CHECK((enc.head(4) - hf).norm() == doctest::Approx(0.0));
    CHECK((enc.tail(4) - hb).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("da_average") {
  const EmbeddingTable emb = tiny_embeddings(3);
  SUBCASE("single word returns its vector") {
    const auto v = da_average(emb, {"alpha"});
    REQUIRE(v.has_value());
    CHECK((*v - *emb.lookup("alpha")).norm() == doctest::Approx(0.0));
  }
  SUBCASE("two words return the midpoint") {
    const auto v = da_average(emb, {"alpha", "beta"});
    REQUIRE(v.has_value());
    const Eigen::VectorXd mid = (*emb.lookup("alpha") + *emb.lookup("beta")) / 2.0;
    CHECK((*v - mid).norm() == doctest::Approx(0.0));
  }
  SUBCASE("all OOV is flagged missing") {
    CHECK_FALSE(da_average(emb, {"zzz"}).has_value());
  }
  SUBCASE("OOV words are skipped, not zero-filled") {
    const auto v = da_average(emb, {"alpha", "zzz"});
    REQUIRE(v.has_value());
    CHECK((*v - *emb.lookup("alpha")).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("all-OOV argument takes the mean of the other arguments (da_avg)") {
  // "mid" is inserted as the exact mean of alpha's and gamma's vectors, so a
  // message [alpha][oov][gamma] must score identically to [alpha][mid][gamma]
  EmbeddingTable emb = tiny_embeddings(3);
  emb.insert("mid", (*emb.lookup("alpha") + *emb.lookup("gamma")) / 2.0);

  NeuralModel model(Task::cei, Variant::da_avg, &emb, 4, 0.0, 5);
  const Message with_oov = make_message(
      "a", {{"alpha", "N"}, {"zzzz", "N"}, {"gamma", "N"}});
  const Message with_mid = make_message(
      "b", {{"alpha", "N"}, {"mid", "N"}, {"gamma", "N"}});
  const std::vector<DiscourseArgument> args = {{0, 0, ArgKind::plain, std::nullopt},
                                               {1, 1, ArgKind::plain, std::nullopt},
                                               {2, 2, ArgKind::plain, std::nullopt}};
  const auto lp_oov = model.forward_cei(with_oov, args);
  const auto lp_mid = model.forward_cei(with_mid, args);
  REQUIRE(lp_oov.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK((lp_oov[i] - lp_mid[i]).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("forward_cp: normalization, determinism, uniform at zero output layer") {
  const EmbeddingTable emb = tiny_embeddings(4);
  const Message m = make_message("m", {{"alpha", "N"}, {"beta", "V"}, {"gamma", "N"},
                                       {"delta", "V"}});
  const NeuralExample ex = example_for(m, Task::cp, 1);

  for (Variant variant : {Variant::full, Variant::word_only, Variant::da_avg}) {
    CAPTURE(to_string(variant));
    NeuralModel model(Task::cp, variant, &emb, 4, 0.3, 7);
    const Eigen::VectorXd lp = model.forward_cp(m, ex.args);
    CHECK(lp.size() == 2);
    CHECK(std::exp(lp[0]) + std::exp(lp[1]) == doctest::Approx(1.0).epsilon(1e-9));

    const Eigen::VectorXd again = model.forward_cp(m, ex.args);
    CHECK((lp - again).norm() == 0.0);  // inference is dropout-free
  }

  NeuralModel zero_out(Task::cp, Variant::word_only, &emb, 4, 0.0, 7);
  zero_out.params().value(zero_out.params().id_of("out.w")).setZero();
  zero_out.params().value(zero_out.params().id_of("out.b")).setZero();
  const Eigen::VectorXd lp = zero_out.forward_cp(m, ex.args);
  CHECK(lp[0] == doctest::Approx(std::log(0.5)));
  CHECK(lp[1] == doctest::Approx(std::log(0.5)));

  CHECK_THROWS(zero_out.forward_cp(m, {}));
}

TEST_CASE("forward_cei: per-argument outputs; word_only scores arguments independently") {
  const EmbeddingTable emb = tiny_embeddings(4);
  NeuralModel model(Task::cei, Variant::word_only, &emb, 3, 0.0, 17);

  const Message ab = make_message("ab", {{"alpha", "N"}, {"beta", "V"}, {"gamma", "N"},
                                         {"delta", "V"}});
  const std::vector<DiscourseArgument> args_ab = {{0, 1, ArgKind::plain, std::nullopt},
                                                  {2, 3, ArgKind::plain, std::nullopt}};
  const Message ba = make_message("ba", {{"gamma", "N"}, {"delta", "V"}, {"alpha", "N"},
                                         {"beta", "V"}});
  const std::vector<DiscourseArgument> args_ba = args_ab;

  const auto lp_ab = model.forward_cei(ab, args_ab);
  const auto lp_ba = model.forward_cei(ba, args_ba);
  REQUIRE(lp_ab.size() == 2);
  for (const auto& lp : lp_ab)
    CHECK(std::exp(lp[0]) + std::exp(lp[1]) == doctest::Approx(1.0).epsilon(1e-9));
  // swapping the two arguments permutes the outputs exactly
  CHECK((lp_ab[0] - lp_ba[1]).norm() == doctest::Approx(0.0));
  CHECK((lp_ab[1] - lp_ba[0]).norm() == doctest::Approx(0.0));
}

TEST_CASE("adam first step matches the hand computation") {
  // scalar parameter, gradient 1, lr = 0.001:
  // m^ = v^ = 1 after bias correction, step = -lr / (1 + 1e-8)
  ad::ParamStore ps;
  ps.add("w", 1, 1);
  Optimizer adam(OptimizerKind::adam, 0.001, ps.size());
  ps.grads()[0] = 1.0;
  adam.step(ps);
  CHECK(ps.values()[0] == doctest::Approx(-0.001 / (1.0 + 1e-8)).epsilon(1e-12));

  SUBCASE("sgd step is plain descent") {
    ad::ParamStore ps2;
    ps2.add("w", 1, 1);
    Optimizer sgd(OptimizerKind::sgd, 0.01, ps2.size());
    ps2.grads()[0] = 2.0;
    sgd.step(ps2);
    CHECK(ps2.values()[0] == doctest::Approx(-0.02));
  }
}

TEST_CASE("training: separable toy corpus is learned; loss drops from its start") {
  EmbeddingTable emb = tiny_embeddings(4);
  std::vector<Message> messages;
  std::vector<NeuralExample> examples;
  messages.reserve(10);
  // keyword in the second argument decides the label
  for (int i = 0; i < 10; ++i) {
    const bool causal = i % 2 == 0;
    messages.push_back(make_message(
        "m" + std::to_string(i),
        {{"alpha", "N"}, {"beta", "V"}, {causal ? "good" : "bad", "N"}, {"gamma", "V"}}));
  }
  for (int i = 0; i < 10; ++i) {
    NeuralExample ex = example_for(messages[static_cast<std::size_t>(i)], Task::cp, i % 2 == 0 ? 1 : 0);
    examples.push_back(ex);
  }

  SUBCASE("sgd lr 0.01: first epoch already lowers the loss") {
    NeuralModel model(Task::cp, Variant::full, &emb, 4, 0.0, 3);
    double initial = 0.0;
    for (const auto& ex : examples) initial += model.loss(ex);
    initial /= static_cast<double>(examples.size());

    TrainConfig tc;
    tc.optimizer = OptimizerKind::sgd;
    tc.learning_rate = 0.01;
    tc.epochs = 1;
    tc.seed = 13;
    const TrainResult r = train_neural(model, examples, nullptr, tc);
    double after = 0.0;
    for (const auto& ex : examples) after += model.loss(ex);
    after /= static_cast<double>(examples.size());
    CHECK(after < initial);
  }

  SUBCASE("adam reaches 100% training accuracy") {
    NeuralModel model(Task::cp, Variant::full, &emb, 4, 0.0, 3);
    TrainConfig tc;
    tc.optimizer = OptimizerKind::adam;
    tc.learning_rate = 0.01;
    tc.epochs = 200;
    tc.seed = 13;
    train_neural(model, examples, nullptr, tc);
    for (const auto& ex : examples) {
      const Eigen::VectorXd lp = model.forward_cp(*ex.message, ex.args);
      CHECK((lp[1] > lp[0] ? 1 : 0) == ex.cp_gold);
    }
  }

  SUBCASE("identical seeds give identical loss traces and parameters") {
    TrainConfig tc;
    tc.optimizer = OptimizerKind::adam;
    tc.learning_rate = 0.005;
    tc.epochs = 5;
    tc.seed = 77;
    tc.dropout_p = 0.3;
    NeuralModel a(Task::cp, Variant::full, &emb, 4, 0.3, 3);
    NeuralModel b(Task::cp, Variant::full, &emb, 4, 0.3, 3);
    const TrainResult ra = train_neural(a, examples, nullptr, tc);
    const TrainResult rb = train_neural(b, examples, nullptr, tc);
    CHECK(ra.epoch_loss == rb.epoch_loss);
    CHECK(a.params().values() == b.params().values());
  }

  SUBCASE("missing gold labels error") {
    NeuralModel model(Task::cp, Variant::full, &emb, 4, 0.0, 3);
    std::vector<NeuralExample> bad = examples;
    bad[0].cp_gold = -1;
    TrainConfig tc;
    CHECK_THROWS_WITH_AS(train_neural(model, bad, nullptr, tc),
                         doctest::Contains("missing a gold label"), std::runtime_error);
  }
}

TEST_CASE("gradient check: quick pass over all six configurations") {
  const EmbeddingTable emb = tiny_embeddings(4);
  Rng rng(31);
  for (Task task : {Task::cp, Task::cei}) {
    for (Variant variant : {Variant::full, Variant::word_only, Variant::da_avg}) {
      CAPTURE(to_string(task));
      CAPTURE(to_string(variant));
      NeuralModel model(task, variant, &emb, 3, 0.0, rng.next_u64());
      const Message m = make_message("g", {{"alpha", "N"}, {"zzz-oov", "N"}, {"beta", "V"},
                                           {"gamma", "N"}});
      const NeuralExample ex = example_for(m, task, 1);
      CHECK(gradient_check(model, ex, 1e-3) < 1e-4);
    }
  }
}

TEST_CASE("dropout: only active in training mode, drawn from the seeded stream") {
  const EmbeddingTable emb = tiny_embeddings(4);
  NeuralModel model(Task::cei, Variant::full, &emb, 4, 0.5, 9);
  const Message m = make_message("m", {{"alpha", "N"}, {"beta", "V"}, {"gamma", "N"},
                                       {"delta", "V"}});
  const std::vector<DiscourseArgument> args = {{0, 1, ArgKind::plain, std::nullopt},
                                               {2, 3, ArgKind::plain, std::nullopt}};

  const auto quiet1 = model.forward_cei(m, args, false, nullptr);
  const auto quiet2 = model.forward_cei_seeded(m, args, false, 123);
  CHECK((quiet1[0] - quiet2[0]).norm() == 0.0);  // seed irrelevant at inference

  const auto train1 = model.forward_cei_seeded(m, args, true, 123);
  const auto train2 = model.forward_cei_seeded(m, args, true, 123);
  CHECK((train1[0] - train2[0]).norm() == 0.0);  // same seed, same masks

  const auto train3 = model.forward_cei_seeded(m, args, true, 124);
  const bool differs = (train1[0] - train3[0]).norm() > 0.0 ||
                       (train1[1] - train3[1]).norm() > 0.0;
  CHECK(differs);  // different seed, different masks
}

TEST_CASE("embeddings loader") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "cea_emb_test.txt";
  {
    std::ofstream out(path);
    out << "the 0.1 0.2\n";
    out << "The 0.3 0.4\n";  // duplicate after lowercasing: last wins
  }
  const EmbeddingTable t = load_embeddings(path.string(), 2);
  REQUIRE(t.lookup("the") != nullptr);
  CHECK((*t.lookup("the"))[0] == doctest::Approx(0.3));
  CHECK((*t.lookup("THE"))[1] == doctest::Approx(0.4));
  CHECK(t.lookup("missing") == nullptr);
  CHECK(t.fingerprint() != 0);

  SUBCASE("wrong arity names the line") {
    const auto bad = fs::temp_directory_path() / "cea_emb_bad.txt";
    std::ofstream out(bad);
    out << "ok 0.1 0.2\n";
    out << "short 0.5\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_embeddings(bad.string(), 2), doctest::Contains("line 2"),
                         std::runtime_error);
  }
  SUBCASE("empty file is a valid empty table") {
    const auto empty = fs::temp_directory_path() / "cea_emb_empty.txt";
    std::ofstream{empty};
    const EmbeddingTable e = load_embeddings(empty.string(), 2);
    CHECK(e.size() == 0);
    CHECK(e.lookup("anything") == nullptr);
  }
}
