#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <future>
#include <thread>

#include "eat/backend.hpp"
#include "eat/mapping.hpp"
#include "eat/synthetic.hpp"
#include "support.hpp"

using namespace eat;
using testing::item;

namespace {

Dataset separable_six() {
  return {item("a", 0, "sunny happy bright"), item("b", 0, "happy bright day"),
          item("c", 1, "moron idiot trash"),  item("d", 1, "idiot trash clown"),
          item("e", 2, "secret rumor leaked"), item("f", 2, "rumor leaked scandal")};
}

TrainConfig fast_config(std::uint64_t seed = 1) {
  TrainConfig config;
  config.learning_rate = 0.1;
  config.epochs = 50;
  config.batch_size = 4;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("train config defaults, validation and JSON") {
  const TrainConfig config;
  CHECK(config.batch_size == 32);
  CHECK(config.learning_rate == 4e-5);
  CHECK(config.epochs == 4);
  CHECK(config.max_tokens == 400);
  CHECK_NOTHROW(config.validate());

  TrainConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = TrainConfig{};
  bad.learning_rate = -1;
  CHECK_THROWS_AS(bad.validate(), Error);

  TrainConfig custom;
  custom.learning_rate = 0.25;
  custom.seed = 99;
  const nlohmann::json j = custom;
  const auto back = j.get<TrainConfig>();
  CHECK(back.learning_rate == 0.25);
  CHECK(back.seed == 99);
  CHECK(back.model_id == "reference");
}

TEST_CASE("loss trace CSV") {
  std::ostringstream out;
  write_loss_csv(out, {1.5, 0.25});
  CHECK(out.str() == "epoch,loss\n1,1.5\n2,0.25\n");
}

TEST_CASE("tokenizer lower-cases and truncates at the head") {
  CHECK(tokenize("Hello, WORLD! it's ##", 10) ==
        std::vector<std::string>{"hello", "world", "it's", "##"});
  CHECK(tokenize("a b c d e", 3) == std::vector<std::string>{"a", "b", "c"});
  std::string long_text;
  for (int i = 0; i < 5000; ++i) long_text += "word" + std::to_string(i % 97) + " ";
  CHECK(tokenize(long_text, 400).size() == 400);
}

TEST_CASE("loss decreases on a separable toy set with the default config") {
  const auto result = fine_tune("reference", separable_six(), TrainConfig{});
  REQUIRE(result.loss_trace.size() == 4);
  CHECK(result.loss_trace.back() < result.loss_trace.front());
}

TEST_CASE("reference backend memorizes a tiny training set") {
  const Dataset three{item("x", 0, "alpha beta"), item("y", 1, "gamma delta"),
                      item("z", 2, "epsilon zeta")};
  const auto result = fine_tune("reference", three, fast_config());
  std::vector<Post> posts;
  for (const auto& x : three) posts.push_back(x.post);
  CHECK(predict(*result.handle, posts) ==
        std::vector<CyberLabel>{CyberLabel::non_cyberbullying, CyberLabel::harassment,
                                CyberLabel::defamation});
  CHECK(predict(*result.handle, std::span<const Post>{}).empty());
}

TEST_CASE("training is bit reproducible for a fixed seed") {
  TrainConfig config = fast_config(13);
  config.epochs = 5;
  const auto a = fine_tune("reference", separable_six(), config);
  const auto b = fine_tune("reference", separable_six(), config);
  CHECK(a.loss_trace == b.loss_trace);
  REQUIRE(a.handle->parameters());
  CHECK(*a.handle->parameters() == *b.handle->parameters());
}

TEST_CASE("one loss per epoch on 3700 mapped emotion items") {
  auto options = short_text_options(5);
  options.harassment_tagged = options.harassment_clean = options.harassment_unnamed = 0;
  options.defamation_fake = options.defamation_legitimate = 0;
  const auto corpora = make_synthetic_corpora(options);
  const auto mapped = apply_concept_map(corpora.emotion, default_concept_map(), 3700, 1);
  REQUIRE(mapped.items.size() == 3700);
  const auto result = fine_tune("reference", mapped.items, TrainConfig{});
  CHECK(result.loss_trace.size() == 4);
}

TEST_CASE("fine_tune input validation") {
  CHECK_THROWS_AS(fine_tune("reference", Dataset{}, TrainConfig{}), Error);
  CHECK_THROWS_AS(fine_tune("no-such-model", separable_six(), TrainConfig{}), Error);
  auto handle = make_handle("reference", 2);
  CHECK_THROWS_AS(fine_tune(std::move(handle), separable_six(), TrainConfig{}), Error);
}

TEST_CASE("registry resolves transformer ids to an explicit adapter error") {
  REQUIRE(known_transformer_ids().size() == 9);
  for (const auto id : known_transformer_ids()) {
    try {
      make_handle(id);
      FAIL("expected an error for " << id);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("adapter") != std::string::npos);
    }
  }
  CHECK(make_handle("reference")->label_arity() == 3);
}

TEST_CASE("predict needs a trained handle of arity 3") {
  const auto fresh = make_handle("reference");
  const std::vector<Post> posts{testing::post("a", "text")};
  CHECK_THROWS_AS(predict(*fresh, posts), Error);

  auto emotion = make_handle("reference", 28);
  std::vector<TrainingExample> data{{"joy joy", 17}, {"anger", 2}};
  emotion->fine_tune(data, TrainConfig{});
  CHECK_THROWS_AS(predict(*emotion, posts), Error);
  std::vector<std::string_view> texts{"joy", "anger"};
  for (const int label : emotion->predict(texts)) CHECK((label >= 0 && label < 28));
}

TEST_CASE("text beyond max_tokens does not change predictions") {
  TrainConfig config = fast_config();
  config.max_tokens = 5;
  const auto result = fine_tune("reference", separable_six(), config);
  const auto* reference = dynamic_cast<const ReferenceClassifier*>(result.handle.get());
  REQUIRE(reference);
  const std::vector<std::string_view> texts{"moron idiot trash clown day",
                                            "moron idiot trash clown day secret rumor leaked"};
  const auto proba = reference->predict_proba(texts);
  CHECK(proba.row(0) == proba.row(1));
}

TEST_CASE("embeddings") {
  std::vector<Post> posts;
  for (int i = 0; i < 1000; ++i) {
    posts.push_back(testing::post("p" + std::to_string(i), "text number " + std::to_string(i % 37)));
  }
  const auto e = embed("reference", posts);
  CHECK(e.rows() == 1000);
  CHECK(e.cols() == ReferenceClassifier::kEmbeddingDim);
  CHECK(e.row(0) == e.row(37));
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    CHECK(e.row(i).dot(e.row(i)) / e.row(i).squaredNorm() == doctest::Approx(1.0));
    CHECK(e.row(i).norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(embed("reference", std::span<const Post>{}), Error);
}

TEST_CASE("concurrent predictions agree with sequential ones") {
  const auto result = fine_tune("reference", separable_six(), fast_config());
  std::vector<Post> posts;
  for (int i = 0; i < 200; ++i) {
    posts.push_back(testing::post("q" + std::to_string(i), i % 2 ? "idiot trash" : "rumor day"));
  }
  const auto expected = predict(*result.handle, posts);
  std::vector<std::future<std::vector<CyberLabel>>> futures;
  for (int t = 0; t < 4; ++t) {
    futures.push_back(std::async(std::launch::async, [&] { return predict(*result.handle, posts); }));
  }
  for (auto& f : futures) CHECK(f.get() == expected);
}

TEST_CASE("clone keeps the trained state") {
  const auto result = fine_tune("reference", separable_six(), fast_config());
  const auto copy = result.handle->clone();
  CHECK(copy->trained());
  CHECK(*copy->parameters() == *result.handle->parameters());
}

TEST_CASE("generated labels map onto the three classes") {
  CHECK(parse_generated_label("Harassment") == CyberLabel::harassment);
  CHECK(parse_generated_label("This is defamation.") == CyberLabel::defamation);
  CHECK(parse_generated_label("non-cyberbullying") == CyberLabel::non_cyberbullying);
  CHECK(parse_generated_label(" 2. ") == CyberLabel::defamation);
  CHECK_FALSE(parse_generated_label("harassment or defamation"));
  CHECK_FALSE(parse_generated_label("I cannot say"));
}

TEST_CASE("generative adapter counts unmappable generations") {
  std::vector<std::string> prompts;
  GenerativeClassifier classifier(
      "fake-llm",
      [&](const std::string& prompt) {
        prompts.push_back(prompt);
        if (prompt.find("idiot") != std::string::npos) return std::string("harassment");
        if (prompt.find("rumor") != std::string::npos) return std::string("defamation");
        return std::string("hmm, hard to tell");
      },
      std::string(kDefaultGenerativePrompt));
  const std::vector<std::string_view> texts{"you idiot", "a rumor", "nice weather"};
  CHECK(classifier.predict(texts) == std::vector<int>{1, 2, 0});
  CHECK(classifier.unmappable_generations() == 1);
  CHECK(prompts[0].find("Post: you idiot") != std::string::npos);
  CHECK_THROWS_AS(classifier.embed(texts), Error);
  std::vector<TrainingExample> data{{"x", 0}};
  CHECK_THROWS_AS(classifier.fine_tune(data, TrainConfig{}), Error);
}
