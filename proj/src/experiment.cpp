#include "eat/experiment.hpp"

#include <algorithm>
#include <exception>
#include <future>
#include <unordered_set>

#include "eat/corpus.hpp"

namespace eat {

using nlohmann::json;

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::baseline: return "baseline";
    case Regime::zero_shot: return "zero_shot";
    case Regime::few_shot: return "few_shot";
    case Regime::learning_curve: return "learning_curve";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  const std::string key = normalize_tag(name);
  if (key == "baseline") return Regime::baseline;
  if (key == "zero shot") return Regime::zero_shot;
  if (key == "few shot") return Regime::few_shot;
  if (key == "learning curve") return Regime::learning_curve;
  throw Error("unknown regime '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  train_config.validate();
  if (seeds.empty()) throw Error("experiment spec: seed list is empty");
  std::unordered_set<std::uint64_t> distinct;
  for (const auto seed : seeds) {
    if (seed == 0) throw Error("experiment spec: seeds must be positive");
    if (!distinct.insert(seed).second) {
      throw Error("experiment spec: seed " + std::to_string(seed) + " listed twice");
    }
  }
  if (regime != Regime::baseline) {
    if (emotion_budget == 0) throw Error("experiment spec: emotion_budget must be positive");
    if (concept_map.size() == 0) throw Error("experiment spec: concept map is empty");
  }
  if (subset_size) {
    if (regime != Regime::learning_curve) {
      throw Error("experiment spec: subset_size only applies to the learning_curve regime");
    }
    const bool known = std::any_of(kLearningCurveRows.begin(), kLearningCurveRows.end(),
                                   [&](const CurveRow& row) { return row.size == *subset_size; });
    if (!known) {
      throw Error("experiment spec: subset_size " + std::to_string(*subset_size) +
                  " is not one of 72, 140, 210, 400, 700, 1300");
    }
  }
}

void to_json(json& j, const ExperimentSpec& spec) {
  j = json{{"regime", std::string(to_string(spec.regime))},
           {"concept_map", spec.concept_map},
           {"emotion_budget", spec.emotion_budget},
           {"train_config", spec.train_config},
           {"seeds", spec.seeds},
           {"parallel", spec.parallel}};
  if (spec.subset_size) j["subset_size"] = *spec.subset_size;
}

void from_json(const json& j, ExperimentSpec& spec) {
  if (!j.is_object()) throw Error("experiment spec must be a JSON object");
  try {
    spec = ExperimentSpec{};
    spec.regime = parse_regime(j.at("regime").get<std::string>());
    if (j.contains("concept_map")) spec.concept_map = j.at("concept_map").get<ConceptMap>();
    spec.emotion_budget = j.value("emotion_budget", spec.emotion_budget);
    if (j.contains("train_config")) spec.train_config = j.at("train_config").get<TrainConfig>();
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("subset_size") && !j.at("subset_size").is_null()) {
      spec.subset_size = j.at("subset_size").get<std::size_t>();
    }
    spec.parallel = j.value("parallel", spec.parallel);
  } catch (const json::exception& e) {
    throw Error(std::string("experiment spec: ") + e.what());
  }
  spec.validate();
}

SeedError::SeedError(std::uint64_t seed, const std::string& what)
    : Error("seed " + std::to_string(seed) + ": " + what), seed_(seed) {}

namespace {

template <typename Job>
std::vector<RunRecord> run_seeds(const ExperimentSpec& spec, Job job) {
  std::vector<RunRecord> records(spec.seeds.size());
  std::vector<std::exception_ptr> errors(spec.seeds.size());
  auto guarded = [&](std::size_t i) {
    try {
      records[i] = job(spec.seeds[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (spec.parallel && spec.seeds.size() > 1) {
    std::vector<std::future<void>> futures;
    futures.reserve(spec.seeds.size());
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
      futures.push_back(std::async(std::launch::async, guarded, i));
    }
    for (auto& f : futures) f.get();
  } else {
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) guarded(i);
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const SeedError&) {
      throw;
    } catch (const std::exception& e) {
      throw SeedError(spec.seeds[i], e.what());
    }
  }
  return records;
}

TrainConfig seeded(const TrainConfig& base, std::uint64_t seed) {
  TrainConfig config = base;
  config.seed = seed;
  return config;
}

std::vector<std::string> sorted_ids(const Dataset& data) {
  std::vector<std::string> ids;
  ids.reserve(data.size());
  for (const auto& item : data) ids.push_back(item.post.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

RunRecord evaluate_run(const ClassifierHandle& handle, const Dataset& test, std::uint64_t seed,
                       LossTrace loss, const Dataset& train) {
  std::vector<Post> posts;
  std::vector<CyberLabel> truths;
  posts.reserve(test.size());
  truths.reserve(test.size());
  for (const auto& item : test) {
    posts.push_back(item.post);
    truths.push_back(item.label);
  }
  const auto predicted = predict(handle, posts);

  RunRecord record;
  record.seed = seed;
  record.report = evaluate(truths, predicted, seed);
  record.loss_trace = std::move(loss);
  record.train_ids = sorted_ids(train);
  record.predictions.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    record.predictions.push_back({test[i].post.id, truths[i], predicted[i]});
  }
  return record;
}

RegimeResult finish(Regime regime, const DatasetSplit& split, std::vector<RunRecord> runs) {
  RegimeResult result;
  result.regime = regime;
  result.split_name = split.name;
  result.split_seed = split.seed;
  result.test_ids = sorted_ids(split.test);
  result.runs = std::move(runs);
  std::vector<EvalReport> reports;
  reports.reserve(result.runs.size());
  for (const auto& run : result.runs) reports.push_back(run.report);
  result.aggregate = aggregate_runs(reports);
  return result;
}

Dataset mapped_source(const ExperimentSpec& spec, std::span<const Post> emotion_corpus,
                      const std::unordered_set<std::string>& target_ids, std::uint64_t seed) {
  auto mapped = apply_concept_map(emotion_corpus, spec.concept_map, spec.emotion_budget, seed);
  for (const auto& item : mapped.items) {
    if (target_ids.contains(item.post.id)) {
      throw Error("zero-shot purity violated: training id '" + item.post.id +
                  "' belongs to the target dataset");
    }
  }
  return std::move(mapped.items);
}

void require_regime(const ExperimentSpec& spec, Regime regime) {
  spec.validate();
  if (spec.regime != regime) {
    throw Error("spec regime is " + std::string(to_string(spec.regime)) + ", expected " +
                std::string(to_string(regime)));
  }
}

}  // namespace

TransferResult transfer_train(const Dataset& source, const Dataset& target,
                              const TrainConfig& config) {
  auto stage1 = fine_tune(make_handle(config.model_id, kNumCyberClasses), source, config);
  TransferResult result;
  result.stage1_parameters = stage1.handle->parameters();
  auto stage2 = fine_tune(std::move(stage1.handle), target, config);
  result.handle = std::move(stage2.handle);
  result.loss_trace = std::move(stage1.loss_trace);
  result.loss_trace.insert(result.loss_trace.end(), stage2.loss_trace.begin(),
                           stage2.loss_trace.end());
  return result;
}

RegimeResult run_baseline(const ExperimentSpec& spec, const Dataset& dataset) {
  require_regime(spec, Regime::baseline);
  const auto split = baseline_split(dataset, spec.seeds.front());
  auto runs = run_seeds(spec, [&](std::uint64_t seed) {
    auto trained = fine_tune(spec.train_config.model_id, split.train,
                             seeded(spec.train_config, seed));
    return evaluate_run(*trained.handle, split.test, seed, std::move(trained.loss_trace),
                        split.train);
  });
  return finish(Regime::baseline, split, std::move(runs));
}

RegimeResult run_zero_shot(const ExperimentSpec& spec, std::span<const Post> emotion_corpus,
                           const Dataset& dataset) {
  require_regime(spec, Regime::zero_shot);
  const auto split = baseline_split(dataset, spec.seeds.front());
  const auto target_ids = id_set(dataset);
  auto runs = run_seeds(spec, [&](std::uint64_t seed) {
    const auto source = mapped_source(spec, emotion_corpus, target_ids, seed);
    auto trained = fine_tune(spec.train_config.model_id, source, seeded(spec.train_config, seed));
    return evaluate_run(*trained.handle, split.test, seed, std::move(trained.loss_trace), source);
  });
  return finish(Regime::zero_shot, split, std::move(runs));
}

RegimeResult run_few_shot(const ExperimentSpec& spec, std::span<const Post> emotion_corpus,
                          const Dataset& dataset) {
  require_regime(spec, Regime::few_shot);
  const auto split = baseline_split(dataset, spec.seeds.front());
  const auto target_ids = id_set(dataset);
  auto runs = run_seeds(spec, [&](std::uint64_t seed) {
    const auto source = mapped_source(spec, emotion_corpus, target_ids, seed);
    auto trained = transfer_train(source, split.train, seeded(spec.train_config, seed));
    Dataset seen = source;
    seen.insert(seen.end(), split.train.begin(), split.train.end());
    return evaluate_run(*trained.handle, split.test, seed, std::move(trained.loss_trace), seen);
  });
  return finish(Regime::few_shot, split, std::move(runs));
}

std::map<std::size_t, CurvePoint> run_learning_curve(const ExperimentSpec& spec,
                                                     std::span<const Post> emotion_corpus,
                                                     const Dataset& dataset) {
  require_regime(spec, Regime::learning_curve);
  const auto subsets = make_learning_curve_subsets(dataset, spec.seeds.front());
  const auto target_ids = id_set(dataset);
  std::map<std::size_t, CurvePoint> curve;
  for (std::size_t r = 0; r < kLearningCurveRows.size(); ++r) {
    const std::size_t size = kLearningCurveRows[r].size;
    if (spec.subset_size && *spec.subset_size != size) continue;
    const auto& subset = subsets[r];

    auto with_eat = run_seeds(spec, [&](std::uint64_t seed) {
      const auto source = mapped_source(spec, emotion_corpus, target_ids, seed);
      auto trained = transfer_train(source, subset.train, seeded(spec.train_config, seed));
      Dataset seen = source;
      seen.insert(seen.end(), subset.train.begin(), subset.train.end());
      return evaluate_run(*trained.handle, subset.test, seed, std::move(trained.loss_trace), seen);
    });
    auto without_eat = run_seeds(spec, [&](std::uint64_t seed) {
      auto trained = fine_tune(spec.train_config.model_id, subset.train,
                               seeded(spec.train_config, seed));
      return evaluate_run(*trained.handle, subset.test, seed, std::move(trained.loss_trace),
                          subset.train);
    });

    CurvePoint point;
    point.size = size;
    point.with_eat = finish(Regime::few_shot, subset, std::move(with_eat));
    point.without_eat = finish(Regime::baseline, subset, std::move(without_eat));
    curve.emplace(size, std::move(point));
  }
  return curve;
}

std::unique_ptr<ClassifierHandle> train_emotion_classifier(std::span<const Post> emotion_corpus,
                                                           const TrainConfig& config) {
  if (emotion_corpus.empty()) throw Error("emotion classifier: corpus is empty");
  std::vector<TrainingExample> examples;
  examples.reserve(emotion_corpus.size());
  for (const auto& post : emotion_corpus) {
    if (post.raw_labels.empty()) throw Error("emotion post '" + post.id + "' has no label");
    const auto emotion = EmotionLabel::from_name(normalize_tag(post.raw_labels.front()));
    examples.push_back({post.text, emotion.index()});
  }
  auto handle = make_handle(config.model_id, kNumEmotions);
  handle->fine_tune(examples, config);
  return handle;
}

}  // namespace eat
