#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "eat/backend.hpp"
#include "eat/core.hpp"
#include "eat/mapping.hpp"
#include "eat/metrics.hpp"

namespace eat {

enum class Regime { baseline, zero_shot, few_shot, learning_curve };

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view name);

struct ExperimentSpec {
  Regime regime = Regime::baseline;
  ConceptMap concept_map = default_concept_map();
  std::size_t emotion_budget = 3700;
  TrainConfig train_config;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  // learning_curve only: restricts the curve to one of the six sizes.
  std::optional<std::size_t> subset_size;
  // Run seeds on separate threads. Results do not depend on it.
  bool parallel = true;

  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentSpec& spec);
void from_json(const nlohmann::json& j, ExperimentSpec& spec);

/// A seed-level failure; the orchestrator reports which run broke.
class SeedError : public Error {
 public:
  SeedError(std::uint64_t seed, const std::string& what);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

struct Prediction {
  std::string id;
  CyberLabel truth = CyberLabel::non_cyberbullying;
  CyberLabel predicted = CyberLabel::non_cyberbullying;
};

struct RunRecord {
  std::uint64_t seed = 0;
  EvalReport report;
  LossTrace loss_trace;
  std::vector<std::string> train_ids;  // sorted
  std::vector<Prediction> predictions;  // test set, id order
};

struct RegimeResult {
  Regime regime = Regime::baseline;
  std::string split_name;
  std::uint64_t split_seed = 0;
  std::vector<std::string> test_ids;  // sorted, shared by every run
  std::vector<RunRecord> runs;        // in seed-list order
  AggregateReport aggregate;
};

/// Fine-tune on the baseline split (10%), evaluate on its complement.
RegimeResult run_baseline(const ExperimentSpec& spec, const Dataset& dataset);

/// Train only on concept-mapped emotion posts; evaluate on the baseline test set.
/// Throws if any training id belongs to the target dataset.
RegimeResult run_zero_shot(const ExperimentSpec& spec, std::span<const Post> emotion_corpus,
                           const Dataset& dataset);

/// Zero-shot training followed by continued training of the same handle on the
/// baseline split. The loss trace concatenates both stages.
RegimeResult run_few_shot(const ExperimentSpec& spec, std::span<const Post> emotion_corpus,
                          const Dataset& dataset);

struct CurvePoint {
  std::size_t size = 0;
  RegimeResult with_eat;
  RegimeResult without_eat;
};

/// For each subset size: few-shot EAT and plain fine-tuning on the same subset.
std::map<std::size_t, CurvePoint> run_learning_curve(const ExperimentSpec& spec,
                                                     std::span<const Post> emotion_corpus,
                                                     const Dataset& dataset);

/// Two-stage training used by the few-shot regime, exposed for inspection.
struct TransferResult {
  std::unique_ptr<ClassifierHandle> handle;
  LossTrace loss_trace;
  std::optional<Eigen::MatrixXd> stage1_parameters;
};

TransferResult transfer_train(const Dataset& source, const Dataset& target,
                              const TrainConfig& config);

/// Emotion classifier (28-way) trained on the first taxonomy label of each
/// post, used for the likelihood analysis.
std::unique_ptr<ClassifierHandle> train_emotion_classifier(std::span<const Post> emotion_corpus,
                                                           const TrainConfig& config);

}  // namespace eat
