#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "eat/core.hpp"

namespace eat {

struct TrainConfig {
  int batch_size = 32;
  double learning_rate = 4e-5;
  int epochs = 4;
  int max_tokens = 400;
  std::uint64_t seed = 1;
  std::string model_id = "reference";

  /// Throws eat::Error when a numeric field is not positive.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& config);
void from_json(const nlohmann::json& j, TrainConfig& config);

using LossTrace = std::vector<double>;  // mean training loss per epoch

/// Writes "epoch,loss" with 1-based epochs.
void write_loss_csv(std::ostream& out, const LossTrace& trace);

struct TrainingExample {
  std::string_view text;
  int label = 0;
};

/// Lower-cased word tokens, truncated to the first max_tokens.
std::vector<std::string> tokenize(std::string_view text, std::size_t max_tokens);

/// Trained-model state behind the train / predict / embed contract.
///
/// Training mutates the handle and must not overlap with other calls on it;
/// predict and embed are const and may run concurrently.
class ClassifierHandle {
 public:
  virtual ~ClassifierHandle() = default;

  virtual std::string_view model_id() const = 0;
  virtual int label_arity() const = 0;
  virtual bool trained() const = 0;

  /// Continues training from the current parameters. One loss per epoch.
  virtual LossTrace fine_tune(std::span<const TrainingExample> data, const TrainConfig& config) = 0;

  /// Throws eat::Error on an untrained handle. Output values lie in [0, arity).
  virtual std::vector<int> predict(std::span<const std::string_view> texts) const = 0;

  /// One row per text; throws eat::Error if the adapter cannot embed.
  virtual Eigen::MatrixXd embed(std::span<const std::string_view> texts) const = 0;
  virtual Eigen::Index embedding_dim() const = 0;

  /// Flat parameter snapshot when the adapter exposes one.
  virtual std::optional<Eigen::MatrixXd> parameters() const { return std::nullopt; }

  virtual std::unique_ptr<ClassifierHandle> clone() const = 0;
};

/// Resolves a model id to a fresh, untrained handle. "reference" is the only
/// adapter compiled in; the transformer ids used in the experiments resolve
/// to an explicit error, anything else to an unknown-model error.
std::unique_ptr<ClassifierHandle> make_handle(std::string_view model_id, int label_arity = 3);

/// Model ids of the nine transformer families evaluated upstream.
std::span<const std::string_view> known_transformer_ids();

struct FineTuneResult {
  std::unique_ptr<ClassifierHandle> handle;
  LossTrace loss_trace;
};

/// Validates the data (non-empty, labels within arity) and trains.
FineTuneResult fine_tune(std::unique_ptr<ClassifierHandle> handle, const Dataset& data,
                         const TrainConfig& config);
FineTuneResult fine_tune(std::string_view model_id, const Dataset& data, const TrainConfig& config);

std::vector<CyberLabel> predict(const ClassifierHandle& handle, std::span<const Post> posts);
Eigen::MatrixXd embed(const ClassifierHandle& handle, std::span<const Post> posts);
Eigen::MatrixXd embed(std::string_view model_id, std::span<const Post> posts);

/// Linear softmax classifier over hashed bag-of-token features.
///
/// Features are the L2-normalised term counts of the head-truncated token
/// sequence, hashed into kFeatureBuckets slots plus a bias. Training is
/// mini-batch Adam on the mean cross-entropy, with batch order drawn from
/// config.seed; weights start at zero, so equal inputs give bit-identical
/// models. Embeddings are the same kind of vector hashed into kEmbeddingDim
/// slots and do not depend on training.
class ReferenceClassifier final : public ClassifierHandle {
 public:
  static constexpr Eigen::Index kFeatureBuckets = 4096;
  static constexpr Eigen::Index kEmbeddingDim = 256;

  explicit ReferenceClassifier(int label_arity = 3);

  std::string_view model_id() const override { return "reference"; }
  int label_arity() const override { return arity_; }
  bool trained() const override { return trained_; }

  LossTrace fine_tune(std::span<const TrainingExample> data, const TrainConfig& config) override;
  std::vector<int> predict(std::span<const std::string_view> texts) const override;
  Eigen::MatrixXd embed(std::span<const std::string_view> texts) const override;
  Eigen::Index embedding_dim() const override { return kEmbeddingDim; }
  std::optional<Eigen::MatrixXd> parameters() const override { return weights_; }
  std::unique_ptr<ClassifierHandle> clone() const override;

  /// Class probabilities, one row per text.
  Eigen::MatrixXd predict_proba(std::span<const std::string_view> texts) const;

 private:
  int arity_;
  bool trained_ = false;
  int max_tokens_ = 400;
  Eigen::MatrixXd weights_;  // arity x (kFeatureBuckets + 1), last column is bias
};

/// Classification through a text generator constrained to the label set.
///
/// The prompt template substitutes "{text}". Generations are parsed with
/// parse_generated_label; those that name no class (or several) are counted
/// as errors and predicted as non-cyberbullying.
class GenerativeClassifier final : public ClassifierHandle {
 public:
  using GenerateFn = std::function<std::string(const std::string& prompt)>;
  using TrainFn =
      std::function<LossTrace(std::span<const TrainingExample>, const TrainConfig&)>;

  GenerativeClassifier(std::string model_id, GenerateFn generate, std::string prompt_template,
                       TrainFn train = {});

  std::string_view model_id() const override { return model_id_; }
  int label_arity() const override { return 3; }
  bool trained() const override { return true; }

  LossTrace fine_tune(std::span<const TrainingExample> data, const TrainConfig& config) override;
  std::vector<int> predict(std::span<const std::string_view> texts) const override;
  Eigen::MatrixXd embed(std::span<const std::string_view> texts) const override;
  Eigen::Index embedding_dim() const override { return 0; }
  std::unique_ptr<ClassifierHandle> clone() const override;

  std::size_t unmappable_generations() const { return unmappable_; }
  std::string render_prompt(std::string_view text) const;

 private:
  std::string model_id_;
  GenerateFn generate_;
  std::string prompt_template_;
  TrainFn train_;
  mutable std::size_t unmappable_ = 0;
};

inline constexpr std::string_view kDefaultGenerativePrompt =
    "Classify the following post as one of: non-cyberbullying, harassment, "
    "defamation.\nPost: {text}\nAnswer:";

/// Maps a generation onto {0,1,2}: the single class name (or digit) it
/// mentions. Returns nullopt when it mentions none or more than one.
std::optional<CyberLabel> parse_generated_label(std::string_view generation);

}  // namespace eat
