#include "eat/backend.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>
#include <utility>

namespace eat {

using nlohmann::json;

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw Error(std::string("train config: ") + field + " must be positive");
  };
  require(batch_size > 0, "batch_size");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate");
  require(epochs > 0, "epochs");
  require(max_tokens > 0, "max_tokens");
  require(seed > 0, "seed");
  if (model_id.empty()) throw Error("train config: model_id is empty");
}

void to_json(json& j, const TrainConfig& config) {
  j = json{{"batch_size", config.batch_size},   {"learning_rate", config.learning_rate},
           {"epochs", config.epochs},           {"max_tokens", config.max_tokens},
           {"seed", config.seed},               {"model_id", config.model_id}};
}

void from_json(const json& j, TrainConfig& config) {
  if (!j.is_object()) throw Error("train config must be a JSON object");
  try {
    config.batch_size = j.value("batch_size", config.batch_size);
    config.learning_rate = j.value("learning_rate", config.learning_rate);
    config.epochs = j.value("epochs", config.epochs);
    config.max_tokens = j.value("max_tokens", config.max_tokens);
    config.seed = j.value("seed", config.seed);
    config.model_id = j.value("model_id", config.model_id);
  } catch (const json::exception& e) {
    throw Error(std::string("train config: ") + e.what());
  }
  config.validate();
}

void write_loss_csv(std::ostream& out, const LossTrace& trace) {
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << (i + 1) << ',' << format_double(trace[i]) << '\n';
  }
}

namespace {

bool is_token_byte(unsigned char c) {
  return std::isalnum(c) || c == '#' || c == '\'' || c >= 0x80;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t salt = 0) {
  std::uint64_t hash = 0xcbf29ce484222325ULL ^ salt;
  for (const char c : s) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

using SparseVector = std::vector<std::pair<Eigen::Index, double>>;

// L2-normalised hashed term counts.
SparseVector hashed_features(std::string_view text, std::size_t max_tokens, Eigen::Index buckets,
                             std::uint64_t salt) {
  auto tokens = tokenize(text, max_tokens);
  if (tokens.empty()) tokens.emplace_back("<empty>");
  std::unordered_map<Eigen::Index, double> counts;
  for (const auto& token : tokens) {
    counts[static_cast<Eigen::Index>(fnv1a(token, salt) % static_cast<std::uint64_t>(buckets))] +=
        1.0;
  }
  SparseVector out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end());
  double norm = 0.0;
  for (const auto& [index, value] : out) norm += value * value;
  norm = std::sqrt(norm);
  for (auto& entry : out) entry.second /= norm;
  return out;
}

constexpr std::uint64_t kEmbeddingSalt = 0x9e3779b97f4a7c15ULL;

constexpr std::array<std::string_view, 9> kTransformerIds{
    "roberta-base", "bert-base-uncased", "distilbert-base-uncased",
    "mpnet-base",   "electra-small",     "xlnet-base-cased",
    "t5-base",      "llama-2-7b",        "llama-3-8b"};

}  // namespace

std::vector<std::string> tokenize(std::string_view text, std::size_t max_tokens) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
      continue;
    }
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
      if (tokens.size() == max_tokens) return tokens;
    }
  }
  if (!current.empty() && tokens.size() < max_tokens) tokens.push_back(std::move(current));
  return tokens;
}

// ---------------------------------------------------------------------------
// ReferenceClassifier
// ---------------------------------------------------------------------------

ReferenceClassifier::ReferenceClassifier(int label_arity)
    : arity_(label_arity), weights_(Eigen::MatrixXd::Zero(label_arity, kFeatureBuckets + 1)) {
  if (label_arity < 2) throw Error("label arity must be at least 2");
}

LossTrace ReferenceClassifier::fine_tune(std::span<const TrainingExample> data,
                                         const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw Error("fine_tune: training data is empty");
  for (const auto& example : data) {
    if (example.label < 0 || example.label >= arity_) {
      throw Error("fine_tune: label " + std::to_string(example.label) + " outside arity " +
                  std::to_string(arity_));
    }
  }
  max_tokens_ = config.max_tokens;

  std::vector<SparseVector> features;
  features.reserve(data.size());
  for (const auto& example : data) {
    features.push_back(hashed_features(example.text, static_cast<std::size_t>(max_tokens_),
                                       kFeatureBuckets, 0));
  }

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double epsilon = 1e-8;
  const Eigen::Index bias = kFeatureBuckets;
  Eigen::MatrixXd first_moment = Eigen::MatrixXd::Zero(weights_.rows(), weights_.cols());
  Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(weights_.rows(), weights_.cols());
  Eigen::MatrixXd gradient(weights_.rows(), weights_.cols());
  Eigen::VectorXd logits(arity_);

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  LossTrace trace;
  std::int64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      const double scale = 1.0 / static_cast<double>(stop - start);
      gradient.setZero();
      for (std::size_t b = start; b < stop; ++b) {
        const auto& x = features[order[b]];
        const int label = data[order[b]].label;
        logits = weights_.col(bias);
        for (const auto& [index, value] : x) logits += value * weights_.col(index);
        const double peak = logits.maxCoeff();
        Eigen::VectorXd probs = (logits.array() - peak).exp();
        const double partition = probs.sum();
        probs /= partition;
        epoch_loss += -(logits(label) - peak - std::log(partition));
        probs(label) -= 1.0;
        probs *= scale;
        gradient.col(bias) += probs;
        for (const auto& [index, value] : x) gradient.col(index) += value * probs;
      }
      ++step;
      first_moment = beta1 * first_moment + (1.0 - beta1) * gradient;
      second_moment = beta2 * second_moment + (1.0 - beta2) * gradient.cwiseAbs2();
      const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      weights_.array() -= config.learning_rate * (first_moment.array() / correction1) /
                          ((second_moment.array() / correction2).sqrt() + epsilon);
    }
    trace.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  trained_ = true;
  return trace;
}

Eigen::MatrixXd ReferenceClassifier::predict_proba(std::span<const std::string_view> texts) const {
  if (!trained_) throw Error("predict: handle has not been trained");
  Eigen::MatrixXd probs(static_cast<Eigen::Index>(texts.size()), arity_);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto x =
        hashed_features(texts[i], static_cast<std::size_t>(max_tokens_), kFeatureBuckets, 0);
    Eigen::VectorXd logits = weights_.col(kFeatureBuckets);
    for (const auto& [index, value] : x) logits += value * weights_.col(index);
    const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
    probs.row(static_cast<Eigen::Index>(i)) = (e / e.sum()).transpose();
  }
  return probs;
}

std::vector<int> ReferenceClassifier::predict(std::span<const std::string_view> texts) const {
  const Eigen::MatrixXd probs = predict_proba(texts);
  std::vector<int> labels(texts.size());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    probs.row(i).maxCoeff(&best);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

Eigen::MatrixXd ReferenceClassifier::embed(std::span<const std::string_view> texts) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(texts.size()),
                                              kEmbeddingDim);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (const auto& [index, value] : hashed_features(
             texts[i], static_cast<std::size_t>(max_tokens_), kEmbeddingDim, kEmbeddingSalt)) {
      out(static_cast<Eigen::Index>(i), index) = value;
    }
  }
  return out;
}

std::unique_ptr<ClassifierHandle> ReferenceClassifier::clone() const {
  return std::make_unique<ReferenceClassifier>(*this);
}

// ---------------------------------------------------------------------------
// GenerativeClassifier
// ---------------------------------------------------------------------------

GenerativeClassifier::GenerativeClassifier(std::string model_id, GenerateFn generate,
                                           std::string prompt_template, TrainFn train)
    : model_id_(std::move(model_id)),
      generate_(std::move(generate)),
      prompt_template_(std::move(prompt_template)),
      train_(std::move(train)) {
  if (!generate_) throw Error("generative adapter '" + model_id_ + "' needs a generator");
}

std::string GenerativeClassifier::render_prompt(std::string_view text) const {
  std::string prompt;
  std::string_view rest = prompt_template_;
  constexpr std::string_view placeholder = "{text}";
  for (auto pos = rest.find(placeholder); pos != std::string_view::npos;
       pos = rest.find(placeholder)) {
    prompt.append(rest.substr(0, pos));
    prompt.append(text);
    rest.remove_prefix(pos + placeholder.size());
  }
  prompt.append(rest);
  return prompt;
}

LossTrace GenerativeClassifier::fine_tune(std::span<const TrainingExample> data,
                                          const TrainConfig& config) {
  if (!train_) {
    throw Error("generative adapter '" + model_id_ + "' has no training callback");
  }
  config.validate();
  if (data.empty()) throw Error("fine_tune: training data is empty");
  auto trace = train_(data, config);
  if (trace.size() != static_cast<std::size_t>(config.epochs)) {
    throw Error("generative adapter '" + model_id_ + "' returned " +
                std::to_string(trace.size()) + " epoch losses for " +
                std::to_string(config.epochs) + " epochs");
  }
  return trace;
}

std::vector<int> GenerativeClassifier::predict(std::span<const std::string_view> texts) const {
  std::vector<int> labels;
  labels.reserve(texts.size());
  for (const auto text : texts) {
    const auto label = parse_generated_label(generate_(render_prompt(text)));
    if (!label) ++unmappable_;
    labels.push_back(label ? to_int(*label) : 0);
  }
  return labels;
}

Eigen::MatrixXd GenerativeClassifier::embed(std::span<const std::string_view>) const {
  throw Error("embedding is not supported by generative adapter '" + model_id_ + "'");
}

std::unique_ptr<ClassifierHandle> GenerativeClassifier::clone() const {
  return std::make_unique<GenerativeClassifier>(*this);
}

std::optional<CyberLabel> parse_generated_label(std::string_view generation) {
  std::string text;
  text.reserve(generation.size());
  for (const char ch : generation) {
    const auto c = static_cast<unsigned char>(ch);
    text.push_back((c == '-' || c == '_') ? ' ' : static_cast<char>(std::tolower(c)));
  }
  std::array<bool, 3> found{};
  for (const std::string_view phrase : {"non cyberbullying", "no cyberbullying",
                                        "not cyberbullying"}) {
    if (text.find(phrase) != std::string::npos) found[0] = true;
  }
  if (text.find("harassment") != std::string::npos) found[1] = true;
  if (text.find("defamation") != std::string::npos) found[2] = true;

  const auto hits = std::count(found.begin(), found.end(), true);
  if (hits == 1) {
    return static_cast<CyberLabel>(std::find(found.begin(), found.end(), true) - found.begin());
  }
  if (hits == 0) {
    std::string_view trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
      trimmed.remove_prefix(1);
    }
    while (!trimmed.empty() && (std::isspace(static_cast<unsigned char>(trimmed.back())) ||
                                trimmed.back() == '.')) {
      trimmed.remove_suffix(1);
    }
    if (trimmed == "0" || trimmed == "1" || trimmed == "2") {
      return static_cast<CyberLabel>(trimmed[0] - '0');
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Registry and free functions
// ---------------------------------------------------------------------------

std::span<const std::string_view> known_transformer_ids() { return kTransformerIds; }

std::unique_ptr<ClassifierHandle> make_handle(std::string_view model_id, int label_arity) {
  if (model_id == "reference") return std::make_unique<ReferenceClassifier>(label_arity);
  if (std::find(kTransformerIds.begin(), kTransformerIds.end(), model_id) !=
      kTransformerIds.end()) {
    throw Error("model '" + std::string(model_id) +
                "' needs an external transformer adapter, which is not part of this build");
  }
  throw Error("cannot resolve model id '" + std::string(model_id) + "'");
}

namespace {

std::vector<std::string_view> texts_of(std::span<const Post> posts) {
  std::vector<std::string_view> texts;
  texts.reserve(posts.size());
  for (const auto& post : posts) texts.emplace_back(post.text);
  return texts;
}

}  // namespace

FineTuneResult fine_tune(std::unique_ptr<ClassifierHandle> handle, const Dataset& data,
                         const TrainConfig& config) {
  if (!handle) throw Error("fine_tune: null handle");
  if (data.empty()) throw Error("fine_tune: training data is empty");
  std::vector<TrainingExample> examples;
  examples.reserve(data.size());
  for (const auto& item : data) {
    const int label = to_int(item.label);
    if (label < 0 || label >= handle->label_arity()) {
      throw Error("fine_tune: label " + std::to_string(label) + " outside arity " +
                  std::to_string(handle->label_arity()));
    }
    examples.push_back({item.post.text, label});
  }
  FineTuneResult result;
  result.loss_trace = handle->fine_tune(examples, config);
  result.handle = std::move(handle);
  return result;
}

FineTuneResult fine_tune(std::string_view model_id, const Dataset& data,
                         const TrainConfig& config) {
  return fine_tune(make_handle(model_id, kNumCyberClasses), data, config);
}

std::vector<CyberLabel> predict(const ClassifierHandle& handle, std::span<const Post> posts) {
  if (handle.label_arity() != kNumCyberClasses) {
    throw Error("predict: handle has arity " + std::to_string(handle.label_arity()) +
                ", expected 3");
  }
  if (posts.empty()) return {};
  const auto texts = texts_of(posts);
  const auto raw = handle.predict(texts);
  std::vector<CyberLabel> labels;
  labels.reserve(raw.size());
  for (const int value : raw) labels.push_back(cyber_label_from_int(value));
  return labels;
}

Eigen::MatrixXd embed(const ClassifierHandle& handle, std::span<const Post> posts) {
  if (posts.empty()) throw Error("embed: no posts given");
  const auto texts = texts_of(posts);
  return handle.embed(texts);
}

Eigen::MatrixXd embed(std::string_view model_id, std::span<const Post> posts) {
  return embed(*make_handle(model_id, kNumCyberClasses), posts);
}

}  // namespace eat
