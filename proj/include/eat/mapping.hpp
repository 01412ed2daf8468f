#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "eat/core.hpp"

namespace eat {

// 27 fine-grained emotions plus neutral, in the corpus' canonical order.
inline constexpr std::array<std::string_view, 28> kEmotionTaxonomy{
    "admiration", "amusement",   "anger",       "annoyance",   "approval",
    "caring",     "confusion",   "curiosity",   "desire",      "disappointment",
    "disapproval", "disgust",    "embarrassment", "excitement", "fear",
    "gratitude",  "grief",       "joy",         "love",        "nervousness",
    "optimism",   "pride",       "realization", "relief",      "remorse",
    "sadness",    "surprise",    "neutral"};

inline constexpr int kNumEmotions = static_cast<int>(kEmotionTaxonomy.size());

class EmotionLabel {
 public:
  /// Throws eat::Error naming the string when it is not in the taxonomy.
  static EmotionLabel from_name(std::string_view name);
  static EmotionLabel from_index(int index);
  static std::optional<EmotionLabel> try_from_name(std::string_view name);

  int index() const { return index_; }
  std::string_view name() const { return kEmotionTaxonomy[static_cast<std::size_t>(index_)]; }

  friend bool operator==(EmotionLabel, EmotionLabel) = default;
  friend auto operator<=>(EmotionLabel, EmotionLabel) = default;

 private:
  explicit EmotionLabel(int index) : index_(index) {}
  int index_;
};

/// Emotion -> cyberbullying class grouping. Unmapped emotions are absent.
class ConceptMap {
 public:
  ConceptMap() = default;

  void set(EmotionLabel emotion, CyberLabel target);
  void erase(EmotionLabel emotion);
  std::optional<CyberLabel> lookup(EmotionLabel emotion) const;
  std::vector<EmotionLabel> mapped_emotions() const;  // taxonomy order
  std::size_t size() const;

  friend bool operator==(const ConceptMap&, const ConceptMap&) = default;

 private:
  std::array<std::optional<CyberLabel>, 28> groups_{};
};

/// {anger, disgust} -> harassment, surprise -> defamation,
/// {gratitude, joy} -> non-cyberbullying.
ConceptMap default_concept_map();

void to_json(nlohmann::json& j, const ConceptMap& map);
void from_json(const nlohmann::json& j, ConceptMap& map);

/// Buckets are the mapped emotions; a post falls into the bucket of its first
/// mapped label in taxonomy order.
struct CompositionPlan {
  std::vector<EmotionLabel> buckets;
  std::vector<std::size_t> supply;
  std::vector<std::size_t> take;
};

/// Budget allocation across buckets: an even quota of budget / k each; buckets
/// short of the quota give their whole supply and the deficit is spread over
/// the others in proportion to their spare supply (floored); every leftover
/// item goes to the bucket with the largest supply, spilling to the next
/// largest when it runs dry. Throws when budget exceeds total supply.
std::vector<std::size_t> plan_composition(std::span<const std::size_t> supply,
                                          std::size_t budget);

struct ConceptMapResult {
  Dataset items;  // sorted by id
  CompositionPlan plan;
  std::size_t conflicts = 0;
  std::size_t unmapped = 0;
};

/// Relabels emotion posts through the map and draws a seeded sample of
/// exactly `budget` items. Posts whose labels reach two different classes are
/// dropped as conflicts, posts without a mapped label are dropped as unmapped.
ConceptMapResult apply_concept_map(std::span<const Post> emotion_posts, const ConceptMap& map,
                                   std::size_t budget, std::uint64_t seed);

/// The class a post maps to, or nullopt for unmapped or conflicting label sets.
std::optional<CyberLabel> mapped_class(const Post& post, const ConceptMap& map);

/// Conditional likelihood P(emotion | cyberbullying class). Rows with no
/// instances are flagged as undefined and left at zero.
struct LikelihoodMatrix {
  Eigen::Matrix<double, 3, 28> cells = Eigen::Matrix<double, 3, 28>::Zero();
  std::array<bool, 3> populated{};
  std::array<std::size_t, 3> row_counts{};
};

LikelihoodMatrix emotion_likelihood_matrix(
    std::span<const std::pair<CyberLabel, EmotionLabel>> predictions);

/// Header "class,<28 emotions>", rows in class order 0,1,2; undefined rows
/// print "NA" cells.
void write_likelihood_csv(std::ostream& out, const LikelihoodMatrix& matrix);

/// Diagnostic over the harassment row: is the mass on the harassment-mapped
/// emotions the largest two-emotion mass among mapped emotions?
struct HarassmentEmotionCheck {
  bool holds = false;
  double harassment_mass = 0.0;
  double best_pair_mass = 0.0;
  std::pair<EmotionLabel, EmotionLabel> best_pair = {EmotionLabel::from_index(0),
                                                     EmotionLabel::from_index(0)};
  EmotionLabel row_argmax = EmotionLabel::from_index(0);
  std::string message;
};

HarassmentEmotionCheck check_harassment_emotions(const LikelihoodMatrix& matrix,
                                                 const ConceptMap& map);

}  // namespace eat
