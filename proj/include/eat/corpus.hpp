#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "eat/core.hpp"

namespace eat {

// ---------------------------------------------------------------------------
// Label normalization
// ---------------------------------------------------------------------------

/// Maps harassment-corpus tags onto the cyberbullying label space.
///
/// Any of the six harassment tags (malignant, highly malignant, rude, threat,
/// abuse, loathe) yields harassment; a list of clean tags only yields
/// non-cyberbullying. Tags are case-folded and whitespace-normalized first.
/// Throws on an empty list or an unknown tag (the tag is named in the message).
CyberLabel normalize_harassment_labels(std::span<const std::string> raw_labels);

/// "fake" -> defamation, "legitimate" -> non-cyberbullying, after case folding.
CyberLabel normalize_defamation_labels(std::string_view raw_label);

// ---------------------------------------------------------------------------
// Person-name filtering
// ---------------------------------------------------------------------------

struct NameSpan {
  std::size_t begin = 0;  // byte offsets into the text, [begin, end)
  std::size_t end = 0;
};

using PersonNameRecognizer = std::function<std::vector<NameSpan>(std::string_view)>;

/// Heuristic recognizer: runs of two or more capitalized words, the "##"
/// anonymization marker, and any entry of an optional gazetteer.
class HeuristicNameRecognizer {
 public:
  HeuristicNameRecognizer() = default;
  explicit HeuristicNameRecognizer(std::vector<std::string> gazetteer);

  std::vector<NameSpan> operator()(std::string_view text) const;

 private:
  std::vector<std::string> gazetteer_;
};

struct NameFilterResult {
  std::vector<Post> kept;
  std::size_t without_names = 0;
  // Posts on which the recognizer threw; they are skipped, not kept.
  std::vector<std::string> recognizer_failures;
};

NameFilterResult filter_by_person_names(std::span<const Post> posts,
                                        const PersonNameRecognizer& recognizer);

/// Replaces every recognized person-name span with "##".
Post anonymize(const Post& post, const PersonNameRecognizer& recognizer);

// ---------------------------------------------------------------------------
// Dataset assembly
// ---------------------------------------------------------------------------

/// Merges the two normalized sources into one dataset sorted by id.
/// Throws when an id occurs more than once (both occurrences are reported).
Dataset build_hdcyberbullying(std::span<const LabeledPost> harassment,
                              std::span<const LabeledPost> defamation);

/// Class histogram of the released corpus: 1453 / 1204 / 250.
inline constexpr ClassCounts kReleasedHistogram{1453, 1204, 250};

struct CurveRow {
  std::size_t size;
  ClassCounts train_counts;  // (non-cyberbullying, harassment, defamation)
  std::size_t listed_test_size;
};

// Training compositions used for evaluation. Listed test sizes are kept for
// reporting; the effective test set is always the complement of train.
inline constexpr CurveRow kBaselineRow{291, {152, 119, 20}, 2615};
inline constexpr std::array<CurveRow, 6> kLearningCurveRows{{
    {72, {38, 29, 5}, 2834},
    {140, {73, 57, 10}, 2766},
    {210, {110, 86, 14}, 2696},
    {400, {209, 164, 27}, 2506},
    {700, {366, 286, 48}, 2206},
    {1300, {680, 531, 89}, 1606},
}};

/// Stratified split: per class floor(n_c * fraction) go to train, and the
/// rounding remainder round(n * fraction) - sum(floors) is handed out one item
/// per class in ascending class order. Same seed gives the same split.
DatasetSplit stratified_split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

/// Split with explicit per-class training counts; test is the complement.
DatasetSplit split_with_counts(const Dataset& dataset, const ClassCounts& train_counts,
                               std::uint64_t seed, std::string name = "custom");

/// Training composition used by the baseline regime: the pinned 152/119/20
/// for the released histogram, the 10% stratified rule otherwise.
ClassCounts baseline_train_counts(const ClassCounts& histogram);

/// The baseline (10%) split of a dataset.
DatasetSplit baseline_split(const Dataset& dataset, std::uint64_t seed);

/// Six nested training subsets (72 ... 1300) with the fixed per-class counts.
/// Each subset's test set is its complement.
std::vector<DatasetSplit> make_learning_curve_subsets(const Dataset& dataset, std::uint64_t seed);

/// Seeded sample of n posts without replacement, returned in id order.
std::vector<Post> sample_posts(std::span<const Post> posts, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

/// One object per line: {"id","text","labels","source"}. Blank lines are
/// skipped; any malformed line throws with its 1-based line number.
std::vector<Post> read_jsonl_posts(std::istream& in, Source default_source);
std::vector<Post> read_jsonl_posts(const std::filesystem::path& path, Source default_source);

void write_jsonl(std::ostream& out, std::span<const Post> posts);
/// Labeled form: "labels" carries the numeric class as a string ("0","1","2").
void write_jsonl(std::ostream& out, const Dataset& dataset);
Dataset read_labeled_jsonl(const std::filesystem::path& path);

/// Emotion corpus: every label must belong to the 28-label taxonomy, every
/// post must carry at least one label. Missing ids become "emotion-<line>".
std::vector<Post> load_emotion_corpus(std::istream& in);
std::vector<Post> load_emotion_corpus(const std::filesystem::path& path);

/// CSV manifest with columns split_name,id,role.
void write_split_manifest(std::ostream& out, std::span<const DatasetSplit> splits);

struct SplitManifestRow {
  std::string split_name;
  std::string id;
  std::string role;
};
std::vector<SplitManifestRow> read_split_manifest(std::istream& in);

std::unordered_set<std::string> id_set(const Dataset& dataset);

}  // namespace eat
