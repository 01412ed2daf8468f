#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "eat/core.hpp"

namespace eat {

// Generated stand-ins for the upstream corpora. Class vocabularies are shared
// between the emotion corpus and the cyberbullying corpora (anger/disgust
// posts use the harassment vocabulary, surprise the defamation one,
// gratitude/joy the non-cyberbullying one), so the concept map is meaningful.
struct SyntheticOptions {
  std::uint64_t seed = 2024;

  // Harassment corpus: tagged comments, clean comments, and comments that
  // mention nobody (removed by the person-name filter).
  std::size_t harassment_tagged = 1204;
  std::size_t harassment_clean = 1203;
  std::size_t harassment_unnamed = 300;

  std::size_t defamation_fake = 250;
  std::size_t defamation_legitimate = 250;

  std::size_t emotion_posts = 9000;
  // Share of emotion posts that carry two mapped labels of different classes.
  double emotion_conflict_rate = 0.03;

  double harassment_mean_words = 455.0;
  double defamation_mean_words = 1985.0;
  double emotion_mean_words = 14.0;

  // Probability that a word is drawn from a class vocabulary, and probability
  // that such a word comes from the wrong class.
  double signal_rate = 0.10;
  double cross_rate = 0.25;
};

/// Short-text options used by the desk-scale transfer checks.
SyntheticOptions short_text_options(std::uint64_t seed = 2024);

struct SyntheticCorpora {
  std::vector<Post> harassment;  // raw tags in raw_labels
  std::vector<Post> defamation;  // "fake" / "legitimate"
  std::vector<Post> emotion;     // taxonomy labels
};

SyntheticCorpora make_synthetic_corpora(const SyntheticOptions& options);

}  // namespace eat
