#include "eat/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <string>
#include <string_view>

#include "eat/mapping.hpp"

namespace eat {

namespace {

constexpr std::array<std::string_view, 40> kHarassmentWords{
    "moron",   "idiot",     "pathetic", "stupid",   "loser",    "disgusting", "trash",
    "clown",   "coward",    "creep",    "fool",     "ugly",     "worthless",  "dumb",
    "vile",    "hateful",   "gross",    "liar",     "jerk",     "nasty",      "rude",
    "shut",    "incompetent", "hypocrite", "scum",  "sick",     "ignorant",   "bigot",
    "lunatic", "psycho",    "garbage",  "filthy",   "sleazy",   "repulsive",  "arrogant",
    "spineless", "brainless", "useless", "toxic",   "insulting"};

constexpr std::array<std::string_view, 40> kDefamationWords{
    "shocking", "secret",   "rumor",     "exclusive", "revealed",  "scandal",  "affair",
    "insider",  "allegedly", "breakup",  "rehab",     "divorce",   "pregnant", "hidden",
    "leaked",   "bombshell", "spotted",  "feud",      "split",     "cheating", "claims",
    "sources",  "whispers", "unbelievable", "stunned", "wow",      "sudden",   "unexpected",
    "reportedly", "confirmed", "mystery", "twist",    "relapse",   "meltdown", "showdown",
    "surprising", "astonishing", "hoax",  "tabloid",  "gossip"};

constexpr std::array<std::string_view, 40> kNeutralClassWords{
    "thanks",  "great",    "love",      "wonderful", "appreciate", "awesome",  "happy",
    "congrats", "beautiful", "fantastic", "glad",    "grateful",   "kind",     "amazing",
    "enjoy",   "lovely",   "brilliant", "delighted", "helpful",    "cheers",   "excellent",
    "pleased", "fun",      "best",      "nice",      "sweet",      "thankful", "blessed",
    "joy",     "celebrate", "smile",    "proud",     "welcome",    "perfect",  "pics",
    "cute",    "adorable", "gorgeous",  "superb",    "favorite"};

constexpr std::array<std::string_view, 30> kOtherEmotionWords{
    "maybe",  "wonder",   "confused",  "sorry",   "sad",      "afraid",  "hope",
    "miss",   "worried",  "realize",   "curious", "guess",    "wish",    "nervous",
    "relief", "regret",   "proud",     "okay",    "hmm",      "whatever", "fine",
    "agree",  "disagree", "question",  "unsure",  "honestly", "seems",   "probably",
    "tired",  "meh"};

constexpr std::array<std::string_view, 80> kFillerWords{
    "the",   "a",     "is",    "it",    "that",  "this",  "was",   "for",   "on",    "with",
    "as",    "they",  "be",    "at",    "one",   "have",  "from",  "or",    "had",   "by",
    "but",   "some",  "what",  "there", "we",    "can",   "out",   "other", "were",  "all",
    "your",  "when",  "up",    "use",   "word",  "how",   "said",  "an",    "each",  "she",
    "which", "do",    "their", "time",  "if",    "will",  "way",   "about", "many",  "then",
    "them",  "would", "write", "like",  "so",    "these", "her",   "long",  "make",  "thing",
    "see",   "him",   "two",   "has",   "look",  "more",  "day",   "could", "go",    "come",
    "did",   "my",    "no",    "most",  "who",   "over",  "know",  "than",  "call",  "first"};

constexpr std::array<std::string_view, 24> kCyberDomainWords{
    "page",   "edit",    "article", "editor", "userpage", "revert", "talk",   "wikipedia",
    "source", "block",   "admin",   "policy", "star",     "actor",  "singer", "show",
    "report", "celebrity", "film",  "album",  "tour",     "fans",   "media",  "interview"};

constexpr std::array<std::string_view, 16> kEmotionDomainWords{
    "lol", "reddit", "sub", "op", "upvote", "bro", "dude", "thread",
    "comment", "post", "mods", "karma", "meme", "haha", "omg", "tbh"};

constexpr std::array<std::string_view, 24> kFirstNames{
    "John", "Maria", "David", "Sarah", "James", "Linda", "Robert", "Emma",
    "Michael", "Olivia", "William", "Sophia", "Daniel", "Isabella", "Thomas", "Mia",
    "Charles", "Grace", "Henry", "Chloe", "Lucas", "Hannah", "Oliver", "Zoe"};

constexpr std::array<std::string_view, 24> kLastNames{
    "Smith", "Garcia", "Johnson", "Brown", "Miller", "Davis", "Wilson", "Moore",
    "Taylor", "Anderson", "Thomas", "Jackson", "White", "Harris", "Martin", "Thompson",
    "Clark", "Lewis", "Walker", "Young", "Allen", "King", "Wright", "Scott"};

constexpr std::array<std::string_view, 6> kHarassmentTags{
    "Malignant", "Highly malignant", "Rude", "Threat", "Abuse", "Loathe"};

class Generator {
 public:
  Generator(const SyntheticOptions& options) : options_(options), rng_(options.seed) {}

  // Words for a text whose signal comes from pool `signal_class`
  // (0..2 = cyberbullying class vocabularies, 3 = other emotions).
  std::string text(int signal_class, double mean_words, bool cyber_domain, bool with_name) {
    const auto lo = std::max<std::size_t>(3, static_cast<std::size_t>(mean_words * 0.5));
    const auto hi = std::max<std::size_t>(lo, static_cast<std::size_t>(mean_words * 1.5));
    const std::size_t words = uniform(lo, hi);
    const std::size_t name_at = with_name ? uniform(0, words - 1) : words;
    std::string out;
    out.reserve(words * 7);
    for (std::size_t i = 0; i < words; ++i) {
      if (!out.empty()) out.push_back(' ');
      if (i == name_at) {
        out += pick(kFirstNames);
        out.push_back(' ');
        out += pick(kLastNames);
        out.push_back(' ');
      }
      out += word(signal_class, cyber_domain);
    }
    return out;
  }

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  template <std::size_t N>
  std::string_view pick(const std::array<std::string_view, N>& pool) {
    return pool[uniform(0, N - 1)];
  }

 private:
  std::string_view class_word(int cls) {
    switch (cls) {
      case 0: return pick(kNeutralClassWords);
      case 1: return pick(kHarassmentWords);
      case 2: return pick(kDefamationWords);
      default: return pick(kOtherEmotionWords);
    }
  }

  std::string_view word(int signal_class, bool cyber_domain) {
    if (chance(options_.signal_rate)) {
      if (signal_class <= 2 && chance(options_.cross_rate)) {
        const int other = static_cast<int>((signal_class + 1 + uniform(0, 1)) % 3);
        return class_word(other);
      }
      return class_word(signal_class);
    }
    if (chance(0.2)) return cyber_domain ? pick(kCyberDomainWords) : pick(kEmotionDomainWords);
    return pick(kFillerWords);
  }

  const SyntheticOptions& options_;
  std::mt19937_64 rng_;
};

std::string make_id(std::string_view prefix, std::size_t n) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%06zu", n);
  return std::string(prefix) + "-" + buffer;
}

}  // namespace

SyntheticOptions short_text_options(std::uint64_t seed) {
  SyntheticOptions options;
  options.seed = seed;
  options.harassment_mean_words = 24.0;
  options.defamation_mean_words = 40.0;
  options.emotion_mean_words = 14.0;
  return options;
}

SyntheticCorpora make_synthetic_corpora(const SyntheticOptions& options) {
  Generator gen(options);
  SyntheticCorpora corpora;

  // Harassment corpus: tagged, clean, then unnamed comments in shuffled id order.
  const std::size_t total_harassment =
      options.harassment_tagged + options.harassment_clean + options.harassment_unnamed;
  std::vector<int> kinds;
  kinds.insert(kinds.end(), options.harassment_tagged, 1);
  kinds.insert(kinds.end(), options.harassment_clean, 0);
  kinds.insert(kinds.end(), options.harassment_unnamed, -1);
  std::vector<std::size_t> order(total_harassment);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[gen.uniform(0, i - 1)]);

  for (std::size_t n = 0; n < total_harassment; ++n) {
    int kind = kinds[order[n]];
    const bool named = kind >= 0;
    if (!named) kind = gen.chance(0.5) ? 1 : 0;
    Post post;
    post.id = make_id("harassment", n + 1);
    post.source = Source::harassment_corpus;
    post.text = gen.text(kind, options.harassment_mean_words, true, named);
    if (kind == 1) {
      const std::size_t tags = gen.uniform(1, 3);
      for (std::size_t t = 0; t < tags; ++t) {
        std::string tag(gen.pick(kHarassmentTags));
        if (std::find(post.raw_labels.begin(), post.raw_labels.end(), tag) ==
            post.raw_labels.end()) {
          post.raw_labels.push_back(std::move(tag));
        }
      }
    } else {
      post.raw_labels = {"clean"};
    }
    corpora.harassment.push_back(std::move(post));
  }

  const std::size_t total_defamation = options.defamation_fake + options.defamation_legitimate;
  for (std::size_t n = 0; n < total_defamation; ++n) {
    // Articles come in fake/legitimate pairs while both kinds remain.
    const bool fake = n < 2 * std::min(options.defamation_fake, options.defamation_legitimate)
                          ? n % 2 == 0
                          : options.defamation_fake > options.defamation_legitimate;
    Post post;
    post.id = make_id("defamation", n + 1);
    post.source = Source::defamation_corpus;
    post.text = gen.text(fake ? 2 : 0, options.defamation_mean_words, true, true);
    post.raw_labels = {fake ? "fake" : "legitimate"};
    corpora.defamation.push_back(std::move(post));
  }

  // Emotion corpus. Mapped emotions carry their class vocabulary; the rest
  // use a generic emotional vocabulary.
  const auto map = default_concept_map();
  const auto mapped = map.mapped_emotions();
  std::vector<int> unmapped;
  for (int e = 0; e < kNumEmotions; ++e) {
    if (!map.lookup(EmotionLabel::from_index(e))) unmapped.push_back(e);
  }
  for (std::size_t n = 0; n < options.emotion_posts; ++n) {
    Post post;
    post.id = make_id("emotion", n + 1);
    post.source = Source::emotion_corpus;
    int signal = 3;
    if (gen.chance(0.55)) {
      const auto emotion = mapped[gen.uniform(0, mapped.size() - 1)];
      signal = to_int(*map.lookup(emotion));
      post.raw_labels.emplace_back(emotion.name());
      if (gen.chance(options.emotion_conflict_rate)) {
        // Plant a label that maps to a different class.
        for (const auto other : mapped) {
          if (*map.lookup(other) != *map.lookup(emotion)) {
            post.raw_labels.emplace_back(other.name());
            break;
          }
        }
      } else if (gen.chance(0.15)) {
        post.raw_labels.emplace_back(
            EmotionLabel::from_index(unmapped[gen.uniform(0, unmapped.size() - 1)]).name());
      }
    } else {
      post.raw_labels.emplace_back(
          EmotionLabel::from_index(unmapped[gen.uniform(0, unmapped.size() - 1)]).name());
    }
    post.text = gen.text(signal, options.emotion_mean_words, false, false);
    corpora.emotion.push_back(std::move(post));
  }
  return corpora;
}

}  // namespace eat
