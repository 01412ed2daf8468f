#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eat {

// All recoverable failures in the library are reported with this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Source { harassment_corpus, defamation_corpus, emotion_corpus };

std::string_view to_string(Source source);
Source parse_source(std::string_view name);

// 0 = non-cyberbullying, 1 = harassment, 2 = defamation.
enum class CyberLabel : int { non_cyberbullying = 0, harassment = 1, defamation = 2 };

inline constexpr int kNumCyberClasses = 3;
inline constexpr std::array<CyberLabel, 3> kCyberLabels{
    CyberLabel::non_cyberbullying, CyberLabel::harassment, CyberLabel::defamation};

/// Validating conversion; throws eat::Error outside {0,1,2}.
CyberLabel cyber_label_from_int(int value);
constexpr int to_int(CyberLabel label) { return static_cast<int>(label); }
std::string_view short_name(CyberLabel label);  // "N", "H", "D"

struct Post {
  std::string id;
  std::string text;
  Source source = Source::harassment_corpus;
  std::vector<std::string> raw_labels;
  bool anonymized = false;
};

struct LabeledPost {
  Post post;
  CyberLabel label = CyberLabel::non_cyberbullying;
};

using Dataset = std::vector<LabeledPost>;

// Indexed by to_int(CyberLabel).
using ClassCounts = std::array<std::size_t, 3>;

ClassCounts class_histogram(const Dataset& dataset);

struct DatasetSplit {
  std::string name;
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
};

// Lower-case, trim, and collapse runs of whitespace/underscore/hyphen to one space.
std::string normalize_tag(std::string_view raw);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace eat
