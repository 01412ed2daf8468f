#include "eat/core.hpp"

#include <cctype>
#include <charconv>

namespace eat {

std::string_view to_string(Source source) {
  switch (source) {
    case Source::harassment_corpus: return "harassment_corpus";
    case Source::defamation_corpus: return "defamation_corpus";
    case Source::emotion_corpus: return "emotion_corpus";
  }
  return "unknown";
}

Source parse_source(std::string_view name) {
  const std::string key = normalize_tag(name);
  if (key == "harassment corpus" || key == "harassment") return Source::harassment_corpus;
  if (key == "defamation corpus" || key == "defamation") return Source::defamation_corpus;
  if (key == "emotion corpus" || key == "emotion") return Source::emotion_corpus;
  throw Error("unknown source '" + std::string(name) + "'");
}

CyberLabel cyber_label_from_int(int value) {
  if (value < 0 || value >= kNumCyberClasses) {
    throw Error("cyberbullying label out of range: " + std::to_string(value));
  }
  return static_cast<CyberLabel>(value);
}

std::string_view short_name(CyberLabel label) {
  switch (label) {
    case CyberLabel::non_cyberbullying: return "N";
    case CyberLabel::harassment: return "H";
    case CyberLabel::defamation: return "D";
  }
  return "?";
}

ClassCounts class_histogram(const Dataset& dataset) {
  ClassCounts counts{};
  for (const auto& item : dataset) ++counts[static_cast<std::size_t>(to_int(item.label))];
  return counts;
}

std::string normalize_tag(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || c == '_' || c == '-') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace eat
