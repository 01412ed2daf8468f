#include "eat/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "csv.hpp"
#include "eat/mapping.hpp"

namespace eat {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kHarassmentTags{
    "malignant", "highly malignant", "rude", "threat", "abuse", "loathe"};
constexpr std::array<std::string_view, 3> kCleanTags{"clean", "none", "normal"};

bool contains(std::span<const std::string_view> set, std::string_view value) {
  return std::find(set.begin(), set.end(), value) != set.end();
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_capitalized_word(std::string_view word) {
  if (word.size() < 2) return false;
  if (!std::isupper(static_cast<unsigned char>(word[0]))) return false;
  // At least one lower-case letter rules out acronyms and shouting.
  return std::any_of(word.begin() + 1, word.end(),
                     [](char c) { return std::islower(static_cast<unsigned char>(c)); });
}

struct WordToken {
  std::size_t begin;
  std::size_t end;
  bool breaks_after;  // trailing punctuation ends a name run
};

std::vector<WordToken> word_tokens(std::string_view text) {
  std::vector<WordToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) break;
    std::size_t b = start;
    std::size_t e = i;
    while (b < e && std::ispunct(static_cast<unsigned char>(text[b])) && text[b] != '#') ++b;
    bool breaks = false;
    while (e > b && std::ispunct(static_cast<unsigned char>(text[e - 1])) && text[e - 1] != '#') {
      --e;
      breaks = true;
    }
    if (b < e) tokens.push_back({b, e, breaks});
  }
  return tokens;
}

// Indices of each class, each list ordered by id.
std::array<std::vector<std::size_t>, 3> class_members(const Dataset& dataset) {
  std::array<std::vector<std::size_t>, 3> members;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    members[static_cast<std::size_t>(to_int(dataset[i].label))].push_back(i);
  }
  for (auto& list : members) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return dataset[a].post.id < dataset[b].post.id;
    });
  }
  return members;
}

std::array<std::vector<std::size_t>, 3> shuffled_class_members(const Dataset& dataset,
                                                               std::uint64_t seed) {
  auto members = class_members(dataset);
  std::mt19937_64 rng(seed);
  for (auto& list : members) std::shuffle(list.begin(), list.end(), rng);
  return members;
}

void sort_by_id(Dataset& data) {
  std::sort(data.begin(), data.end(),
            [](const LabeledPost& a, const LabeledPost& b) { return a.post.id < b.post.id; });
}

DatasetSplit split_from_prefixes(const Dataset& dataset,
                                 const std::array<std::vector<std::size_t>, 3>& order,
                                 const ClassCounts& counts, std::uint64_t seed, std::string name) {
  std::vector<bool> in_train(dataset.size(), false);
  for (std::size_t c = 0; c < 3; ++c) {
    if (counts[c] > order[c].size()) {
      throw Error("split '" + name + "': class " + std::to_string(c) + " needs " +
                  std::to_string(counts[c]) + " training items but has only " +
                  std::to_string(order[c].size()));
    }
    for (std::size_t i = 0; i < counts[c]; ++i) in_train[order[c][i]] = true;
  }
  DatasetSplit split;
  split.name = std::move(name);
  split.seed = seed;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (in_train[i] ? split.train : split.test).push_back(dataset[i]);
  }
  sort_by_id(split.train);
  sort_by_id(split.test);
  return split;
}

ClassCounts stratified_counts(const ClassCounts& histogram, double fraction) {
  ClassCounts counts{};
  std::size_t floors = 0;
  std::size_t total_items = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    counts[c] = static_cast<std::size_t>(
        std::floor(static_cast<double>(histogram[c]) * fraction + 1e-9));
    if (histogram[c] > 0 && counts[c] >= histogram[c]) counts[c] = histogram[c] - 1;
    floors += counts[c];
    total_items += histogram[c];
  }
  const auto target =
      static_cast<std::size_t>(std::llround(static_cast<double>(total_items) * fraction));
  std::size_t remainder = target > floors ? target - floors : 0;
  for (std::size_t c = 0; c < 3 && remainder > 0; ++c) {
    if (counts[c] + 1 < histogram[c]) {
      ++counts[c];
      --remainder;
    }
  }
  return counts;
}

using PostValidator = std::function<void(Post&)>;

std::vector<Post> parse_jsonl(std::istream& in, Source default_source,
                              const std::string& id_prefix, const PostValidator& validate) {
  std::vector<Post> posts;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& message) {
      throw Error("line " + std::to_string(line_no) + ": " + message);
    };
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(std::string("malformed JSON (") + e.what() + ")");
    }
    if (!object.is_object()) fail("expected a JSON object");

    Post post;
    if (object.contains("id")) {
      if (!object["id"].is_string()) fail("\"id\" must be a string");
      post.id = object["id"].get<std::string>();
    } else {
      std::ostringstream generated;
      generated << id_prefix << '-' << std::setw(6) << std::setfill('0') << line_no;
      post.id = generated.str();
    }
    if (post.id.empty()) fail("empty id");

    if (!object.contains("text") || !object["text"].is_string()) fail("missing string \"text\"");
    post.text = object["text"].get<std::string>();
    if (trim(post.text).empty()) fail("text is empty after trimming");

    if (object.contains("labels")) {
      if (!object["labels"].is_array()) fail("\"labels\" must be an array of strings");
      for (const auto& label : object["labels"]) {
        if (!label.is_string()) fail("\"labels\" must be an array of strings");
        post.raw_labels.push_back(label.get<std::string>());
      }
    }
    post.source = default_source;
    if (object.contains("source")) {
      if (!object["source"].is_string()) fail("\"source\" must be a string");
      try {
        post.source = parse_source(object["source"].get<std::string>());
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    if (object.contains("anonymized") && object["anonymized"].is_boolean()) {
      post.anonymized = object["anonymized"].get<bool>();
    }
    if (const auto [it, inserted] = seen.emplace(post.id, line_no); !inserted) {
      fail("duplicate id '" + post.id + "' (first seen on line " + std::to_string(it->second) +
           ")");
    }
    if (validate) {
      try {
        validate(post);
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    posts.push_back(std::move(post));
  }
  return posts;
}

std::ifstream open_for_reading(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

template <typename Fn>
auto with_path_context(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

json post_to_json(const Post& post) {
  json j;
  j["id"] = post.id;
  j["text"] = post.text;
  j["labels"] = post.raw_labels;
  j["source"] = std::string(to_string(post.source));
  if (post.anonymized) j["anonymized"] = true;
  return j;
}

}  // namespace

CyberLabel normalize_harassment_labels(std::span<const std::string> raw_labels) {
  if (raw_labels.empty()) throw Error("harassment post has empty labels");
  bool harassment = false;
  for (const auto& raw : raw_labels) {
    const std::string tag = normalize_tag(raw);
    if (contains(kHarassmentTags, tag)) {
      harassment = true;
    } else if (!contains(kCleanTags, tag)) {
      throw Error("unknown harassment tag '" + raw + "'");
    }
  }
  return harassment ? CyberLabel::harassment : CyberLabel::non_cyberbullying;
}

CyberLabel normalize_defamation_labels(std::string_view raw_label) {
  const std::string tag = normalize_tag(raw_label);
  if (tag == "fake") return CyberLabel::defamation;
  if (tag == "legitimate" || tag == "legit") return CyberLabel::non_cyberbullying;
  throw Error("unknown defamation label '" + std::string(raw_label) + "'");
}

HeuristicNameRecognizer::HeuristicNameRecognizer(std::vector<std::string> gazetteer)
    : gazetteer_(std::move(gazetteer)) {}

std::vector<NameSpan> HeuristicNameRecognizer::operator()(std::string_view text) const {
  std::vector<NameSpan> spans;
  const auto tokens = word_tokens(text);
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::string_view word = text.substr(tokens[i].begin, tokens[i].end - tokens[i].begin);
    if (word.starts_with("##")) {
      spans.push_back({tokens[i].begin, tokens[i].begin + 2});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tokens.size() &&
           is_capitalized_word(text.substr(tokens[j].begin, tokens[j].end - tokens[j].begin))) {
      if (tokens[j].breaks_after) {
        ++j;
        break;
      }
      ++j;
    }
    if (j - i >= 2) {
      spans.push_back({tokens[i].begin, tokens[j - 1].end});
      i = j;
    } else {
      ++i;
    }
  }
  for (const auto& name : gazetteer_) {
    if (name.empty()) continue;
    std::size_t pos = text.find(name);
    while (pos != std::string_view::npos) {
      const std::size_t end = pos + name.size();
      const bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
      const bool right_ok =
          end == text.size() || !std::isalnum(static_cast<unsigned char>(text[end]));
      if (left_ok && right_ok) spans.push_back({pos, end});
      pos = text.find(name, pos + 1);
    }
  }
  std::sort(spans.begin(), spans.end(),
            [](const NameSpan& a, const NameSpan& b) { return a.begin < b.begin; });
  return spans;
}

NameFilterResult filter_by_person_names(std::span<const Post> posts,
                                        const PersonNameRecognizer& recognizer) {
  NameFilterResult result;
  for (const auto& post : posts) {
    std::vector<NameSpan> spans;
    try {
      spans = recognizer(post.text);
    } catch (const std::exception&) {
      result.recognizer_failures.push_back(post.id);
      continue;
    }
    if (spans.empty()) {
      ++result.without_names;
    } else {
      result.kept.push_back(post);
    }
  }
  return result;
}

Post anonymize(const Post& post, const PersonNameRecognizer& recognizer) {
  auto spans = recognizer(post.text);
  std::sort(spans.begin(), spans.end(),
            [](const NameSpan& a, const NameSpan& b) { return a.begin < b.begin; });
  Post out = post;
  out.text.clear();
  std::size_t cursor = 0;
  for (const auto& span : spans) {
    if (span.end <= cursor) continue;
    const std::size_t begin = std::max(span.begin, cursor);
    out.text.append(post.text, cursor, begin - cursor);
    out.text += "##";
    cursor = std::min(span.end, post.text.size());
  }
  out.text.append(post.text, cursor, std::string::npos);
  out.anonymized = true;
  return out;
}

Dataset build_hdcyberbullying(std::span<const LabeledPost> harassment,
                              std::span<const LabeledPost> defamation) {
  Dataset merged;
  merged.reserve(harassment.size() + defamation.size());
  std::unordered_map<std::string, std::string> origin;
  auto add = [&](std::span<const LabeledPost> items, std::string_view name) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string where = std::string(name) + "[" + std::to_string(i) + "]";
      if (const auto [it, inserted] = origin.emplace(items[i].post.id, where); !inserted) {
        throw Error("duplicate id '" + items[i].post.id + "' in " + it->second + " and " + where);
      }
      merged.push_back(items[i]);
    }
  };
  add(harassment, "harassment");
  add(defamation, "defamation");
  sort_by_id(merged);
  return merged;
}

DatasetSplit stratified_split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error("train fraction must lie in (0, 1), got " + format_double(train_fraction));
  }
  const ClassCounts histogram = class_histogram(dataset);
  for (std::size_t c = 0; c < 3; ++c) {
    if (histogram[c] == 0) throw Error("class " + std::to_string(c) + " has no items");
  }
  return split_from_prefixes(dataset, shuffled_class_members(dataset, seed),
                             stratified_counts(histogram, train_fraction), seed,
                             "stratified_" + format_double(train_fraction));
}

DatasetSplit split_with_counts(const Dataset& dataset, const ClassCounts& train_counts,
                               std::uint64_t seed, std::string name) {
  return split_from_prefixes(dataset, shuffled_class_members(dataset, seed), train_counts, seed,
                             std::move(name));
}

ClassCounts baseline_train_counts(const ClassCounts& histogram) {
  if (histogram == kReleasedHistogram) return kBaselineRow.train_counts;
  return stratified_counts(histogram, 0.10);
}

DatasetSplit baseline_split(const Dataset& dataset, std::uint64_t seed) {
  const ClassCounts histogram = class_histogram(dataset);
  for (std::size_t c = 0; c < 3; ++c) {
    if (histogram[c] == 0) throw Error("class " + std::to_string(c) + " has no items");
  }
  return split_with_counts(dataset, baseline_train_counts(histogram), seed, "baseline");
}

std::vector<DatasetSplit> make_learning_curve_subsets(const Dataset& dataset, std::uint64_t seed) {
  const ClassCounts histogram = class_histogram(dataset);
  const auto order = shuffled_class_members(dataset, seed);
  std::vector<DatasetSplit> subsets;
  subsets.reserve(kLearningCurveRows.size());
  for (const auto& row : kLearningCurveRows) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (row.train_counts[c] > histogram[c]) {
        throw Error("subset " + std::to_string(row.size) + " needs " +
                    std::to_string(row.train_counts[c]) + " items of class " + std::to_string(c) +
                    ", population is " + std::to_string(histogram[c]));
      }
    }
    subsets.push_back(split_from_prefixes(dataset, order, row.train_counts, seed,
                                          "subset_" + std::to_string(row.size)));
  }
  return subsets;
}

std::vector<Post> sample_posts(std::span<const Post> posts, std::size_t n, std::uint64_t seed) {
  if (n > posts.size()) {
    throw Error("cannot sample " + std::to_string(n) + " posts from " +
                std::to_string(posts.size()));
  }
  std::vector<std::size_t> order(posts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return posts[a].id < posts[b].id; });
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(n);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return posts[a].id < posts[b].id; });
  std::vector<Post> sample;
  sample.reserve(n);
  for (const auto i : order) sample.push_back(posts[i]);
  return sample;
}

std::vector<Post> read_jsonl_posts(std::istream& in, Source default_source) {
  std::string prefix(to_string(default_source));
  prefix = prefix.substr(0, prefix.find('_'));
  return parse_jsonl(in, default_source, prefix, {});
}

std::vector<Post> read_jsonl_posts(const std::filesystem::path& path, Source default_source) {
  auto in = open_for_reading(path);
  return with_path_context(path, [&] { return read_jsonl_posts(in, default_source); });
}

void write_jsonl(std::ostream& out, std::span<const Post> posts) {
  for (const auto& post : posts) {
    out << post_to_json(post).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

void write_jsonl(std::ostream& out, const Dataset& dataset) {
  for (const auto& item : dataset) {
    json j = post_to_json(item.post);
    j["raw_labels"] = item.post.raw_labels;
    j["labels"] = json::array({std::to_string(to_int(item.label))});
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

Dataset read_labeled_jsonl(const std::filesystem::path& path) {
  auto in = open_for_reading(path);
  return with_path_context(path, [&] {
    Dataset dataset;
    for (auto& post : parse_jsonl(in, Source::harassment_corpus, "item", [](Post& p) {
           if (p.raw_labels.size() != 1) throw Error("labeled item needs exactly one label");
           const auto& label = p.raw_labels.front();
           if (label != "0" && label != "1" && label != "2") {
             throw Error("label '" + label + "' is not one of 0, 1, 2");
           }
         })) {
      LabeledPost item;
      item.label = cyber_label_from_int(std::stoi(post.raw_labels.front()));
      item.post = std::move(post);
      dataset.push_back(std::move(item));
    }
    sort_by_id(dataset);
    return dataset;
  });
}

std::vector<Post> load_emotion_corpus(std::istream& in) {
  return parse_jsonl(in, Source::emotion_corpus, "emotion", [](Post& post) {
    if (post.raw_labels.empty()) throw Error("post '" + post.id + "' carries no emotion label");
    for (auto& label : post.raw_labels) {
      const auto emotion = EmotionLabel::try_from_name(normalize_tag(label));
      if (!emotion) throw Error("unknown emotion label '" + label + "'");
      label = std::string(emotion->name());
    }
    post.source = Source::emotion_corpus;
  });
}

std::vector<Post> load_emotion_corpus(const std::filesystem::path& path) {
  auto in = open_for_reading(path);
  return with_path_context(path, [&] { return load_emotion_corpus(in); });
}

void write_split_manifest(std::ostream& out, std::span<const DatasetSplit> splits) {
  out << "split_name,id,role\n";
  for (const auto& split : splits) {
    for (const auto& item : split.train) {
      out << csv::quote(split.name) << ',' << csv::quote(item.post.id) << ",train\n";
    }
    for (const auto& item : split.test) {
      out << csv::quote(split.name) << ',' << csv::quote(item.post.id) << ",test\n";
    }
  }
}

std::vector<SplitManifestRow> read_split_manifest(std::istream& in) {
  std::vector<SplitManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    auto fields = csv::split_line(line);
    if (fields.size() != 3 || (fields[2] != "train" && fields[2] != "test")) {
      throw Error("split manifest line " + std::to_string(line_no) + " is malformed");
    }
    rows.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
  }
  return rows;
}

std::unordered_set<std::string> id_set(const Dataset& dataset) {
  std::unordered_set<std::string> ids;
  ids.reserve(dataset.size());
  for (const auto& item : dataset) ids.insert(item.post.id);
  return ids;
}

}  // namespace eat
