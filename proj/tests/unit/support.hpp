#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eat/core.hpp"
#include "eat/corpus.hpp"
#include "eat/synthetic.hpp"

namespace testing {

inline eat::Post post(std::string id, std::string text, std::vector<std::string> labels = {},
                      eat::Source source = eat::Source::harassment_corpus) {
  eat::Post p;
  p.id = std::move(id);
  p.text = std::move(text);
  p.raw_labels = std::move(labels);
  p.source = source;
  return p;
}

inline eat::LabeledPost item(std::string id, int label, std::string text = "some words") {
  return {post(std::move(id), std::move(text)), eat::cyber_label_from_int(label)};
}

// Dataset with the given per-class sizes; ids are "c<class>-<n>".
inline eat::Dataset toy_dataset(std::size_t n0, std::size_t n1, std::size_t n2) {
  eat::Dataset data;
  const std::size_t sizes[3] = {n0, n1, n2};
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "c%d-%05zu", c, i);
      data.push_back(item(id, c));
    }
  }
  return data;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("eat_test_" + name + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// The merged three-class dataset built in memory from generated corpora, the
// same way build-corpus does it.
inline eat::Dataset synthetic_dataset(const eat::SyntheticCorpora& corpora) {
  const eat::PersonNameRecognizer recognizer = eat::HeuristicNameRecognizer{};
  const auto named = eat::filter_by_person_names(corpora.harassment, recognizer);
  std::vector<eat::LabeledPost> harassment;
  for (const auto& p : named.kept) {
    harassment.push_back({p, eat::normalize_harassment_labels(p.raw_labels)});
  }
  std::vector<eat::LabeledPost> defamation;
  for (const auto& p : corpora.defamation) {
    defamation.push_back({p, eat::normalize_defamation_labels(p.raw_labels.at(0))});
  }
  return eat::build_hdcyberbullying(harassment, defamation);
}

inline const std::filesystem::path kFixtures = EAT_FIXTURE_DIR;

}  // namespace testing
