#include "eat/cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "csv.hpp"
#include "eat/backend.hpp"
#include "eat/corpus.hpp"
#include "eat/experiment.hpp"
#include "eat/geometry.hpp"
#include "eat/mapping.hpp"
#include "eat/metrics.hpp"
#include "eat/synthetic.hpp"

namespace eat::cli {

using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes through a sibling temp file and renames, so readers never see a
// half-written artifact.
void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw Error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / ".lock") {
    fs::create_directories(dir);
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      throw Error(dir.string() + ": locked by another process (remove " + path_.string() +
                  " if stale)");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto written = ::write(fd_, pid.data(), pid.size());
  }
  ~DirectoryLock() {
    ::close(fd_);
    std::error_code ignored;
    fs::remove(path_, ignored);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

// Records artifacts relative to a root directory together with their digests.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path root) : root_(std::move(root)) {}

  void write(const fs::path& relative, const std::string& content) {
    write_atomic(root_ / relative, content);
    artifacts_[relative.generic_string()] = sha256_bytes(content);
  }

  json listing() const {
    json out = json::array();
    for (const auto& [path, digest] : artifacts_) out.push_back({{"path", path}, {"sha256", digest}});
    return out;
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::map<std::string, std::string> artifacts_;
};

std::size_t word_count(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (const char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

double mean_words(const std::vector<const Post*>& posts) {
  if (posts.empty()) return 0.0;
  double total = 0.0;
  for (const auto* post : posts) total += static_cast<double>(word_count(post->text));
  return total / static_cast<double>(posts.size());
}

json counts_json(const ClassCounts& counts) {
  json out;
  for (const auto label : kCyberLabels) out[std::string(short_name(label))] = counts[to_int(label)];
  return out;
}

}  // namespace

std::string sha256_bytes(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < length; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
  return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_bytes(read_file(path)); }

// ---------------------------------------------------------------------------
// build-corpus
// ---------------------------------------------------------------------------

int cmd_build_corpus(const BuildCorpusOptions& options, std::ostream& log) {
  try {
    const auto harassment_path = options.data_dir / kHarassmentFile;
    const auto defamation_path = options.data_dir / kDefamationFile;
    for (const auto& path : {harassment_path, defamation_path}) {
      if (!fs::exists(path)) throw Error(path.string() + ": input file not found");
    }
    const auto harassment_raw = read_jsonl_posts(harassment_path, Source::harassment_corpus);
    const auto defamation_raw = read_jsonl_posts(defamation_path, Source::defamation_corpus);
    if (harassment_raw.empty()) throw Error(harassment_path.string() + ": no posts");
    if (defamation_raw.empty()) throw Error(defamation_path.string() + ": no posts");

    const PersonNameRecognizer recognizer = HeuristicNameRecognizer{};
    const auto filtered = filter_by_person_names(harassment_raw, recognizer);

    std::vector<LabeledPost> harassment;
    harassment.reserve(filtered.kept.size());
    for (const auto& post : filtered.kept) {
      try {
        harassment.push_back({options.anonymize ? anonymize(post, recognizer) : post,
                              normalize_harassment_labels(post.raw_labels)});
      } catch (const Error& e) {
        throw Error(harassment_path.string() + ": post '" + post.id + "': " + e.what());
      }
    }
    std::vector<LabeledPost> defamation;
    defamation.reserve(defamation_raw.size());
    for (const auto& post : defamation_raw) {
      try {
        if (post.raw_labels.size() != 1) {
          throw Error("expected exactly one label, got " + std::to_string(post.raw_labels.size()));
        }
        defamation.push_back({options.anonymize ? anonymize(post, recognizer) : post,
                              normalize_defamation_labels(post.raw_labels.front())});
      } catch (const Error& e) {
        throw Error(defamation_path.string() + ": post '" + post.id + "': " + e.what());
      }
    }

    const auto dataset = build_hdcyberbullying(harassment, defamation);
    const auto histogram = class_histogram(dataset);

    std::array<std::vector<const Post*>, 3> by_class;
    std::vector<const Post*> from_harassment;
    std::vector<const Post*> from_defamation;
    for (const auto& item : dataset) {
      by_class[to_int(item.label)].push_back(&item.post);
      (item.post.source == Source::defamation_corpus ? from_defamation : from_harassment)
          .push_back(&item.post);
    }

    json stats;
    stats["total"] = dataset.size();
    stats["class_counts"] = counts_json(histogram);
    json shares;
    json lengths;
    for (const auto label : kCyberLabels) {
      const auto c = static_cast<std::size_t>(to_int(label));
      shares[std::string(short_name(label))] =
          static_cast<double>(histogram[c]) / static_cast<double>(dataset.size());
      lengths[std::string(short_name(label))] = mean_words(by_class[c]);
    }
    stats["class_shares"] = shares;
    stats["mean_words_by_class"] = lengths;
    stats["mean_words_by_source"] = {{"harassment_corpus", mean_words(from_harassment)},
                                     {"defamation_corpus", mean_words(from_defamation)}};
    stats["name_filter"] = {{"input", harassment_raw.size()},
                            {"kept", filtered.kept.size()},
                            {"without_names", filtered.without_names},
                            {"recognizer_failures", filtered.recognizer_failures}};
    stats["anonymized"] = options.anonymize;
    json notes = json::array();
    if (histogram != kReleasedHistogram) {
      notes.push_back("class counts differ from the released corpus (1453/1204/250); the "
                      "baseline split falls back to the 10% stratified rule and the "
                      "learning-curve sizes may not be attainable");
    }
    stats["notes"] = notes;

    // The emotion corpus is validated and passed through so the output
    // directory can feed `run` directly.
    const auto emotion_path = options.data_dir / kEmotionFile;
    std::optional<std::string> emotion_bytes;
    if (fs::exists(emotion_path)) {
      const auto emotion = load_emotion_corpus(emotion_path);
      emotion_bytes = render([&](std::ostream& out) { write_jsonl(out, emotion); });
      stats["emotion_posts"] = emotion.size();
    }

    const std::string corpus_bytes = render([&](std::ostream& out) { write_jsonl(out, dataset); });
    fs::create_directories(options.out_dir);
    write_atomic(options.out_dir / kCorpusFile, corpus_bytes);
    if (emotion_bytes) write_atomic(options.out_dir / kEmotionFile, *emotion_bytes);
    write_atomic(options.out_dir / kStatsFile, stats.dump(2) + "\n");

    log << "wrote " << dataset.size() << " posts (" << histogram[0] << " / " << histogram[1]
        << " / " << histogram[2] << ") to " << (options.out_dir / kCorpusFile).string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "build-corpus: " << e.what() << "\n";
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

namespace {

void write_predictions(std::ostream& out, const RegimeResult& result) {
  out << "seed,id,truth,predicted\n";
  for (const auto& run : result.runs) {
    for (const auto& p : run.predictions) {
      out << run.seed << ',' << csv::quote(p.id) << ',' << to_int(p.truth) << ','
          << to_int(p.predicted) << '\n';
    }
  }
}

void write_regime(ArtifactWriter& writer, const fs::path& prefix, const RegimeResult& result) {
  for (const auto& run : result.runs) {
    const fs::path dir = prefix / ("seed_" + std::to_string(run.seed));
    writer.write(dir / "report.csv",
                 render([&](std::ostream& out) { write_report_csv(out, run.report); }));
    writer.write(dir / "confusion.csv",
                 render([&](std::ostream& out) { write_confusion_csv(out, run.report.confusion); }));
    writer.write(dir / "loss.csv",
                 render([&](std::ostream& out) { write_loss_csv(out, run.loss_trace); }));
  }
  writer.write(prefix / "predictions.csv",
               render([&](std::ostream& out) { write_predictions(out, result); }));
  writer.write(prefix / "aggregate.csv",
               render([&](std::ostream& out) { write_aggregate_csv(out, result.aggregate); }));
  writer.write(prefix / "aggregate_confusion.csv", render([&](std::ostream& out) {
                 write_confusion_csv(out, result.aggregate.confusion_mean);
               }));
  writer.write(prefix / "aggregate.json", json(result.aggregate).dump(2) + "\n");
}

ExperimentSpec load_spec(const RunOptions& options) {
  json j;
  try {
    j = json::parse(read_file(options.spec_path));
  } catch (const json::exception& e) {
    throw Error(options.spec_path.string() + ": " + e.what());
  }
  ExperimentSpec spec;
  try {
    spec = j.get<ExperimentSpec>();
    if (options.backend) spec.train_config.model_id = *options.backend;
    if (options.seed_list) spec.seeds = *options.seed_list;
    spec.validate();
  } catch (const std::exception& e) {
    throw Error(options.spec_path.string() + ": " + e.what());
  }
  return spec;
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& log) {
  ExperimentSpec spec;
  Dataset dataset;
  std::vector<Post> emotion;
  json checksums = json::object();
  try {
    spec = load_spec(options);
    // Fail early on unresolvable backends, before any data is read.
    make_handle(spec.train_config.model_id);
    const auto corpus_path = options.data_dir / kCorpusFile;
    dataset = read_labeled_jsonl(corpus_path);
    checksums[fs::absolute(corpus_path).string()] = sha256_file(corpus_path);
    if (spec.regime != Regime::baseline) {
      const auto emotion_path = options.data_dir / kEmotionFile;
      emotion = load_emotion_corpus(emotion_path);
      checksums[fs::absolute(emotion_path).string()] = sha256_file(emotion_path);
    }
  } catch (const std::exception& e) {
    log << "run: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    DirectoryLock lock(options.out_dir);
    ArtifactWriter writer(options.out_dir);
    const std::string spec_bytes = json(spec).dump(2) + "\n";

    json manifest;
    manifest["spec_hash"] = sha256_bytes(spec_bytes);
    manifest["regime"] = std::string(to_string(spec.regime));
    manifest["backend"] = spec.train_config.model_id;
    manifest["data_dir"] = fs::absolute(options.data_dir).string();
    manifest["data_checksums"] = checksums;
    manifest["seeds"] = spec.seeds;
    manifest["split_seed"] = spec.seeds.front();
    manifest["started"] = utc_now();
    manifest["notes"] = json::array(
        {"one split drawn with the first seed is shared by every seed; each seed drives its own "
         "emotion sample and training order"});

    writer.write("spec.json", spec_bytes);

    auto finish_manifest = [&](const std::string& status) {
      manifest["finished"] = utc_now();
      manifest["status"] = status;
      manifest["artifacts"] = writer.listing();
      write_atomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
    };

    try {
      std::vector<DatasetSplit> splits;
      switch (spec.regime) {
        case Regime::baseline:
        case Regime::zero_shot:
        case Regime::few_shot: {
          const RegimeResult result = spec.regime == Regime::baseline ? run_baseline(spec, dataset)
                                      : spec.regime == Regime::zero_shot
                                          ? run_zero_shot(spec, emotion, dataset)
                                          : run_few_shot(spec, emotion, dataset);
          write_regime(writer, "", result);
          splits.push_back(baseline_split(dataset, spec.seeds.front()));
          log << to_string(spec.regime) << ": macro-F1 " << format_double(result.aggregate.macro_mean(2))
              << " +/- " << format_double(result.aggregate.macro_std(2)) << " over "
              << result.runs.size() << " seeds\n";
          break;
        }
        case Regime::learning_curve: {
          const auto curve = run_learning_curve(spec, emotion, dataset);
          const auto subsets = make_learning_curve_subsets(dataset, spec.seeds.front());
          for (const auto& [size, point] : curve) {
            const fs::path dir = "lc_" + std::to_string(size);
            write_regime(writer, dir / "with_eat", point.with_eat);
            write_regime(writer, dir / "without_eat", point.without_eat);
            log << "size " << size << ": with EAT "
                << format_double(point.with_eat.aggregate.macro_mean(2)) << ", without "
                << format_double(point.without_eat.aggregate.macro_mean(2)) << "\n";
          }
          for (const auto& subset : subsets) {
            if (curve.contains(subset.train.size())) splits.push_back(subset);
          }
          break;
        }
      }
      writer.write("split.csv",
                   render([&](std::ostream& out) { write_split_manifest(out, splits); }));
    } catch (const SeedError& e) {
      manifest["failed_seed"] = e.seed();
      manifest["error"] = e.what();
      finish_manifest("failed");
      log << "run: " << e.what() << "\n";
      return kExitFailure;
    } catch (const std::exception& e) {
      manifest["error"] = e.what();
      finish_manifest("failed");
      log << "run: " << e.what() << "\n";
      return kExitFailure;
    }
    finish_manifest("complete");
    log << "run directory " << options.out_dir.string() << " complete\n";
    return 0;
  } catch (const std::exception& e) {
    log << "run: " << e.what() << "\n";
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

namespace {

struct PredictionRow {
  std::string id;
  CyberLabel truth;
};

// Test ids and truths of the first seed in a predictions.csv.
std::vector<PredictionRow> read_first_seed_predictions(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<PredictionRow> rows;
  std::string first_seed;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != 4) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
    }
    if (first_seed.empty()) first_seed = fields[0];
    if (fields[0] != first_seed) break;
    try {
      rows.push_back({fields[1], cyber_label_from_int(std::stoi(fields[2]))});
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

fs::path predictions_path(const fs::path& run_dir, const json& manifest) {
  if (manifest.value("regime", "") == "learning_curve") {
    // The largest subset present in the run.
    for (auto it = kLearningCurveRows.rbegin(); it != kLearningCurveRows.rend(); ++it) {
      const auto candidate =
          run_dir / ("lc_" + std::to_string(it->size)) / "with_eat" / "predictions.csv";
      if (fs::exists(candidate)) return candidate;
    }
    return run_dir / "lc_<size>" / "with_eat" / "predictions.csv";
  }
  return run_dir / "predictions.csv";
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& options, std::ostream& log) {
  try {
    const auto manifest_path = options.run_dir / "manifest.json";
    const auto spec_path = options.run_dir / "spec.json";
    std::vector<std::string> missing;
    for (const auto& path : {manifest_path, spec_path}) {
      if (!fs::exists(path)) missing.push_back(path.string());
    }
    json manifest;
    if (missing.empty()) manifest = json::parse(read_file(manifest_path));
    const auto predictions_file = predictions_path(options.run_dir, manifest);
    if (!fs::exists(predictions_file)) missing.push_back(predictions_file.string());
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += "\n  " + m;
      throw Error("run directory is missing required artifacts:" + list);
    }
    if (manifest.value("status", "") != "complete") {
      throw Error(options.run_dir.string() + ": run did not complete");
    }

    const auto spec = json::parse(read_file(spec_path)).get<ExperimentSpec>();
    const fs::path data_dir = manifest.at("data_dir").get<std::string>();
    const auto corpus_path = data_dir / kCorpusFile;
    const auto emotion_path = data_dir / kEmotionFile;
    for (const auto& path : {corpus_path, emotion_path}) {
      if (!fs::exists(path)) throw Error(path.string() + ": required data file not found");
    }
    const auto& checksums = manifest.at("data_checksums");
    const auto recorded = checksums.find(fs::absolute(corpus_path).string());
    if (recorded != checksums.end() && *recorded != sha256_file(corpus_path)) {
      log << "analyze: warning: " << corpus_path.string() << " changed since the run\n";
    }

    const auto dataset = read_labeled_jsonl(corpus_path);
    const auto emotion = load_emotion_corpus(emotion_path);
    const auto rows = read_first_seed_predictions(predictions_file);
    std::unordered_map<std::string, const Post*> by_id;
    for (const auto& item : dataset) by_id.emplace(item.post.id, &item.post);

    const std::uint64_t seed = spec.seeds.front();
    TrainConfig config = spec.train_config;
    config.seed = seed;

    DirectoryLock lock(options.run_dir / "analysis");
    ArtifactWriter writer(options.run_dir / "analysis");

    // Emotion likelihood per true class over the evaluated test posts.
    const auto classifier = train_emotion_classifier(emotion, config);
    std::vector<std::string_view> texts;
    texts.reserve(rows.size());
    for (const auto& row : rows) {
      const auto it = by_id.find(row.id);
      if (it == by_id.end()) {
        throw Error(predictions_file.string() + ": id '" + row.id + "' is not in the corpus");
      }
      texts.push_back(it->second->text);
    }
    const auto predicted = classifier->predict(texts);
    std::vector<std::pair<CyberLabel, EmotionLabel>> pairs;
    pairs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      pairs.emplace_back(rows[i].truth, EmotionLabel::from_index(predicted[i]));
    }
    const auto likelihood = emotion_likelihood_matrix(pairs);
    writer.write("likelihood.csv",
                 render([&](std::ostream& out) { write_likelihood_csv(out, likelihood); }));
    const auto check = check_harassment_emotions(likelihood, spec.concept_map);
    writer.write("harassment_emotions.json",
                 json{{"holds", check.holds},
                      {"harassment_mass", check.harassment_mass},
                      {"best_pair", {check.best_pair.first.name(), check.best_pair.second.name()}},
                      {"best_pair_mass", check.best_pair_mass},
                      {"row_argmax", check.row_argmax.name()},
                      {"message", check.message}}
                         .dump(2) +
                     "\n");

    // Domain similarity on equal-size samples of both domains.
    std::vector<Post> cyber_posts;
    cyber_posts.reserve(dataset.size());
    for (const auto& item : dataset) cyber_posts.push_back(item.post);
    const std::size_t n = std::min({options.sample_size, emotion.size(), cyber_posts.size()});
    if (n < options.sample_size) {
      log << "analyze: sampling " << n << " posts per domain (fewer than " << options.sample_size
          << " available)\n";
    }
    const auto emotion_sample = sample_posts(emotion, n, seed);
    const auto cyber_sample = sample_posts(cyber_posts, n, seed);
    const auto handle = make_handle(spec.train_config.model_id);
    const Embedder embedder = [&](std::span<const Post> posts) { return embed(*handle, posts); };
    SimilarityOptions similarity_options;
    similarity_options.mean_pairwise = options.mean_pairwise;
    const auto projection =
        domain_similarity(emotion_sample, cyber_sample, embedder, similarity_options);

    json similarity{{"method", "centroid_cosine"},
                    {"value", projection.similarity},
                    {"value_2d", projection.similarity_2d},
                    {"projection", projection.method},
                    {"explained_variance",
                     std::vector<double>(projection.explained_variance.data(),
                                         projection.explained_variance.data() +
                                             projection.explained_variance.size())},
                    {"seed", seed},
                    {"sample_size", n},
                    {"backend", spec.train_config.model_id}};
    similarity["mean_pairwise"] =
        projection.mean_pairwise ? json(*projection.mean_pairwise) : json(nullptr);
    writer.write("similarity.json", similarity.dump(2) + "\n");

    std::unordered_map<std::string, int> cyber_label;
    for (const auto& item : dataset) cyber_label.emplace(item.post.id, to_int(item.label));
    std::vector<int> labels;
    labels.reserve(2 * n);
    for (const auto& post : emotion_sample) {
      const auto mapped = mapped_class(post, spec.concept_map);
      labels.push_back(mapped ? to_int(*mapped) : -1);
    }
    for (const auto& post : cyber_sample) labels.push_back(cyber_label.at(post.id));
    writer.write("projection_pca.csv", render([&](std::ostream& out) {
                   export_projection(out, projection, labels);
                 }));
    write_atomic(options.run_dir / "analysis" / "manifest.json",
                 json{{"artifacts", writer.listing()}, {"finished", utc_now()}}.dump(2) + "\n");

    log << "similarity " << format_double(projection.similarity) << "; likelihood rows";
    for (const auto label : kCyberLabels) {
      log << ' ' << short_name(label) << '='
          << (likelihood.populated[to_int(label)] ? "ok" : "undefined");
    }
    log << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "analyze: " << e.what() << "\n";
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const ReportOptions& options, std::ostream& log) {
  try {
    if (options.run_dirs.empty()) throw Error("report: no run directories given");
    std::vector<std::pair<std::string, AggregateReport>> regimes;
    std::map<std::string, int> name_uses;
    json capacity_rows = json::array();
    std::ostringstream capacity;
    capacity << "size,with_eat_f1,with_eat_std,without_eat_f1,without_eat_std,gap\n";
    bool have_curve = false;

    for (const auto& dir : options.run_dirs) {
      const auto manifest_path = dir / "manifest.json";
      if (!fs::exists(manifest_path)) throw Error(manifest_path.string() + ": not found");
      const auto manifest = json::parse(read_file(manifest_path));
      if (manifest.value("status", "") != "complete") {
        throw Error(dir.string() + ": run did not complete");
      }
      const std::string regime = manifest.at("regime").get<std::string>();
      auto load = [&](const fs::path& path) {
        if (!fs::exists(path)) throw Error(path.string() + ": not found");
        return json::parse(read_file(path)).get<AggregateReport>();
      };
      if (regime == "learning_curve") {
        have_curve = true;
        for (const auto& row : kLearningCurveRows) {
          const fs::path lc = dir / ("lc_" + std::to_string(row.size));
          if (!fs::exists(lc)) continue;
          const auto with = load(lc / "with_eat" / "aggregate.json");
          const auto without = load(lc / "without_eat" / "aggregate.json");
          capacity << row.size << ',' << format_double(with.macro_mean(2)) << ','
                   << format_double(with.macro_std(2)) << ','
                   << format_double(without.macro_mean(2)) << ','
                   << format_double(without.macro_std(2)) << ','
                   << format_double(with.macro_mean(2) - without.macro_mean(2)) << '\n';
        }
        continue;
      }
      std::string name = regime;
      if (++name_uses[regime] > 1) name += "_" + std::to_string(name_uses[regime]);
      regimes.emplace_back(name, load(dir / "aggregate.json"));
    }

    fs::create_directories(options.out_dir);
    if (!regimes.empty()) {
      write_atomic(options.out_dir / "table3.csv",
                   render([&](std::ostream& out) { write_comparison_csv(out, regimes); }));
      log << "wrote " << (options.out_dir / "table3.csv").string() << "\n";
    }
    if (have_curve) {
      write_atomic(options.out_dir / "capacity.csv", capacity.str());
      log << "wrote " << (options.out_dir / "capacity.csv").string() << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    log << "report: " << e.what() << "\n";
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// synth-data
// ---------------------------------------------------------------------------

int cmd_synth_data(const SynthOptions& options, std::ostream& log) {
  try {
    auto synth = options.short_texts ? short_text_options(options.seed) : SyntheticOptions{};
    synth.seed = options.seed;
    const auto corpora = make_synthetic_corpora(synth);
    fs::create_directories(options.out_dir);
    const std::pair<const char*, const std::vector<Post>*> files[] = {
        {kHarassmentFile, &corpora.harassment},
        {kDefamationFile, &corpora.defamation},
        {kEmotionFile, &corpora.emotion}};
    for (const auto& [name, posts] : files) {
      write_atomic(options.out_dir / name,
                   render([&](std::ostream& out) { write_jsonl(out, *posts); }));
      log << "wrote " << posts->size() << " posts to " << (options.out_dir / name).string()
          << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    log << "synth-data: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace eat::cli
