#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eat::cli {

namespace fs = std::filesystem;

// File names inside a data directory.
inline constexpr const char* kHarassmentFile = "harassment.jsonl";
inline constexpr const char* kDefamationFile = "defamation.jsonl";
inline constexpr const char* kEmotionFile = "emotion.jsonl";
inline constexpr const char* kCorpusFile = "hdcyberbullying.jsonl";
inline constexpr const char* kStatsFile = "stats.json";

struct BuildCorpusOptions {
  fs::path data_dir;
  fs::path out_dir;
  bool anonymize = false;
};

/// Reads harassment.jsonl and defamation.jsonl, normalizes labels, keeps named
/// harassment comments, merges, and writes hdcyberbullying.jsonl + stats.json.
/// Nothing is written unless every step succeeds.
int cmd_build_corpus(const BuildCorpusOptions& options, std::ostream& log);

struct RunOptions {
  fs::path spec_path;
  fs::path data_dir;  // hdcyberbullying.jsonl (+ emotion.jsonl for EAT regimes)
  fs::path out_dir;
  std::optional<std::string> backend;
  std::optional<std::vector<std::uint64_t>> seed_list;
};

/// Executes one experiment spec into a run directory with a manifest.
/// Returns 0 iff every seed completed.
int cmd_run(const RunOptions& options, std::ostream& log);

struct AnalyzeOptions {
  fs::path run_dir;
  std::size_t sample_size = 1000;
  bool mean_pairwise = true;
};

/// Likelihood CSV, similarity JSON and projection CSV for a completed run.
int cmd_analyze(const AnalyzeOptions& options, std::ostream& log);

struct ReportOptions {
  std::vector<fs::path> run_dirs;
  fs::path out_dir;
};

/// Side-by-side comparison table of regimes, plus capacity.csv for
/// learning-curve runs.
int cmd_report(const ReportOptions& options, std::ostream& log);

struct SynthOptions {
  fs::path out_dir;
  std::uint64_t seed = 2024;
  bool short_texts = false;
};

/// Writes generated harassment/defamation/emotion corpora to out_dir.
int cmd_synth_data(const SynthOptions& options, std::ostream& log);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);
std::string sha256_bytes(std::string_view bytes);

}  // namespace eat::cli
