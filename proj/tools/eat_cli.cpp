#include <charconv>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "eat/cli.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const std::string field = text.substr(pos, comma - pos);
    std::uint64_t seed = 0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), seed);
    if (field.empty() || result.ec != std::errc{} || result.ptr != field.data() + field.size()) {
      throw CLI::ValidationError("--seed-list", "'" + field + "' is not a seed");
    }
    seeds.push_back(seed);
    pos = comma + 1;
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion-aware transfer experiments for cyberbullying detection"};
  app.require_subcommand(1);

  eat::cli::BuildCorpusOptions build;
  auto* build_cmd = app.add_subcommand("build-corpus", "Assemble the cyberbullying corpus");
  build_cmd->add_option("--data-dir", build.data_dir, "Directory with the source JSONL files")
      ->required()
      ->check(CLI::ExistingDirectory);
  build_cmd->add_option("--out", build.out_dir, "Output directory")->required();
  build_cmd->add_flag("--anonymize", build.anonymize, "Replace person names with ##");

  eat::cli::RunOptions run;
  std::string backend;
  std::string seed_list;
  auto* run_cmd = app.add_subcommand("run", "Execute an experiment spec");
  run_cmd->add_option("--spec", run.spec_path, "Experiment spec (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--data-dir", run.data_dir, "Directory produced by build-corpus")
      ->required()
      ->check(CLI::ExistingDirectory);
  run_cmd->add_option("--out", run.out_dir, "Run directory")->required();
  run_cmd->add_option("--backend", backend, "Override the spec's model id");
  run_cmd->add_option("--seed-list", seed_list, "Comma-separated seeds overriding the spec");

  eat::cli::AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Likelihood, similarity and projection data");
  analyze_cmd->add_option("--out", analyze.run_dir, "Completed run directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  analyze_cmd->add_option("--sample-size", analyze.sample_size, "Posts sampled per domain");

  eat::cli::ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Compare completed runs");
  report_cmd->add_option("runs", report.run_dirs, "Run directories")->required();
  report_cmd->add_option("--out", report.out_dir, "Report directory")->required();

  eat::cli::SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth-data", "Generate stand-in source corpora");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_flag("--short-texts", synth.short_texts, "Short posts for quick experiments");

  try {
    app.parse(argc, argv);
    if (!backend.empty()) run.backend = backend;
    if (!seed_list.empty()) run.seed_list = parse_seed_list(seed_list);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*build_cmd) return eat::cli::cmd_build_corpus(build, std::cerr);
  if (*run_cmd) return eat::cli::cmd_run(run, std::cerr);
  if (*analyze_cmd) return eat::cli::cmd_analyze(analyze, std::cerr);
  if (*report_cmd) return eat::cli::cmd_report(report, std::cerr);
  return eat::cli::cmd_synth_data(synth, std::cerr);
}
