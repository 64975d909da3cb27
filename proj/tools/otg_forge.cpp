// otg_forge: command-line driver for the template-based domain adaptation
// pipeline. Every stage reads and writes the JSONL artifacts under
// <out>/seed-<n>/, so stages can be run one at a time.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otgforge/config.hpp"
#include "otgforge/error.hpp"
#include "otgforge/runner.hpp"
#include "otgforge/text.hpp"

namespace {

using otgforge::Error;
using otgforge::ErrorCode;

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  bool desk_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Pipeline config file")->required();
  cmd->add_option("--seed", o.seed, "Run a single seed");
  cmd->add_option("--seeds", o.seeds, "Seed range A..B or list a,b,c");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--desk-scale", o.desk_scale, "k=200 per selection, at most 5000 weak sentences");
}

otgforge::PipelineConfig resolve_config(const CommonOptions& o) {
  auto config = otgforge::load_config(o.config_path);
  if (o.desk_scale) config.apply_desk_scale();
  if (!o.seeds.empty()) config.seeds = otgforge::parse_seed_list(o.seeds);
  if (o.seed) config.seeds = {*o.seed};
  if (!o.out.empty()) config.output_dir = o.out;
  config.validate();
  return config;
}

void print_result(const otgforge::PipelineConfig& config) {
  const auto table = config.output_dir / "report.txt";
  std::ifstream in(table);
  if (in) std::cout << in.rdbuf();
}

std::vector<otgforge::CorpusSpec> parse_specs(const std::vector<std::string>& items) {
  // NAME=PATH[:FORMAT]
  std::vector<otgforge::CorpusSpec> specs;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kConfig, "expected NAME=PATH, got '" + item + "'");
    otgforge::CorpusSpec spec;
    spec.name = item.substr(0, eq);
    std::string path = item.substr(eq + 1);
    if (const auto colon = path.rfind(':'); colon != std::string::npos) {
      if (const auto f = otgforge::parse_corpus_format(path.substr(colon + 1))) {
        spec.format = *f;
        path.resize(colon);
      }
    }
    spec.path = path;
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Template-based domain adaptation for hate speech classifiers"};
  app.require_subcommand(1);

  std::string text;
  std::string text_file;
  auto* tokenize = app.add_subcommand("tokenize", "Print the token sequence of a text");
  tokenize->add_option("--text", text, "Text to tokenize");
  tokenize->add_option("--file", text_file, "Tokenize each line of a file");

  CommonOptions common;
  std::string stage_option;
  struct StageCommand {
    const char* name;
    const char* help;
    std::vector<otgforge::Stage> stages;
  };
  using S = otgforge::Stage;
  const std::vector<StageCommand> stage_commands{
      {"sample", "Split the target corpus into an unlabeled sample and a test set", {S::kSample}},
      {"weak-label", "Tag source hate documents with the source lexicon", {S::kWeakLabel}},
      {"train-tagger", "Train the OTG tagger on weakly labeled source sentences", {S::kTrainTagger}},
      {"tag", "Tag the target sample and the weak corpus", {S::kTag}},
      {"templatize", "Replace OTG runs with slots and build the weak pool", {S::kTemplatize}},
      {"extract-lexicon", "Collect target OTG terms", {S::kExtractLexicon}},
      {"rank", "Score weak templates against target templates and select", {S::kRank}},
      {"generate", "Fill selected templates with target terms and merge with source", {S::kGenerate}},
      {"train", "Train baseline and augmented classifiers", {S::kTrain}},
      {"evaluate", "Score the held-out target test set", {S::kEvaluate}},
  };
  std::vector<std::pair<CLI::App*, const StageCommand*>> stage_apps;
  for (const auto& sc : stage_commands) {
    auto* cmd = app.add_subcommand(sc.name, sc.help);
    add_common(cmd, common);
    stage_apps.emplace_back(cmd, &sc);
  }

  auto* run_all = app.add_subcommand("run-all", "Run every stage for both arms");
  add_common(run_all, common);
  run_all->add_option("--stage", stage_option, "Run only this stage");
  auto* run_baseline = app.add_subcommand("run-baseline", "Source-only arm");
  add_common(run_baseline, common);
  auto* run_pipeline = app.add_subcommand("run-pipeline", "Source plus augmented arm");
  add_common(run_pipeline, common);

  std::vector<std::string> train_specs;
  std::vector<std::string> test_specs;
  auto* cross = app.add_subcommand("cross-eval", "PRAUC matrix across corpora");
  add_common(cross, common);
  cross->add_option("--train", train_specs, "NAME=PATH[:jsonl|csv], rows")->required();
  cross->add_option("--test", test_specs, "NAME=PATH[:jsonl|csv], columns; defaults to --train");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (tokenize->parsed()) {
      auto emit = [](const std::string& line) {
        std::cout << otgforge::join_tokens(otgforge::tokenize(line)) << '\n';
      };
      if (!text_file.empty()) {
        std::ifstream in(text_file);
        if (!in) throw Error(ErrorCode::kConfig, "cannot open " + text_file);
        for (std::string line; std::getline(in, line);) emit(line);
      } else if (!text.empty()) {
        emit(text);
      } else {
        for (std::string line; std::getline(std::cin, line);) emit(line);
      }
      return 0;
    }

    const auto config = resolve_config(common);
    for (const auto& [cmd, sc] : stage_apps) {
      if (!cmd->parsed()) continue;
      otgforge::run_experiment(config, {}, sc->stages);
      return 0;
    }
    if (run_all->parsed()) {
      std::vector<otgforge::Stage> stages;
      if (!stage_option.empty()) {
        const auto stage = otgforge::parse_stage(stage_option);
        if (!stage) throw Error(ErrorCode::kConfig, "unknown stage '" + stage_option + "'");
        stages.push_back(*stage);
      }
      otgforge::run_experiment(config, {}, stages);
      print_result(config);
    } else if (run_baseline->parsed()) {
      otgforge::run_baseline(config);
      print_result(config);
    } else if (run_pipeline->parsed()) {
      otgforge::run_pipeline(config);
      print_result(config);
    } else if (cross->parsed()) {
      const auto train = parse_specs(train_specs);
      const auto test = test_specs.empty() ? train : parse_specs(test_specs);
      std::cout << otgforge::cross_eval(train, test, config).to_text();
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "otg_forge: " << e.what() << '\n';
    return e.code() == ErrorCode::kConfig ? kExitConfig : kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "otg_forge: " << e.what() << '\n';
    return kExitStage;
  }
}
