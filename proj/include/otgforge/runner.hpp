#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "otgforge/config.hpp"
#include "otgforge/metrics.hpp"

namespace otgforge {

enum class Stage {
  kSample,
  kWeakLabel,
  kTrainTagger,
  kTag,
  kTemplatize,
  kExtractLexicon,
  kRank,
  kGenerate,
  kTrain,
  kEvaluate,
};

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);
const std::vector<Stage>& all_stages();

// Which classifier arms the train/evaluate stages handle.
struct Arms {
  bool baseline = true;
  bool augmented = true;
};

// Lineage of one stage execution. Paths are relative to the output directory.
struct StageRecord {
  std::string stage;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> outputs;  // path -> sha256
};

// Per-seed artifact directory: <out>/seed-<seed>.
std::filesystem::path seed_dir(const PipelineConfig& config, std::uint64_t seed);

// Runs one stage for one seed from the artifacts of upstream stages and
// returns its lineage. Failures are rethrown as kStage naming the stage.
StageRecord run_stage(const PipelineConfig& config, Stage stage, std::uint64_t seed,
                      Arms arms = {});

struct ExperimentResult {
  std::vector<EvalReport> baseline_runs;
  std::vector<EvalReport> augmented_runs;
  std::optional<EvalReport> baseline;
  std::optional<EvalReport> augmented;
  std::string config_hash;
};

// Runs `stages` (all stages when empty) for every configured seed, then
// aggregates whatever per-seed reports exist and writes report.json,
// report.txt, config.txt and manifest.json under the output directory.
ExperimentResult run_experiment(const PipelineConfig& config, Arms arms,
                                std::span<const Stage> stages = {});

// Augmented arm only: source + domain-adapted examples.
EvalReport run_pipeline(const PipelineConfig& config);
// Source-only arm on the same per-seed test splits.
EvalReport run_baseline(const PipelineConfig& config);

struct CorpusSpec {
  std::string name;
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::kJsonl;
};

struct CrossEvalResult {
  std::vector<std::string> train_names;  // rows
  std::vector<std::string> test_names;   // columns
  std::vector<std::vector<double>> prauc;

  std::string to_text() const;
  nlohmann::json to_json() const;
};

// Every corpus is split 90/10 per seed; row i trains on the 90% part of
// train[i], column j evaluates on the 10% part of test[j]; cells are means
// over seeds. Results are written to <out>/cross_eval.{json,txt}.
CrossEvalResult cross_eval(std::span<const CorpusSpec> train, std::span<const CorpusSpec> test,
                           const PipelineConfig& config);

}  // namespace otgforge
