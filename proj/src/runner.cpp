#include "otgforge/runner.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "otgforge/error.hpp"
#include "otgforge/generator.hpp"
#include "otgforge/lexicon.hpp"
#include "otgforge/random.hpp"
#include "otgforge/ranker.hpp"
#include "otgforge/tagger.hpp"
#include "otgforge/templating.hpp"

namespace otgforge {
namespace fs = std::filesystem;

namespace {

// Stream ids for derive_seed, one per stochastic stage.
constexpr std::uint64_t kTaggerStream = 100;
constexpr std::uint64_t kGenerateStream = 300;
constexpr std::uint64_t kClassifierStream = 400;
constexpr std::uint64_t kCrossSplitStream = 500;
constexpr std::uint64_t kCrossTrainStream = 501;

const std::vector<std::pair<Stage, std::string_view>>& stage_names() {
  static const std::vector<std::pair<Stage, std::string_view>> names{
      {Stage::kSample, "sample"},
      {Stage::kWeakLabel, "weak-label"},
      {Stage::kTrainTagger, "train-tagger"},
      {Stage::kTag, "tag"},
      {Stage::kTemplatize, "templatize"},
      {Stage::kExtractLexicon, "extract-lexicon"},
      {Stage::kRank, "rank"},
      {Stage::kGenerate, "generate"},
      {Stage::kTrain, "train"},
      {Stage::kEvaluate, "evaluate"},
  };
  return names;
}

// Artifact names inside a seed directory.
namespace art {
constexpr const char* kTargetUnlabeled = "target_unlabeled.jsonl";
constexpr const char* kTargetTest = "target_test.jsonl";
constexpr const char* kSourceTagged = "source_tagged.jsonl";
constexpr const char* kTagger = "tagger.ckpt";
constexpr const char* kTargetTagged = "target_tagged.jsonl";
constexpr const char* kWeakTagged = "weak_tagged.jsonl";
constexpr const char* kSourceTemplates = "source_templates.jsonl";
constexpr const char* kTargetTemplates = "target_templates.jsonl";
constexpr const char* kWeakPool = "weak_pool.jsonl";
constexpr const char* kTargetLexicon = "target_lexicon.txt";
constexpr const char* kLexiconStats = "target_lexicon_stats.json";
constexpr const char* kScoredPool = "scored_pool.jsonl";
constexpr const char* kSelectedHate = "selected_hate.jsonl";
constexpr const char* kSelectedNonHate = "selected_nonhate.jsonl";
constexpr const char* kAugmented = "augmented.jsonl";
constexpr const char* kTrainAugmented = "train_augmented.jsonl";
}  // namespace art

std::string arm_name(bool augmented) { return augmented ? "augmented" : "baseline"; }

class StageContext {
 public:
  StageContext(const PipelineConfig& config, Stage stage, std::uint64_t seed)
      : config_(config), dir_(seed_dir(config, seed)) {
    record_.stage = std::string(stage_name(stage));
    record_.seed = seed;
    fs::create_directories(dir_);
  }

  fs::path in(const std::string& name) {
    const fs::path p = dir_ / name;
    if (!fs::exists(p)) {
      throw Error(ErrorCode::kIo, "missing upstream artifact " + p.string());
    }
    record_.inputs.push_back(relative(p));
    return p;
  }

  fs::path external(const fs::path& p, const char* what) {
    if (p.empty()) throw Error(ErrorCode::kConfig, std::string("no path configured for ") + what);
    if (!fs::exists(p)) throw Error(ErrorCode::kIo, std::string(what) + " not found: " + p.string());
    record_.inputs.push_back(fs::absolute(p).lexically_normal().string());
    return p;
  }

  fs::path out(const std::string& name) {
    const fs::path p = dir_ / name;
    pending_.push_back(p);
    return p;
  }

  StageRecord finish() {
    for (const auto& p : pending_) record_.outputs[relative(p)] = sha256_file(p);
    return std::move(record_);
  }

 private:
  std::string relative(const fs::path& p) const {
    return p.lexically_relative(config_.output_dir).generic_string();
  }

  const PipelineConfig& config_;
  fs::path dir_;
  StageRecord record_;
  std::vector<fs::path> pending_;
};

Corpus load_weak(const PipelineConfig& config, const fs::path& path) {
  Corpus weak = load_corpus(path, config.weak_format, false, "weak");
  if (config.weak_limit == 0 || weak.size() <= config.weak_limit) return weak;
  std::vector<Document> docs(weak.documents().begin(),
                             weak.documents().begin() + static_cast<long>(config.weak_limit));
  return Corpus(weak.name(), std::move(docs), false);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::vector<Template> templatize_all(std::span<const TaggedSentence> tagged) {
  std::vector<Template> out;
  out.reserve(tagged.size());
  for (const auto& s : tagged) out.push_back(templatize(s));
  return out;
}

void train_arm(StageContext& ctx, const PipelineConfig& config, std::uint64_t seed, bool augmented) {
  Corpus corpus = augmented
                      ? load_corpus(ctx.in(art::kTrainAugmented), CorpusFormat::kJsonl, true, "merged")
                      : load_corpus(ctx.external(config.source_path, "source corpus"), config.source_format,
                                    true, "source");
  const auto model = train_classifier(corpus, config.classifier, derive_seed(seed, kClassifierStream));
  model.save(ctx.out("classifier_" + arm_name(augmented) + ".ckpt"));
}

void evaluate_arm(StageContext& ctx, const PipelineConfig& config, std::uint64_t seed, bool augmented) {
  const auto model = ClassifierModel::load(ctx.in("classifier_" + arm_name(augmented) + ".ckpt"));
  const Corpus test = load_corpus(ctx.in(art::kTargetTest), CorpusFormat::kJsonl, true, "target");
  const ScoreSet scores = predict(model, test);
  const auto labels = labels_of(test);
  EvalReport report = classification_report(scores, labels, config.threshold);
  report.seed = static_cast<long>(seed);
  save_scores(scores, ctx.out("scores_" + arm_name(augmented) + ".csv"));
  write_text(ctx.out("report_" + arm_name(augmented) + ".json"), report_to_json(report).dump(2) + "\n");
}

StageRecord execute(const PipelineConfig& config, Stage stage, std::uint64_t seed, Arms arms) {
  StageContext ctx(config, stage, seed);
  switch (stage) {
    case Stage::kSample: {
      const Corpus target = load_corpus(ctx.external(config.target_path, "target corpus"),
                                        config.target_format, true, "target");
      const auto split = sample_unlabeled(target, config.target_sample_fraction, config.sample_seed);
      save_corpus_jsonl(split.unlabeled, ctx.out(art::kTargetUnlabeled));
      save_corpus_jsonl(split.test, ctx.out(art::kTargetTest));
      break;
    }
    case Stage::kWeakLabel: {
      const Corpus source = load_corpus(ctx.external(config.source_path, "source corpus"),
                                        config.source_format, true, "source");
      const Lexicon lexicon = load_and_consolidate(ctx.external(config.lexicon_path, "lexicon"));
      const auto tagged = weak_label(source.filter_label(Label::kHate, "source-hate"), lexicon);
      save_tagged_jsonl(tagged, ctx.out(art::kSourceTagged));
      break;
    }
    case Stage::kTrainTagger: {
      const auto data = load_tagged_jsonl(ctx.in(art::kSourceTagged));
      const auto model = train_tagger(data, config.tagger, derive_seed(seed, kTaggerStream));
      model.save(ctx.out(art::kTagger));
      break;
    }
    case Stage::kTag: {
      const auto model = TaggerModel::load(ctx.in(art::kTagger));
      const Corpus target = load_corpus(ctx.in(art::kTargetUnlabeled), CorpusFormat::kJsonl, false, "target");
      save_tagged_jsonl(tag_corpus(model, target), ctx.out(art::kTargetTagged));
      const Corpus weak = load_weak(config, ctx.external(config.weak_path, "weak corpus"));
      save_tagged_jsonl(tag_corpus(model, weak), ctx.out(art::kWeakTagged));
      break;
    }
    case Stage::kTemplatize: {
      const auto source = load_tagged_jsonl(ctx.in(art::kSourceTagged));
      save_templates_jsonl(templatize_all(source), ctx.out(art::kSourceTemplates));
      const auto target = load_tagged_jsonl(ctx.in(art::kTargetTagged));
      save_templates_jsonl(templatize_all(target), ctx.out(art::kTargetTemplates));
      const auto weak = load_tagged_jsonl(ctx.in(art::kWeakTagged));
      save_templates_jsonl(build_weak_pool(weak), ctx.out(art::kWeakPool));
      break;
    }
    case Stage::kExtractLexicon: {
      const auto target = load_tagged_jsonl(ctx.in(art::kTargetTagged));
      const Lexicon lexicon = extract_target_lexicon(target);
      save_lexicon(lexicon, ctx.out(art::kTargetLexicon));
      // Source terms are kept; the overlap is reported, not removed.
      const Lexicon source = load_and_consolidate(ctx.external(config.lexicon_path, "lexicon"));
      std::size_t overlap = 0;
      for (const auto& term : lexicon.unigrams) overlap += source.unigrams.count(term);
      const nlohmann::json stats{{"terms", lexicon.unigrams.size()}, {"overlap_with_source", overlap}};
      write_text(ctx.out(art::kLexiconStats), stats.dump(2) + "\n");
      break;
    }
    case Stage::kRank: {
      const auto weak = load_templates_jsonl(ctx.in(art::kWeakPool));
      const auto target = load_templates_jsonl(ctx.in(art::kTargetTemplates));
      const TfIdfModel model = fit_tfidf(weak, target);
      auto scored = score_pool(weak, target, model);
      sort_by_score(scored);
      save_scored_jsonl(scored, ctx.out(art::kScoredPool));
      save_templates_jsonl(select_top(scored, config.k_hate, config.hate_min_slots, kUnboundedSlots),
                           ctx.out(art::kSelectedHate));
      save_templates_jsonl(select_top(scored, config.k_nonhate, 0, config.nonhate_max_slots),
                           ctx.out(art::kSelectedNonHate));
      break;
    }
    case Stage::kGenerate: {
      const auto hate = load_templates_jsonl(ctx.in(art::kSelectedHate));
      const auto nonhate = load_templates_jsonl(ctx.in(art::kSelectedNonHate));
      const Lexicon lexicon = load_and_consolidate(ctx.in(art::kTargetLexicon));
      const auto augmented = generate(hate, nonhate, lexicon, derive_seed(seed, kGenerateStream));
      save_augmented_jsonl(augmented, ctx.out(art::kAugmented));
      const Corpus source = load_corpus(ctx.external(config.source_path, "source corpus"),
                                        config.source_format, true, "source");
      save_corpus_jsonl(merge(source, augmented.corpus, "merged"), ctx.out(art::kTrainAugmented));
      break;
    }
    case Stage::kTrain:
      if (arms.baseline) train_arm(ctx, config, seed, false);
      if (arms.augmented) train_arm(ctx, config, seed, true);
      break;
    case Stage::kEvaluate:
      if (arms.baseline) evaluate_arm(ctx, config, seed, false);
      if (arms.augmented) evaluate_arm(ctx, config, seed, true);
      break;
  }
  return ctx.finish();
}

nlohmann::json record_to_json(const StageRecord& r) {
  nlohmann::json j;
  j["stage"] = r.stage;
  j["seed"] = r.seed;
  j["inputs"] = r.inputs;
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& [path, sha] : r.outputs) outputs[path] = sha;
  j["outputs"] = outputs;
  return j;
}

StageRecord record_from_json(const nlohmann::json& j) {
  StageRecord r;
  r.stage = j.at("stage").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.inputs = j.at("inputs").get<std::vector<std::string>>();
  for (const auto& [path, sha] : j.at("outputs").items()) r.outputs[path] = sha.get<std::string>();
  return r;
}

std::size_t stage_order(const std::string& name) {
  const auto& names = stage_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].second == name) return i;
  }
  return names.size();
}

// Merges this invocation's records into an existing manifest written with the
// same config hash, so stage-by-stage runs accumulate a complete lineage.
void write_manifest(const PipelineConfig& config, const std::string& hash,
                    const std::vector<StageRecord>& fresh) {
  const fs::path path = config.output_dir / "manifest.json";
  std::map<std::pair<std::uint64_t, std::size_t>, StageRecord> records;
  if (fs::exists(path)) {
    try {
      std::ifstream in(path);
      const auto existing = nlohmann::json::parse(in);
      if (existing.at("config_hash").get<std::string>() == hash) {
        for (const auto& j : existing.at("stages")) {
          auto r = record_from_json(j);
          records[{r.seed, stage_order(r.stage)}] = std::move(r);
        }
      }
    } catch (const std::exception&) {
      records.clear();
    }
  }
  for (const auto& r : fresh) records[{r.seed, stage_order(r.stage)}] = r;

  nlohmann::json j;
  j["config_hash"] = hash;
  j["config"] = config.canonical();
  j["stages"] = nlohmann::json::array();
  for (const auto& [key, r] : records) j["stages"].push_back(record_to_json(r));
  write_text(path, j.dump(2) + "\n");
}

std::optional<EvalReport> collect(const PipelineConfig& config, bool augmented,
                                  std::vector<EvalReport>& runs) {
  for (const auto seed : config.seeds) {
    const fs::path p = seed_dir(config, seed) / ("report_" + arm_name(augmented) + ".json");
    if (!fs::exists(p)) continue;
    std::ifstream in(p);
    runs.push_back(report_from_json(nlohmann::json::parse(in)));
  }
  if (runs.empty()) return std::nullopt;
  return aggregate(runs);
}

void write_reports(const PipelineConfig& config, const ExperimentResult& result) {
  const std::string model(variant_display_name(config.classifier.variant));
  nlohmann::json j;
  j["config_hash"] = result.config_hash;
  j["model"] = model;
  j["seeds"] = config.seeds;
  std::vector<ReportRow> rows;
  auto add = [&](const char* key, const char* training, const std::optional<EvalReport>& mean,
                 const std::vector<EvalReport>& runs) {
    if (!mean) return;
    nlohmann::json arm;
    arm["mean"] = report_to_json(*mean);
    arm["runs"] = nlohmann::json::array();
    for (const auto& r : runs) arm["runs"].push_back(report_to_json(r));
    j[key] = arm;
    rows.push_back({model, training, *mean});
  };
  add("baseline", "source", result.baseline, result.baseline_runs);
  add("augmented", "source+augmented", result.augmented, result.augmented_runs);
  write_text(config.output_dir / "report.json", j.dump(2) + "\n");
  write_text(config.output_dir / "report.txt", format_report_table(rows));
}

}  // namespace

std::string_view stage_name(Stage stage) {
  for (const auto& [s, name] : stage_names()) {
    if (s == stage) return name;
  }
  return "unknown";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (const auto& [s, n] : stage_names()) {
    if (n == name) return s;
  }
  return std::nullopt;
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = [] {
    std::vector<Stage> out;
    for (const auto& [s, name] : stage_names()) out.push_back(s);
    return out;
  }();
  return stages;
}

fs::path seed_dir(const PipelineConfig& config, std::uint64_t seed) {
  return config.output_dir / ("seed-" + std::to_string(seed));
}

StageRecord run_stage(const PipelineConfig& config, Stage stage, std::uint64_t seed, Arms arms) {
  try {
    return execute(config, stage, seed, arms);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kStage, "stage " + std::string(stage_name(stage)) + " (seed " +
                                       std::to_string(seed) + ") failed: " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kStage, "stage " + std::string(stage_name(stage)) + " (seed " +
                                       std::to_string(seed) + ") failed: " + e.what());
  }
}

ExperimentResult run_experiment(const PipelineConfig& config, Arms arms, std::span<const Stage> stages) {
  config.validate();
  if (stages.empty()) stages = all_stages();
  fs::create_directories(config.output_dir);
  ExperimentResult result;
  result.config_hash = config.hash();
  write_text(config.output_dir / "config.txt", config.canonical());

  std::vector<StageRecord> records;
  for (const auto seed : config.seeds) {
    for (const Stage stage : stages) records.push_back(run_stage(config, stage, seed, arms));
  }
  write_manifest(config, result.config_hash, records);

  if (arms.baseline) result.baseline = collect(config, false, result.baseline_runs);
  if (arms.augmented) result.augmented = collect(config, true, result.augmented_runs);
  write_reports(config, result);
  return result;
}

EvalReport run_pipeline(const PipelineConfig& config) {
  const auto result = run_experiment(config, Arms{false, true});
  return *result.augmented;
}

EvalReport run_baseline(const PipelineConfig& config) {
  const std::vector<Stage> stages{Stage::kSample, Stage::kTrain, Stage::kEvaluate};
  const auto result = run_experiment(config, Arms{true, false}, stages);
  return *result.baseline;
}

std::string CrossEvalResult::to_text() const {
  std::size_t w = 5;
  for (const auto& n : train_names) w = std::max(w, n.size());
  for (const auto& n : test_names) w = std::max(w, n.size());
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(w), "train");
  out << buf;
  for (const auto& n : test_names) {
    std::snprintf(buf, sizeof(buf), "  %*s", static_cast<int>(w), n.c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < train_names.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(w), train_names[i].c_str());
    out << buf;
    for (const double v : prauc[i]) {
      std::snprintf(buf, sizeof(buf), "  %*.3f", static_cast<int>(w), v);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json CrossEvalResult::to_json() const {
  nlohmann::json j;
  j["train"] = train_names;
  j["test"] = test_names;
  j["prauc"] = prauc;
  return j;
}

CrossEvalResult cross_eval(std::span<const CorpusSpec> train, std::span<const CorpusSpec> test,
                           const PipelineConfig& config) {
  config.validate();
  if (train.empty() || test.empty()) throw Error(ErrorCode::kConfig, "cross-eval needs train and test corpora");
  CrossEvalResult result;
  for (const auto& c : train) result.train_names.push_back(c.name);
  for (const auto& c : test) result.test_names.push_back(c.name);
  result.prauc.assign(train.size(), std::vector<double>(test.size(), 0.0));

  // 90/10 split of one corpus; depends only on the corpus and the seed, so a
  // corpus used as both row and column is trained and tested on disjoint parts.
  auto split = [](const Corpus& corpus, std::uint64_t seed, bool holdout_part) {
    const auto [holdout, rest] = holdout_indices(corpus.size(), 0.1, derive_seed(seed, kCrossSplitStream));
    std::vector<Document> docs;
    for (const auto i : holdout_part ? holdout : rest) docs.push_back(corpus[i]);
    return Corpus(corpus.name(), std::move(docs), true);
  };
  auto load = [](const CorpusSpec& spec) {
    try {
      return load_corpus(spec.path, spec.format, true, spec.name);
    } catch (const Error& e) {
      throw Error(ErrorCode::kStage, "cross-eval corpus " + spec.name + ": " + e.what());
    }
  };
  std::vector<Corpus> train_corpora, test_corpora;
  for (const auto& c : train) train_corpora.push_back(load(c));
  for (const auto& c : test) test_corpora.push_back(load(c));

  for (const auto seed : config.seeds) {
    std::vector<Corpus> test_parts;
    for (const auto& c : test_corpora) test_parts.push_back(split(c, seed, true));
    for (std::size_t i = 0; i < train.size(); ++i) {
      try {
        const auto model = train_classifier(split(train_corpora[i], seed, false), config.classifier,
                                            derive_seed(seed, kCrossTrainStream));
        for (std::size_t j = 0; j < test.size(); ++j) {
          const auto scores = predict(model, test_parts[j]);
          result.prauc[i][j] += pr_auc(scores, labels_of(test_parts[j]));
        }
      } catch (const Error& e) {
        throw Error(ErrorCode::kStage, "cross-eval row " + train[i].name + " (seed " + std::to_string(seed) +
                                           ") failed: " + e.what());
      }
    }
  }
  for (auto& row : result.prauc) {
    for (auto& v : row) v /= static_cast<double>(config.seeds.size());
  }
  fs::create_directories(config.output_dir);
  write_text(config.output_dir / "cross_eval.json", result.to_json().dump(2) + "\n");
  write_text(config.output_dir / "cross_eval.txt", result.to_text());
  return result;
}

}  // namespace otgforge
