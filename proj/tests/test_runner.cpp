#include <set>

#include "doctest.h"
#include "otgforge/config.hpp"
#include "otgforge/runner.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace otgforge;
namespace fs = std::filesystem;

namespace {
PipelineConfig tiny_config(const synthetic::Dataset& d, const fs::path& out) {
  PipelineConfig c;
  c.source_path = d.source;
  c.target_path = d.target;
  c.weak_path = d.weak;
  c.lexicon_path = d.lexicon;
  c.target_sample_fraction = 0.25;
  c.k_hate = 20;
  c.k_nonhate = 20;
  c.tagger.char_embedding_dim = 4;
  c.tagger.char_conv_filters = 6;
  c.tagger.word_embedding_dim = 8;
  c.tagger.lstm_hidden_dim = 8;
  c.tagger.max_epochs = 4;
  c.classifier.word_embedding_dim = 8;
  c.classifier.lstm_hidden_dim = 8;
  c.classifier.fc_hidden_dim = 8;
  c.classifier.max_epochs = 2;
  c.seeds = {0, 1};
  c.output_dir = out;
  return c;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}
}  // namespace

TEST_CASE("config parsing") {
  const auto dir = testutil::tmp_dir("config");
  const std::string text =
      "# experiment\n"
      "[data]\n"
      "source = src.jsonl\n"
      "target = \"/abs/target.csv\"\n"
      "target_format = csv\n"
      "[augment]\n"
      "k_hate = 50  # inline comment\n"
      "[classifier]\n"
      "dropout_rate = 0.2\n"
      "variant = char-cnn\n"
      "conv_channels = [8, 8, 8, 8, 8, 8]\n"
      "[experiment]\n"
      "seeds = 3..5\n"
      "[output]\n"
      "dir = out\n";
  const auto c = parse_config(text, dir);
  CHECK(c.source_path == dir / "src.jsonl");
  CHECK(c.target_path == fs::path("/abs/target.csv"));
  CHECK(c.target_format == CorpusFormat::kCsv);
  CHECK(c.k_hate == 50);
  CHECK(c.k_nonhate == 10000);
  CHECK(c.hate_min_slots == 2);
  CHECK(c.nonhate_max_slots == 1);
  CHECK(c.target_sample_fraction == 0.1);
  CHECK(c.classifier.variant == ClassifierVariant::kCharCnn);
  CHECK(c.classifier.dropout_rate == 0.2);  // variant applies first
  CHECK(c.classifier.conv_channels[5] == 8);
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4, 5});
  CHECK(c.output_dir == dir / "out");

  CHECK(PipelineConfig{}.seeds.size() == 10);
  CHECK(parse_seed_list("1, 4,7") == std::vector<std::uint64_t>{1, 4, 7});
  CHECK(parse_seed_list("2") == std::vector<std::uint64_t>{2});
  CHECK(testutil::error_code_of([] { parse_config("bogus = 1"); }) == ErrorCode::kConfig);
  CHECK(testutil::error_code_of([] { parse_config("[augment]\nk_hate = -3"); }) == ErrorCode::kConfig);
  CHECK(testutil::error_code_of([] { parse_config("no equals sign"); }) == ErrorCode::kConfig);
  CHECK(testutil::error_code_of([] { parse_seed_list("5..2"); }) == ErrorCode::kConfig);

  PipelineConfig bad;
  bad.target_sample_fraction = 1.5;
  CHECK(testutil::error_code_of([&] { bad.validate(); }) == ErrorCode::kConfig);
  bad = PipelineConfig{};
  bad.seeds.clear();
  CHECK(testutil::error_code_of([&] { bad.validate(); }) == ErrorCode::kConfig);

  PipelineConfig desk;
  desk.apply_desk_scale();
  CHECK(desk.k_hate == 200);
  CHECK(desk.k_nonhate == 200);
  CHECK(desk.weak_limit == 5000);
}

TEST_CASE("config hash tracks meaningful fields only") {
  PipelineConfig a;
  const auto base = a.hash();
  CHECK(base.size() == 64);
  a.output_dir = "elsewhere";
  CHECK(a.hash() == base);
  a.k_hate = 11;
  CHECK(a.hash() != base);
  PipelineConfig b;
  b.tagger.lstm_hidden_dim = 51;
  CHECK(b.hash() != base);
  PipelineConfig c;
  c.seeds = {0, 1};
  CHECK(c.hash() != base);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("stage names") {
  CHECK(all_stages().size() == 10);
  for (const auto s : all_stages()) CHECK(parse_stage(stage_name(s)) == s);
  CHECK_FALSE(parse_stage("nope").has_value());
}

TEST_CASE("end-to-end run: artifacts, lineage, isolation and errors") {
  const auto dir = testutil::tmp_dir("runner");
  synthetic::Spec spec;
  spec.source_docs = 120;
  spec.target_docs = 80;
  spec.weak_sentences = 150;
  const auto data = synthetic::write_dataset(dir / "data", spec);
  const auto config = tiny_config(data, dir / "out");

  const auto result = run_experiment(config, {});
  REQUIRE(result.baseline.has_value());
  REQUIRE(result.augmented.has_value());
  CHECK(result.baseline_runs.size() == 2);
  CHECK(result.config_hash == config.hash());
  for (const char* f : {"report.json", "report.txt", "config.txt", "manifest.json"}) CHECK(fs::exists(config.output_dir / f));
  for (const char* f : {"target_unlabeled.jsonl", "target_test.jsonl", "source_tagged.jsonl", "tagger.ckpt",
                        "target_tagged.jsonl", "weak_tagged.jsonl", "source_templates.jsonl",
                        "target_templates.jsonl", "weak_pool.jsonl", "target_lexicon.txt", "target_lexicon_stats.json", "scored_pool.jsonl",
                        "selected_hate.jsonl", "selected_nonhate.jsonl", "augmented.jsonl", "train_augmented.jsonl",
                        "classifier_baseline.ckpt", "classifier_augmented.ckpt", "scores_baseline.csv",
                        "scores_augmented.csv", "report_baseline.json", "report_augmented.json"}) {
    CHECK_MESSAGE(fs::exists(config.output_dir / "seed-0" / f), f);
  }

  const auto manifest = read_json(config.output_dir / "manifest.json");
  CHECK(manifest["config_hash"] == config.hash());
  CHECK(manifest["stages"].size() == 20);
  // The held-out test split feeds evaluation only.
  for (const auto& rec : manifest["stages"]) {
    for (const auto& in : rec["inputs"]) {
      if (in.get<std::string>().find("target_test.jsonl") != std::string::npos) CHECK(rec["stage"] == "evaluate");
    }
  }

  // Baseline and augmented arms see the same test documents.
  const auto test_split = testutil::read_file(config.output_dir / "seed-1" / "target_test.jsonl");
  const auto scores_b = testutil::read_file(config.output_dir / "seed-1" / "scores_baseline.csv");
  const auto scores_a = testutil::read_file(config.output_dir / "seed-1" / "scores_augmented.csv");
  auto ids = [](const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) out.push_back(line.substr(0, line.rfind(',')));
    return out;
  };
  CHECK(ids(scores_b) == ids(scores_a));
  CHECK(ids(scores_b).size() == 60);

  // Deleting a downstream artifact and rerunning its stage reproduces it.
  for (const auto stage : {Stage::kRank, Stage::kGenerate, Stage::kTrain}) {
    const auto before = run_stage(config, stage, 0);
    for (const auto& [path, sha] : before.outputs) fs::remove(config.output_dir / path);
    const auto after = run_stage(config, stage, 0);
    CHECK(after.outputs == before.outputs);
  }

  // The aggregated table has a baseline row and an augmented row.
  const auto table = testutil::read_file(config.output_dir / "report.txt");
  CHECK(table.find("source+augmented") != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);

  // Missing upstream artifacts surface as a stage error naming the stage.
  auto fresh = config;
  fresh.output_dir = dir / "fresh";
  try {
    run_stage(fresh, Stage::kRank, 0);
    FAIL("expected a stage error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStage);
    CHECK(std::string(e.what()).find("rank") != std::string::npos);
  }
}

TEST_CASE("cross-eval matrix shape and held-out diagonal") {
  const auto dir = testutil::tmp_dir("cross");
  synthetic::Spec spec;
  spec.source_docs = 100;
  spec.target_docs = 100;
  spec.weak_sentences = 10;
  const auto data = synthetic::write_dataset(dir / "data", spec);
  auto config = tiny_config(data, dir / "out");
  config.seeds = {0};
  const std::vector<CorpusSpec> corpora{{"A", data.source, CorpusFormat::kJsonl}, {"B", data.target, CorpusFormat::kJsonl}};
  const auto result = cross_eval(corpora, corpora, config);
  REQUIRE(result.prauc.size() == 2);
  REQUIRE(result.prauc[0].size() == 2);
  for (const auto& row : result.prauc) {
    for (const double v : row) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(fs::exists(config.output_dir / "cross_eval.json"));
  const auto text = result.to_text();
  CHECK(text.find("A") < text.find("B"));
}
