// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "otgforge/classifiers.hpp"
#include "otgforge/config.hpp"
#include "otgforge/generator.hpp"
#include "otgforge/lexicon.hpp"
#include "otgforge/metrics.hpp"
#include "otgforge/nn/parameter.hpp"
#include "otgforge/nn/training.hpp"
#include "otgforge/random.hpp"
#include "otgforge/ranker.hpp"
#include "otgforge/runner.hpp"
#include "otgforge/tagger.hpp"
#include "otgforge/templating.hpp"
#include "otgforge/text.hpp"
#include "synthetic.hpp"

using namespace otgforge;
namespace fs = std::filesystem;
using Tokens = std::vector<std::string>;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::path(OTGFORGE_TEST_TMP) / "acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Template make_template(std::string id, Tokens tokens) {
  Template t;
  t.doc_id = std::move(id);
  t.slot_count = static_cast<int>(std::count(tokens.begin(), tokens.end(), kSlotToken));
  t.slotted_tokens = std::move(tokens);
  return t;
}

TaggedSentence pinned(const std::string& id, const std::string& text, const std::vector<std::string>& otg) {
  TaggedSentence s{id, tokenize(text), {}};
  for (const auto& tok : s.tokens) {
    s.tags.push_back(std::find(otg.begin(), otg.end(), tok) != otg.end() ? Tag::kOtg : Tag::kO);
  }
  return s;
}

// 1. The worked example, stage by stage. Tagger output on the target and weak
// sentences is pinned so the check isolates the deterministic stages.
Outcome transcript() {
  Outcome o;
  const auto source = Document::make("s1", "The problem with Honda CRV's is that they are boring", Label::kHate,
                                     "source");
  const std::vector<std::string> entries{"honda", "crv", "boring"};
  const Lexicon hs = consolidate_lexicon(entries, "hs");
  const Corpus hate("source_hate", {source}, true);
  const auto source_tagged = weak_label(hate, hs);
  const auto source_template = templatize(source_tagged.at(0));
  o.require(source_template.slotted_text() == "the problem with REP 's is that they are REP",
            "source template: " + source_template.slotted_text());

  const auto target_tagged = pinned("t1", "Bananas are very yucky!", {"bananas", "yucky"});
  const std::vector<TaggedSentence> target_set{target_tagged};
  const Lexicon ht = extract_target_lexicon(target_set);
  o.require(ht.sorted_unigrams() == Tokens{"bananas", "yucky"}, "target lexicon");
  const auto target_template = templatize(target_tagged);
  o.require(target_template.slotted_text() == "REP are very REP !", "target template: " + target_template.slotted_text());

  const auto weak_tagged = pinned("w1", "I hate Sundays -- they are so dull", {"sundays", "dull"});
  const std::vector<TaggedSentence> weak_set{weak_tagged};
  const auto pool = build_weak_pool(weak_set);
  o.require(pool.size() == 1 && pool[0].slotted_text() == "i hate REP -- they are so REP", "weak template");

  const std::vector<Template> targets{target_template};
  auto scored = score_pool(pool, targets, fit_tfidf(pool, targets));
  sort_by_score(scored);
  const auto selected = select_top(scored, 1, 2, kUnboundedSlots);
  const auto augmented = generate(selected, {}, ht, 0);
  o.require(augmented.corpus.size() == 1 &&
                join_tokens(augmented.corpus[0].tokens) == "i hate bananas -- they are so yucky",
            "adapted sentence");
  if (o.pass) o.detail = "source, target and weak rows and the adapted sentence match";
  return o;
}

// 2. Metrics against brute-force references.
Outcome metric_oracles() {
  Outcome o;
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  int confusion_mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 199;
    const bool coarse = trial % 2 == 0;
    std::vector<std::string> ids;
    std::vector<double> s;
    std::vector<int> y;
    ScoreSet set;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("d" + std::to_string(gen() % 1000000) + "_" + std::to_string(i));
      s.push_back(coarse ? static_cast<double>(gen() % 6) / 5.0 : std::uniform_real_distribution<>(0, 1)(gen));
      y.push_back(static_cast<int>(gen() % 2));
    }
    y[0] = 1;
    y[1] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      set.entries.emplace_back(ids[i], s[i]);
      labels.push_back(y[i] ? Label::kHate : Label::kNonHate);
    }
    worst = std::max(worst, std::abs(pr_auc(set, labels) - oracle::pr_auc(ids, s, y)));
    worst = std::max(worst, std::abs(roc_auc(set, labels) - oracle::roc_auc(s, y)));
    const auto rep = classification_report(set, labels, 0.5);
    const auto c = oracle::confusion(s, y, 0.5);
    const double p = c.tp + c.fp ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    const double r = static_cast<double>(c.tp) / (c.tp + c.fn);
    if (rep.tp != c.tp || rep.fp != c.fp || rep.n_pos != c.tp + c.fn || rep.n_neg != c.fp + c.tn ||
        rep.precision != p || rep.recall != r) {
      ++confusion_mismatches;
    }
  }
  o.require(worst <= 1e-9, "max auc deviation " + fmt("%.3g", worst));
  o.require(confusion_mismatches == 0, std::to_string(confusion_mismatches) + " confusion mismatches");
  o.detail = o.pass ? "max auc deviation " + fmt("%.3g", worst) : o.detail;
  return o;
}

Tokens random_tokens(std::mt19937_64& gen) {
  Tokens out;
  const auto len = gen() % 9;
  for (std::size_t i = 0; i < len; ++i) {
    const auto r = gen() % 12;
    out.push_back(r < 2 ? std::string(kSlotToken) : "t" + std::to_string(r));
  }
  return out;
}

// 3. Sparse summed cosine against the dense double loop; selection against
// the exhaustive filter-sort.
Outcome ranker_oracles() {
  Outcome o;
  std::mt19937_64 gen(77);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Template> weak, target;
    std::vector<Tokens> weak_tokens, target_tokens;
    const auto nw = 1 + gen() % 50;
    const auto nt = 1 + gen() % 20;
    for (std::size_t i = 0; i < nw; ++i) weak.push_back(make_template("w" + std::to_string(i), random_tokens(gen)));
    for (std::size_t i = 0; i < nt; ++i) target.push_back(make_template("t" + std::to_string(i), random_tokens(gen)));
    for (const auto& t : weak) weak_tokens.push_back(t.slotted_tokens);
    for (const auto& t : target) target_tokens.push_back(t.slotted_tokens);
    const auto scored = score_pool(weak, target, fit_tfidf(weak, target));
    const auto expected = oracle::summed_cosine(weak_tokens, target_tokens);
    for (std::size_t i = 0; i < scored.size(); ++i) worst = std::max(worst, std::abs(scored[i].score - expected[i]));
  }
  o.require(worst <= 1e-12, "max score deviation " + fmt("%.3g", worst));

  int selection_mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ScoredTemplate> scored;
    std::vector<oracle::Candidate> candidates;
    const std::size_t n = gen() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      Tokens tokens{"x"};
      const int slots = static_cast<int>(gen() % 4);
      for (int k = 0; k < slots; ++k) tokens.push_back(std::string(kSlotToken));
      const double score = static_cast<double>(gen() % 4) / 3.0;
      const std::string id = "id" + std::to_string(gen() % 1000) + "-" + std::to_string(i);
      scored.push_back({make_template(id, tokens), score});
      candidates.push_back({id, slots, score});
    }
    const std::size_t k = gen() % 10;
    const int min_slots = static_cast<int>(gen() % 3);
    const int max_slots = gen() % 2 ? kUnboundedSlots : min_slots + static_cast<int>(gen() % 2);
    const auto got = select_top(scored, k, min_slots, max_slots);
    const auto want = oracle::select_top(candidates, k, min_slots, max_slots);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i].doc_id == want[i];
    if (!same) ++selection_mismatches;
  }
  o.require(selection_mismatches == 0, std::to_string(selection_mismatches) + " selection mismatches");
  if (o.pass) o.detail = "max score deviation " + fmt("%.3g", worst);
  return o;
}

// 4. Tagger capacity and gradient checks for all three models.
Outcome tagger_and_gradients() {
  Outcome o;
  const auto data = fixtures::tagged_sentences(50, 5);
  TaggerHyperparams h;
  h.max_epochs = 200;
  h.patience = 200;
  auto model = train_tagger(data, h, 0);
  const double acc = token_accuracy(model, data);
  o.require(acc >= 0.99, "token accuracy " + fmt("%.4f", acc));

  TaggerHyperparams tiny;
  tiny.char_embedding_dim = 3;
  tiny.char_conv_filters = 3;
  tiny.word_embedding_dim = 3;
  tiny.lstm_hidden_dim = 3;
  const std::vector<TaggedSentence> one{{"a", {"ab", "cab"}, {Tag::kO, Tag::kOtg}}};
  TaggerModel small(one, tiny, 3);
  const Tokens tokens{"ab", "cab"};
  const std::vector<Tag> tags{Tag::kO, Tag::kOtg};
  const auto tg = nn::check_gradients(small.parameters(), [&] { return small.loss(tokens, tags, nullptr, true); },
                                      [&] { return small.loss(tokens, tags, nullptr, false); });
  o.require(tg.max_relative_error < 1e-4, "tagger gradient " + fmt("%.3g", tg.max_relative_error));

  double worst_classifier = 0.0;
  for (const auto variant : {ClassifierVariant::kWordBiLstm, ClassifierVariant::kCharCnn}) {
    auto ch = ClassifierHyperparams::defaults(variant);
    ch.word_embedding_dim = 3;
    ch.lstm_hidden_dim = 3;
    ch.fc_hidden_dim = 4;
    ch.conv_channels = {2, 3, 2, 3, 2, 2};
    ch.conv_widths = {3, 2, 2, 2, 2, 2};
    ch.pool_sizes = {2, 1, 1, 1, 1, 2};
    ch.fc_dims = {4, 3, 2};
    ch.max_chars = 24;
    Vocabulary vocab;
    for (const char* w : {"you", "are", "vermin"}) vocab.add(w);
    ClassifierModel cm(vocab, ch, 2);
    // Keep zero biases off ReLU kinks.
    Rng rng(9);
    for (auto* p : cm.parameters()) {
      if (p->name.ends_with(".bias")) nn::init_uniform(*p, 0.2, rng);
    }
    const auto doc = Document::make("g", "you are vermin, 9 times!", Label::kHate, "source");
    const auto cg = nn::check_gradients(cm.parameters(), [&] { return cm.loss(doc, Label::kHate, nullptr, true); },
                                        [&] { return cm.loss(doc, Label::kHate, nullptr, false); });
    worst_classifier = std::max(worst_classifier, cg.max_relative_error);
    o.require(cg.max_relative_error < 1e-4,
              std::string(variant_name(variant)) + " gradient " + fmt("%.3g", cg.max_relative_error));
  }
  if (o.pass) {
    o.detail = "token accuracy " + fmt("%.4f", acc) + ", gradient errors " + fmt("%.2g", tg.max_relative_error) +
               " / " + fmt("%.2g", worst_classifier);
  }
  return o;
}

PipelineConfig synthetic_config(const synthetic::Dataset& d, const fs::path& out) {
  PipelineConfig c;
  c.source_path = d.source;
  c.target_path = d.target;
  c.weak_path = d.weak;
  c.lexicon_path = d.lexicon;
  c.apply_desk_scale();
  c.output_dir = out;
  return c;
}

// 5. Two synthetic domains, ten seeds, Word-BiLSTM.
Outcome synthetic_uda() {
  Outcome o;
  const auto dir = work_dir("uda");
  const auto data = synthetic::write_dataset(dir / "data", synthetic::Spec{});
  auto config = synthetic_config(data, dir / "out");
  config.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto result = run_experiment(config, {});
  const auto& base = *result.baseline;
  const auto& aug = *result.augmented;
  o.require(aug.prauc > base.prauc, "PRAUC did not improve");
  const double gain = base.recall > 0 ? (aug.recall - base.recall) / base.recall : (aug.recall > 0 ? 1e9 : 0.0);
  o.require(gain >= 0.20, "relative recall gain " + fmt("%.3f", gain));
  o.detail = "PRAUC " + fmt("%.3f", base.prauc) + " -> " + fmt("%.3f", aug.prauc) + ", recall " +
             fmt("%.3f", base.recall) + " -> " + fmt("%.3f", aug.recall) + (o.pass ? "" : " (" + o.detail + ")");
  return o;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

// 6. Two full runs with the same config and seeds agree byte for byte.
Outcome determinism(fs::path* report_dir) {
  Outcome o;
  const auto dir = work_dir("determinism");
  synthetic::Spec spec;
  spec.source_docs = 400;
  spec.target_docs = 240;
  spec.weak_sentences = 600;
  const auto data = synthetic::write_dataset(dir / "data", spec);
  std::vector<nlohmann::json> stages;
  for (const char* run : {"a", "b"}) {
    auto config = synthetic_config(data, dir / run);
    config.seeds = {0, 1};
    run_experiment(config, {});
    stages.push_back(read_json(config.output_dir / "manifest.json")["stages"]);
  }
  o.require(stages[0] == stages[1], "manifests differ");
  std::size_t files = 0;
  for (const auto& rec : stages[0]) files += rec["outputs"].size();
  o.require(files > 0, "no outputs recorded");
  for (const char* f : {"report.json", "report.txt"}) {
    std::ifstream a(dir / "a" / f), b(dir / "b" / f);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    o.require(sa.str() == sb.str(), std::string(f) + " differs");
  }
  if (o.pass) o.detail = std::to_string(files) + " checksummed outputs identical";
  *report_dir = dir / "a";
  return o;
}

// 7. Early stopping on a constructed validation sequence.
Outcome early_stopping() {
  Outcome o;
  nn::Parameter p("p", 2, 1);
  const std::vector<double> seq{0.9, 0.7, 0.71, 0.72, 0.73, 0.1, 0.1};
  std::vector<std::uint64_t> checksums;
  std::size_t calls = 0;
  const nn::ParameterList params{&p};
  const auto fit = nn::fit_with_early_stopping(
      params, 50, 3,
      [&](int epoch) {
        p.value(0, 0) = 0.5 * epoch;
        p.value(1, 0) = -1.0 / epoch;
        checksums.push_back(nn::parameter_checksum(params));
        return 1.0;
      },
      [&] { return seq.at(calls++); });
  o.require(fit.epochs_run == 5, "epochs run " + std::to_string(fit.epochs_run));
  o.require(fit.best_epoch == 2, "best epoch " + std::to_string(fit.best_epoch));
  o.require(checksums.size() == 5 && nn::parameter_checksum(params) == checksums[1], "restored checksum");
  if (o.pass) o.detail = "halted after epoch 5, epoch-2 parameters restored";
  return o;
}

Tokens split_ws(const std::string& line) {
  std::istringstream in(line);
  return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

// 8. Report schema, from a pipeline run and from a fractional-count fixture.
Outcome report_schema(const fs::path& run_dir) {
  Outcome o;
  const Tokens header{"Model", "Train", "PRAUC", "AUC", "PR", "REC", "F1", "TP", "FP"};
  std::ifstream in(run_dir / "report.txt");
  std::string line;
  std::getline(in, line);
  o.require(split_ws(line) == header, "run table header: " + line);
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
    o.require(split_ws(line).size() == header.size(), "run table row: " + line);
  }
  o.require(rows == 2, "expected two rows");
  const auto report = read_json(run_dir / "report.json");
  for (const char* arm : {"baseline", "augmented"}) {
    for (const char* key : {"prauc", "auc", "precision", "recall", "f1", "tp", "fp"}) {
      o.require(report[arm]["mean"].contains(key), std::string("report.json lacks ") + arm + "." + key);
    }
    o.require(report[arm]["runs"].size() == 2, "per-seed runs");
  }

  std::vector<EvalReport> ten;
  for (int i = 0; i < 10; ++i) {
    EvalReport r;
    r.prauc = 0.6 + 0.01 * i;
    r.tp = 2584 + i;
    r.fp = 100 + (i % 2);
    r.n_pos = 4000;
    r.n_neg = 9000;
    ten.push_back(r);
  }
  const auto mean = aggregate(ten);
  const std::vector<ReportRow> fixture{{"Word-BiLSTM", "source", mean}};
  const auto table = format_report_table(fixture);
  std::istringstream t(table);
  std::getline(t, line);
  o.require(split_ws(line) == header, "fixture header");
  std::getline(t, line);
  const auto cells = split_ws(line);
  o.require(cells.size() == header.size() && cells[7] == "2588.5" && cells[8] == "100.5",
            "fixture row: " + line);
  if (o.pass) o.detail = "columns " + std::to_string(header.size()) + ", fractional TP " + cells[7];
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0 && secs > limit_s) o.require(false, "over the " + fmt("%.0f", limit_s) + " s budget");
    if (!o.pass) ++failures;
    std::printf("[%s] %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
  };

  fs::path run_dir;
  report(1, "worked-example transcript", 5, transcript);
  report(2, "metric oracles", 30, metric_oracles);
  report(3, "ranker oracles", 30, ranker_oracles);
  report(4, "tagger overfit and gradient checks", 180, tagger_and_gradients);
  const auto uda_start = std::chrono::steady_clock::now();
  report(5, "synthetic domain adaptation", 900, synthetic_uda);
  const double uda_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - uda_start).count();
  report(6, "determinism", uda_secs, [&] { return determinism(&run_dir); });
  report(7, "early stopping", 0, early_stopping);
  report(8, "report schema", 0, [&] { return report_schema(run_dir); });
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
