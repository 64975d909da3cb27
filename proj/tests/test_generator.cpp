#include <map>

#include <set>

#include "doctest.h"
#include "otgforge/generator.hpp"
#include "otgforge/text.hpp"
#include "test_util.hpp"

using namespace otgforge;
using Tokens = std::vector<std::string>;

namespace {
Template tmpl(std::string id, const std::string& text) {
  Template t;
  t.doc_id = std::move(id);
  for (const auto& tok : tokenize(text)) t.slotted_tokens.push_back(tok == "rep" ? std::string(kSlotToken) : tok);
  t.slot_count = static_cast<int>(std::count(t.slotted_tokens.begin(), t.slotted_tokens.end(), kSlotToken));
  return t;
}

Lexicon lex(std::vector<std::string> entries) { return consolidate_lexicon(entries, "ht"); }

Corpus labeled(const std::string& prefix, std::size_t n) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back(Document::make(prefix + std::to_string(i), "x", i % 2 ? Label::kHate : Label::kNonHate, "source"));
  }
  return Corpus(prefix, std::move(docs), true);
}
}  // namespace

TEST_CASE("impute: pinned draw reproduces the transcript sentence") {
  // Seed 0 draws indices (0, 1) over the sorted terms {bananas, yucky}.
  Rng rng(0);
  const auto ex = impute(tmpl("w", "i hate REP -- they are so REP"), lex({"bananas", "yucky"}), rng);
  CHECK(ex.document.raw_text == "i hate bananas -- they are so yucky");
  CHECK(ex.imputed == Tokens{"bananas", "yucky"});
  CHECK(ex.slot_positions == std::vector<std::size_t>{2, 7});
  CHECK(ex.document.tokens == tokenize(ex.document.raw_text));
}

TEST_CASE("impute: singleton, zero-slot and empty lexicon") {
  Rng rng(4);
  CHECK(impute(tmpl("a", "REP and REP"), lex({"x"}), rng).document.raw_text == "x and x");
  CHECK(impute(tmpl("b", "nothing to fill"), lex({"x", "y"}), rng).document.raw_text == "nothing to fill");
  Lexicon empty;
  CHECK(testutil::error_code_of([&] { impute(tmpl("c", "REP"), empty, rng); }) == ErrorCode::kEmptyLexicon);
}

TEST_CASE("impute: draws are uniform (chi-square, alpha 0.001)") {
  const Lexicon h = lex({"a", "b", "c", "d", "e"});
  const auto terms = h.sorted_unigrams();
  std::map<std::string, int> counts;
  Rng rng(2024);
  const Template one = tmpl("t", "REP");
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[impute(one, h, rng).imputed[0]];
  double chi2 = 0.0;
  const double expected = draws / 5.0;
  for (const auto& t : terms) chi2 += (counts[t] - expected) * (counts[t] - expected) / expected;
  // Critical value of chi-square with 4 degrees of freedom at 0.001.
  CHECK(chi2 < 18.467);
}

TEST_CASE("generate: sizes, labels, ids and determinism") {
  std::vector<Template> hate, nonhate;
  for (int i = 0; i < 30; ++i) hate.push_back(tmpl("h" + std::to_string(i), "REP is REP number " + std::to_string(i)));
  for (int i = 0; i < 20; ++i) nonhate.push_back(tmpl("n" + std::to_string(i), i % 2 ? "only REP here" : "no slot"));
  const Lexicon h = lex({"p", "q", "r"});
  const auto a = generate(hate, nonhate, h, 9);
  const auto b = generate(hate, nonhate, h, 9);
  REQUIRE(a.corpus.size() == 50);
  CHECK(a.corpus.count_label(Label::kHate) == 30);
  CHECK(a.corpus[0].id == "aug-hate-0");
  CHECK(a.corpus[30].id == "aug-nonhate-0");
  for (std::size_t i = 0; i < a.corpus.size(); ++i) {
    CHECK(a.corpus[i].raw_text == b.corpus[i].raw_text);
    CHECK(a.corpus[i].domain == "augmented");
    CHECK(std::find(a.corpus[i].tokens.begin(), a.corpus[i].tokens.end(), kSlotToken) == a.corpus[i].tokens.end());
    const int slots = (i < 30 ? hate[i] : nonhate[i - 30]).slot_count;
    CHECK(a.corpus[i].label == (slots >= 2 ? Label::kHate : Label::kNonHate));
    CHECK(a.examples[i].imputed.size() == static_cast<std::size_t>(slots));
    for (const auto& t : a.examples[i].imputed) CHECK(h.unigrams.count(t) == 1);
  }
  const auto dir = testutil::tmp_dir("generate");
  save_augmented_jsonl(a, dir / "a.jsonl");
  save_augmented_jsonl(b, dir / "b.jsonl");
  CHECK(testutil::read_file(dir / "a.jsonl") == testutil::read_file(dir / "b.jsonl"));
  CHECK(testutil::read_file(dir / "a.jsonl").find("\"template_id\":\"h0\"") != std::string::npos);
}

TEST_CASE("merge") {
  std::vector<Template> hate(10000, tmpl("h", "REP x REP"));
  std::vector<Template> nonhate(10000, tmpl("n", "y REP"));
  const auto aug = generate(hate, nonhate, lex({"z"}), 1);
  CHECK(aug.corpus.size() == 20000);
  CHECK(aug.corpus.count_label(Label::kHate) == 10000);
  const Corpus merged = merge(labeled("src", 7006), aug.corpus);
  CHECK(merged.size() == 27006);
  CHECK(merged[0].id == "src0");
  CHECK(merged[7006].id == "aug-hate-0");

  const Corpus empty("e", {}, true);
  const Corpus same = merge(labeled("s", 5), empty);
  REQUIRE(same.size() == 5);
  CHECK(same[4].id == "s4");

  CHECK(testutil::error_code_of([] { merge(labeled("s", 3), labeled("s", 2)); }) == ErrorCode::kDuplicateId);
}
