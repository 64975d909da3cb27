#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "otgforge/nn/training.hpp"
#include "otgforge/random.hpp"
#include "otgforge/tagger.hpp"
#include "test_util.hpp"

using namespace otgforge;
using Tokens = std::vector<std::string>;

namespace {
TaggerHyperparams tiny() {
  TaggerHyperparams h;
  h.char_embedding_dim = 3;
  h.char_conv_filters = 3;
  h.char_conv_width = 3;
  h.word_embedding_dim = 3;
  h.lstm_hidden_dim = 3;
  return h;
}
}  // namespace

TEST_CASE("tagger gradient check at tiny dimensions") {
  const std::vector<TaggedSentence> data{{"a", {"ab", "cab"}, {Tag::kO, Tag::kOtg}}};
  TaggerModel model(data, tiny(), 3);
  const Tokens tokens{"ab", "cab"};
  const std::vector<Tag> tags{Tag::kO, Tag::kOtg};
  const auto result = nn::check_gradients(
      model.parameters(), [&] { return model.loss(tokens, tags, nullptr, true); },
      [&] { return model.loss(tokens, tags, nullptr, false); });
  CHECK(result.entries_checked > 50);
  CHECK_MESSAGE(result.max_relative_error < 1e-4, result.worst_parameter);
}

TEST_CASE("tagger: errors and contracts") {
  CHECK(testutil::error_code_of([] { train_tagger({}, {}, 0); }) == ErrorCode::kEmptyTrainingData);
  const std::vector<TaggedSentence> no_pos{{"a", {"x", "y"}, {Tag::kO, Tag::kO}}};
  CHECK(testutil::error_code_of([&] { train_tagger(no_pos, {}, 0); }) == ErrorCode::kNoPositiveTags);

  TaggerHyperparams bad;
  bad.patience = 0;
  CHECK(testutil::error_code_of([&] { bad.validate(); }) == ErrorCode::kConfig);

  const auto data = fixtures::tagged_sentences(10, 1);
  TaggerModel model(data, tiny(), 0);
  CHECK(tag_sentence(model, "e", {}).tags.empty());
  const Tokens seven{"a", "b", "c", "d", "e", "f", "g"};
  CHECK(model.predict(seven).size() == 7);

  std::vector<Document> docs{Document::make("d1", "my honda", std::nullopt, "target"),
                             Document::make("d2", "so slow", std::nullopt, "target")};
  const Corpus corpus("c", docs, false);
  const auto tagged = tag_corpus(model, corpus);
  REQUIRE(tagged.size() == 2);
  CHECK(tagged[1].doc_id == "d2");
  const auto again = tag_corpus(model, corpus);
  CHECK(again[0].tags == tagged[0].tags);
  CHECK(tag_corpus(model, Corpus("e", {}, false)).empty());
}

TEST_CASE("tagger: masking the character path ties unknown words") {
  const auto data = fixtures::tagged_sentences(10, 2);
  TaggerModel model(data, {}, 5);
  const Tokens a{"the", "qqqzz", "is", "slow"};
  const Tokens b{"the", "xyxyw", "is", "slow"};
  const auto pa = model.probabilities(a, true);
  const auto pb = model.probabilities(b, true);
  CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
  const auto ua = model.probabilities(a, false);
  const auto ub = model.probabilities(b, false);
  CHECK((ua - ub).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("tagger: training is deterministic and checkpoints reload exactly") {
  const auto data = fixtures::tagged_sentences(30, 3);
  TaggerHyperparams h;
  h.max_epochs = 3;
  auto a = train_tagger(data, h, 7);
  auto b = train_tagger(data, h, 7);
  CHECK(a.checksum() == b.checksum());
  CHECK(a.history().size() == b.history().size());

  const auto dir = testutil::tmp_dir("tagger_ckpt");
  a.save(dir / "t.ckpt");
  auto back = TaggerModel::load(dir / "t.ckpt");
  CHECK(back.checksum() == a.checksum());
  CHECK(back.word_vocab().items() == a.word_vocab().items());
  for (const auto& s : data) CHECK(back.predict(s.tokens) == a.predict(s.tokens));
  back.save(dir / "u.ckpt");
  CHECK(testutil::read_file(dir / "t.ckpt") == testutil::read_file(dir / "u.ckpt"));
}

TEST_CASE("tagger: vocabulary comes from the training split only") {
  auto data = fixtures::tagged_sentences(40, 4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i].tokens.push_back("unique" + std::to_string(i));
    data[i].tags.push_back(Tag::kO);
  }
  TaggerHyperparams h;
  h.max_epochs = 1;
  const std::uint64_t seed = 1;
  auto model = train_tagger(data, h, seed);
  const auto [holdout, rest] = holdout_indices(data.size(), 0.1, derive_seed(seed, 1));
  REQUIRE(holdout.size() == 4);
  for (const auto i : holdout) CHECK_FALSE(model.word_vocab().contains("unique" + std::to_string(i)));
  for (const auto i : rest) CHECK(model.word_vocab().contains("unique" + std::to_string(i)));
}
