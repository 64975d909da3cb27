#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "otgforge/corpus.hpp"
#include "otgforge/lexicon.hpp"
#include "otgforge/nn/layers.hpp"
#include "otgforge/nn/training.hpp"
#include "otgforge/vocabulary.hpp"

namespace otgforge {

struct TaggerHyperparams {
  int char_embedding_dim = 16;
  int char_conv_filters = 30;
  int char_conv_width = 3;
  int word_embedding_dim = 50;
  int lstm_hidden_dim = 50;  // per direction
  double dropout_rate = 0.3;
  double learning_rate = 1e-3;
  int max_epochs = 50;
  int patience = 3;
  int batch_size = 32;
  // Probability of replacing a training token's word id with UNK, so that the
  // UNK embedding is trained alongside the character path.
  double unk_replace_rate = 0.05;

  // Throws kConfig when a dimension or rate is out of range.
  void validate() const;
};

// OTG sequence tagger: per-word character convolution with max pooling,
// concatenated with a word embedding, a BiLSTM and a per-token softmax over
// {O, OTG}.
class TaggerModel {
 public:
  static constexpr int kMaxWordChars = 32;
  static constexpr int kNumTags = 2;

  // Builds vocabularies from `data` and randomly initializes all parameters.
  TaggerModel(std::span<const TaggedSentence> data, const TaggerHyperparams& hyper,
              std::uint64_t seed);

  // Explicit vocabularies; used by checkpoint loading and tests.
  TaggerModel(Vocabulary char_vocab, Vocabulary word_vocab, const TaggerHyperparams& hyper,
              std::uint64_t seed);

  const Vocabulary& char_vocab() const { return char_vocab_; }
  const Vocabulary& word_vocab() const { return word_vocab_; }
  const TaggerHyperparams& hyperparams() const { return hyper_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<nn::EpochRecord>& history() const { return history_; }
  void set_history(std::vector<nn::EpochRecord> history) { history_ = std::move(history); }

  // Per-token distribution over {O, OTG}: a 2 x T matrix. With
  // `mask_char_path` every word's character input is all zeros.
  nn::Matrix probabilities(std::span<const std::string> tokens, bool mask_char_path = false) const;

  // Argmax tags.
  std::vector<Tag> predict(std::span<const std::string> tokens) const;

  // Summed token cross-entropy for one sentence. With `rng` set, dropout and
  // UNK replacement are active. With `accumulate` set, gradients are added to
  // every parameter's grad.
  double loss(std::span<const std::string> tokens, std::span<const Tag> tags, Rng* rng,
              bool accumulate);

  nn::ParameterList parameters();
  std::vector<const nn::Parameter*> parameters() const;
  std::uint64_t checksum();

  void save(const std::filesystem::path& path) const;
  static TaggerModel load(const std::filesystem::path& path);

 private:
  struct Encoded {
    std::vector<int> word_ids;
    std::vector<std::vector<int>> char_ids;  // each padded for the convolution
  };
  Encoded encode(std::span<const std::string> tokens) const;
  void allocate();

  Vocabulary char_vocab_;
  Vocabulary word_vocab_;
  TaggerHyperparams hyper_;
  std::uint64_t seed_ = 0;
  std::vector<nn::EpochRecord> history_;

  nn::Parameter char_embedding_;  // Dc x |chars|
  nn::Parameter char_filters_;    // F x (Dc * width)
  nn::Parameter char_bias_;       // F x 1
  nn::Parameter word_embedding_;  // Dw x |words|
  nn::BiLstm lstm_;
  nn::Parameter output_weight_;  // 2 x 2H
  nn::Parameter output_bias_;    // 2 x 1
};

// Trains with per-token cross-entropy and Adam. 10% of the sentences (seeded)
// are held out for validation; training stops once validation loss fails to
// improve for `patience` epochs and the best parameters are returned, rounded
// to float precision. Throws kEmptyTrainingData or kNoPositiveTags.
TaggerModel train_tagger(std::span<const TaggedSentence> data, const TaggerHyperparams& hyper,
                         std::uint64_t seed);

TaggedSentence tag_sentence(const TaggerModel& model, std::string doc_id,
                            std::span<const std::string> tokens);
std::vector<TaggedSentence> tag_corpus(const TaggerModel& model, const Corpus& corpus);

// Fraction of tokens whose predicted tag matches the reference.
double token_accuracy(const TaggerModel& model, std::span<const TaggedSentence> data);

}  // namespace otgforge
