#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "otgforge/corpus.hpp"
#include "otgforge/nn/layers.hpp"
#include "otgforge/nn/training.hpp"
#include "otgforge/vocabulary.hpp"

namespace otgforge {

enum class ClassifierVariant { kWordBiLstm, kCharCnn };

std::string_view variant_name(ClassifierVariant variant);  // "word-bilstm" / "char-cnn"
std::optional<ClassifierVariant> parse_variant(std::string_view name);
std::string_view variant_display_name(ClassifierVariant variant);  // "Word-BiLSTM" / "Char-CNN"

struct ClassifierHyperparams {
  ClassifierVariant variant = ClassifierVariant::kWordBiLstm;

  // Word-BiLSTM
  int word_embedding_dim = 50;
  int lstm_hidden_dim = 50;  // per direction
  int fc_hidden_dim = 50;    // one hidden layer before the output layer
  int max_tokens = 200;
  std::string embeddings_path;  // optional warm start, whitespace-delimited text

  // Char-CNN
  std::array<int, 6> conv_channels{64, 64, 64, 64, 64, 64};
  std::array<int, 6> conv_widths{7, 7, 3, 3, 3, 3};
  std::array<int, 6> pool_sizes{3, 3, 1, 1, 1, 3};  // 1 = no pooling
  std::array<int, 3> fc_dims{256, 256, 2};
  int max_chars = 280;

  double dropout_rate = 0.3;
  double learning_rate = 1e-3;
  int max_epochs = 10;
  int patience = 3;
  int batch_size = 32;

  static ClassifierHyperparams defaults(ClassifierVariant variant);
  // Throws kConfig on invalid dimensions, including a Char-CNN stack whose
  // feature map would shrink to nothing at max_chars.
  void validate() const;
};

// Char-CNN alphabet (70 symbols): lowercase letters, digits, 32 punctuation
// marks, one symbol shared by all non-ASCII bytes, and UNK. Whitespace and
// padding are all-zero columns.
class CharAlphabet {
 public:
  static constexpr int kSize = 70;
  static constexpr int kNonAscii = 68;
  static constexpr int kUnk = 69;
  static constexpr int kBlank = -1;
  static int index(unsigned char c);
  static std::vector<int> encode(std::string_view text, int max_chars);
};

struct ScoreSet {
  std::vector<std::pair<std::string, double>> entries;  // (doc_id, P(Hate))

  std::size_t size() const { return entries.size(); }
  std::vector<double> probabilities() const;
};

class ClassifierModel {
 public:
  ClassifierModel(Vocabulary word_vocab, const ClassifierHyperparams& hyper, std::uint64_t seed);

  ClassifierVariant variant() const { return hyper_.variant; }
  const ClassifierHyperparams& hyperparams() const { return hyper_; }
  const Vocabulary& word_vocab() const { return word_vocab_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<nn::EpochRecord>& history() const { return history_; }
  void set_history(std::vector<nn::EpochRecord> history) { history_ = std::move(history); }

  // Class distribution (NonHate, Hate) for one document.
  Eigen::Vector2d probabilities(const Document& doc) const;

  // Cross-entropy for one document; dropout active when `rng` is set,
  // gradients accumulated when `accumulate` is set.
  double loss(const Document& doc, Label label, Rng* rng, bool accumulate);

  nn::ParameterList parameters();
  std::vector<const nn::Parameter*> parameters() const;
  std::uint64_t checksum();
  // Output width of the sentence encoder (2H for Word-BiLSTM, flattened
  // feature map for Char-CNN).
  Eigen::Index feature_dim() const;

  // Copies matching rows from a whitespace-delimited embedding file
  // ("token v1 ... vD"); returns the number of vocabulary entries initialized.
  std::size_t load_embeddings(const std::filesystem::path& path);

  void save(const std::filesystem::path& path) const;
  static ClassifierModel load(const std::filesystem::path& path);

 private:
  struct Input {
    std::vector<int> ids;  // word ids or alphabet indices
  };
  struct Trace;
  Input encode(const Document& doc) const;
  // Logits for one input; dropout is active when `rng` is set. `trace`, when
  // given, records what backward() needs.
  Eigen::Vector2d forward(const Input& input, Rng* rng, Trace* trace) const;
  void backward(const Trace& trace, const Eigen::Vector2d& d_logits);
  void allocate();

  Vocabulary word_vocab_;
  ClassifierHyperparams hyper_;
  std::uint64_t seed_ = 0;
  std::vector<nn::EpochRecord> history_;

  // Word-BiLSTM
  nn::Parameter embedding_;  // D x |V|
  nn::BiLstm lstm_;
  // Char-CNN
  std::vector<nn::Parameter> conv_weights_;
  std::vector<nn::Parameter> conv_biases_;
  // Fully connected stack (one hidden + output for Word-BiLSTM, three for
  // Char-CNN).
  std::vector<nn::Parameter> fc_weights_;
  std::vector<nn::Parameter> fc_biases_;
};

// 10% seeded validation split, Adam on cross-entropy, early stopping on
// validation loss with `patience`; returns the best-validation checkpoint.
// Throws kEmptyCorpus or kSingleClassCorpus.
ClassifierModel train_classifier(const Corpus& corpus, const ClassifierHyperparams& hyper,
                                 std::uint64_t seed);

ScoreSet predict(const ClassifierModel& model, const Corpus& corpus);

// CSV "doc_id,probability" lines, no header. Throws kMalformedScore or
// kOutOfRange (with the line number).
ScoreSet import_scores(const std::filesystem::path& path);
void save_scores(const ScoreSet& scores, const std::filesystem::path& path);

}  // namespace otgforge
