#include "otgforge/tagger.hpp"

#include <algorithm>
#include <cmath>

#include "otgforge/checkpoint.hpp"
#include "otgforge/error.hpp"
#include "otgforge/parallel.hpp"

namespace otgforge {
namespace {

constexpr std::string_view kCheckpointKind = "otg-tagger";

std::string lower_ascii(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

int tag_index(Tag t) { return t == Tag::kOtg ? 1 : 0; }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void TaggerHyperparams::validate() const {
  if (char_embedding_dim < 1 || char_conv_filters < 1 || char_conv_width < 1 || word_embedding_dim < 1 ||
      lstm_hidden_dim < 1 || max_epochs < 1 || batch_size < 1) {
    throw Error(ErrorCode::kConfig, "tagger dimensions, epochs and batch size must be >= 1");
  }
  if (patience < 1) throw Error(ErrorCode::kConfig, "tagger patience must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw Error(ErrorCode::kConfig, "tagger dropout must lie in [0, 1)");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kConfig, "tagger learning rate must be > 0");
  if (!(unk_replace_rate >= 0.0 && unk_replace_rate < 1.0)) {
    throw Error(ErrorCode::kConfig, "tagger unk_replace_rate must lie in [0, 1)");
  }
}

TaggerModel::TaggerModel(std::span<const TaggedSentence> data, const TaggerHyperparams& hyper,
                         std::uint64_t seed)
    : hyper_(hyper), seed_(seed) {
  hyper_.validate();
  for (const auto& s : data) {
    for (const auto& token : s.tokens) {
      const std::string word = lower_ascii(token);
      word_vocab_.add(word);
      for (std::size_t i = 0; i < word.size() && i < kMaxWordChars; ++i) {
        char_vocab_.add(std::string(1, word[i]));
      }
    }
  }
  allocate();
}

TaggerModel::TaggerModel(Vocabulary char_vocab, Vocabulary word_vocab, const TaggerHyperparams& hyper,
                         std::uint64_t seed)
    : char_vocab_(std::move(char_vocab)), word_vocab_(std::move(word_vocab)), hyper_(hyper), seed_(seed) {
  hyper_.validate();
  allocate();
}

void TaggerModel::allocate() {
  const auto chars = static_cast<Eigen::Index>(char_vocab_.size());
  const auto words = static_cast<Eigen::Index>(word_vocab_.size());
  char_embedding_ = nn::Parameter("char_embedding", hyper_.char_embedding_dim, chars);
  char_filters_ = nn::Parameter("char_filters", hyper_.char_conv_filters,
                                static_cast<Eigen::Index>(hyper_.char_embedding_dim) * hyper_.char_conv_width);
  char_bias_ = nn::Parameter("char_bias", hyper_.char_conv_filters, 1);
  word_embedding_ = nn::Parameter("word_embedding", hyper_.word_embedding_dim, words);
  lstm_ = nn::BiLstm("bilstm", hyper_.word_embedding_dim + hyper_.char_conv_filters, hyper_.lstm_hidden_dim);
  output_weight_ = nn::Parameter("output_weight", kNumTags, 2 * hyper_.lstm_hidden_dim);
  output_bias_ = nn::Parameter("output_bias", kNumTags, 1);

  Rng rng(derive_seed(seed_, 0));
  init_uniform(char_embedding_, std::sqrt(3.0 / hyper_.char_embedding_dim), rng);
  init_glorot(char_filters_, rng);
  init_uniform(word_embedding_, std::sqrt(3.0 / hyper_.word_embedding_dim), rng);
  word_embedding_.value.col(Vocabulary::kPad).setZero();
  lstm_.init(rng);
  init_glorot(output_weight_, rng);
}

nn::ParameterList TaggerModel::parameters() {
  nn::ParameterList list{&char_embedding_, &char_filters_, &char_bias_, &word_embedding_};
  lstm_.append_to(list);
  list.push_back(&output_weight_);
  list.push_back(&output_bias_);
  return list;
}

std::vector<const nn::Parameter*> TaggerModel::parameters() const {
  const auto list = const_cast<TaggerModel*>(this)->parameters();
  return {list.begin(), list.end()};
}

std::uint64_t TaggerModel::checksum() { return nn::parameter_checksum(parameters()); }

TaggerModel::Encoded TaggerModel::encode(std::span<const std::string> tokens) const {
  Encoded enc;
  const int left = (hyper_.char_conv_width - 1) / 2;
  const int right = hyper_.char_conv_width - 1 - left;
  for (const auto& token : tokens) {
    const std::string word = lower_ascii(token);
    enc.word_ids.push_back(word_vocab_.lookup(word));
    std::vector<int> chars(static_cast<std::size_t>(left), -1);
    for (std::size_t i = 0; i < word.size() && i < kMaxWordChars; ++i) {
      chars.push_back(char_vocab_.lookup(std::string(1, word[i])));
    }
    if (word.empty()) chars.push_back(Vocabulary::kUnk);
    chars.insert(chars.end(), static_cast<std::size_t>(right), -1);
    enc.char_ids.push_back(std::move(chars));
  }
  return enc;
}

double TaggerModel::loss(std::span<const std::string> tokens, std::span<const Tag> tags, Rng* rng,
                         bool accumulate) {
  const auto steps = static_cast<Eigen::Index>(tokens.size());
  if (steps == 0) return 0.0;
  Encoded enc = encode(tokens);
  if (rng && hyper_.unk_replace_rate > 0.0) {
    for (auto& id : enc.word_ids) {
      if (uniform01(*rng) < hyper_.unk_replace_rate) id = Vocabulary::kUnk;
    }
  }

  const int dw = hyper_.word_embedding_dim;
  const int filters = hyper_.char_conv_filters;
  nn::Matrix x(dw + filters, steps);
  x.topRows(dw) = nn::gather_columns(word_embedding_, enc.word_ids);

  std::vector<nn::Matrix> unfolded(static_cast<std::size_t>(steps));
  std::vector<std::vector<Eigen::Index>> argmax(static_cast<std::size_t>(steps));
  for (Eigen::Index t = 0; t < steps; ++t) {
    const auto& ids = enc.char_ids[static_cast<std::size_t>(t)];
    unfolded[static_cast<std::size_t>(t)] =
        nn::unfold(nn::gather_columns(char_embedding_, ids), hyper_.char_conv_width);
    const nn::Matrix conv = nn::conv1d_forward(char_filters_, char_bias_, unfolded[static_cast<std::size_t>(t)]);
    x.block(dw, t, filters, 1) = nn::max_over_columns(conv, &argmax[static_cast<std::size_t>(t)]);
  }

  nn::Matrix in_mask, out_mask;
  if (rng && hyper_.dropout_rate > 0.0) {
    in_mask = nn::dropout_mask(x.rows(), x.cols(), hyper_.dropout_rate, *rng);
    x.array() *= in_mask.array();
  }
  nn::BiLstmTrace trace;
  nn::Matrix h = nn::bilstm_forward(lstm_, x, &trace);
  if (rng && hyper_.dropout_rate > 0.0) {
    out_mask = nn::dropout_mask(h.rows(), h.cols(), hyper_.dropout_rate, *rng);
    h.array() *= out_mask.array();
  }
  const nn::Matrix logits = nn::linear_forward(output_weight_, output_bias_, h);
  std::vector<int> targets;
  targets.reserve(tags.size());
  for (Tag t : tags) targets.push_back(tag_index(t));
  nn::Matrix d_logits;
  const double total = nn::softmax_cross_entropy(logits, targets, accumulate ? &d_logits : nullptr);
  if (!accumulate) return total;

  nn::Matrix dh = nn::linear_backward(output_weight_, output_bias_, h, d_logits);
  if (out_mask.size() > 0) dh.array() *= out_mask.array();
  nn::Matrix dx = nn::bilstm_backward(lstm_, trace, dh);
  if (in_mask.size() > 0) dx.array() *= in_mask.array();
  nn::scatter_add_columns(word_embedding_, enc.word_ids, dx.topRows(dw));
  for (Eigen::Index t = 0; t < steps; ++t) {
    const auto k = static_cast<std::size_t>(t);
    const nn::Matrix d_conv = nn::max_over_columns_backward(dx.block(dw, t, filters, 1), argmax[k],
                                                            unfolded[k].cols());
    const nn::Matrix d_unfolded = nn::conv1d_backward(char_filters_, char_bias_, unfolded[k], d_conv);
    const auto& ids = enc.char_ids[k];
    const nn::Matrix d_chars = nn::fold_gradient(d_unfolded, hyper_.char_embedding_dim,
                                                 static_cast<Eigen::Index>(ids.size()), hyper_.char_conv_width);
    nn::scatter_add_columns(char_embedding_, ids, d_chars);
  }
  return total;
}

nn::Matrix TaggerModel::probabilities(std::span<const std::string> tokens, bool mask_char_path) const {
  const auto steps = static_cast<Eigen::Index>(tokens.size());
  if (steps == 0) return nn::Matrix(kNumTags, 0);
  const Encoded enc = encode(tokens);
  const int dw = hyper_.word_embedding_dim;
  const int filters = hyper_.char_conv_filters;
  nn::Matrix x(dw + filters, steps);
  x.topRows(dw) = nn::gather_columns(word_embedding_, enc.word_ids);
  for (Eigen::Index t = 0; t < steps; ++t) {
    if (mask_char_path) {
      // all-zero character input: every window reduces to the bias
      x.block(dw, t, filters, 1) = char_bias_.value;
      continue;
    }
    const nn::Matrix unfolded =
        nn::unfold(nn::gather_columns(char_embedding_, enc.char_ids[static_cast<std::size_t>(t)]),
                   hyper_.char_conv_width);
    x.block(dw, t, filters, 1) =
        nn::max_over_columns(nn::conv1d_forward(char_filters_, char_bias_, unfolded), nullptr);
  }
  const nn::Matrix h = nn::bilstm_forward(lstm_, x, nullptr);
  return nn::softmax_columns(nn::linear_forward(output_weight_, output_bias_, h));
}

std::vector<Tag> TaggerModel::predict(std::span<const std::string> tokens) const {
  const nn::Matrix p = probabilities(tokens);
  std::vector<Tag> tags(tokens.size(), Tag::kO);
  for (Eigen::Index t = 0; t < p.cols(); ++t) {
    if (p(1, t) > p(0, t)) tags[static_cast<std::size_t>(t)] = Tag::kOtg;
  }
  return tags;
}

void TaggerModel::save(const std::filesystem::path& path) const {
  Checkpoint ckpt;
  ckpt.kind = std::string(kCheckpointKind);
  ckpt.meta["seed"] = std::to_string(seed_);
  ckpt.meta["char_embedding_dim"] = std::to_string(hyper_.char_embedding_dim);
  ckpt.meta["char_conv_filters"] = std::to_string(hyper_.char_conv_filters);
  ckpt.meta["char_conv_width"] = std::to_string(hyper_.char_conv_width);
  ckpt.meta["word_embedding_dim"] = std::to_string(hyper_.word_embedding_dim);
  ckpt.meta["lstm_hidden_dim"] = std::to_string(hyper_.lstm_hidden_dim);
  ckpt.meta["dropout_rate"] = format_double(hyper_.dropout_rate);
  ckpt.meta["learning_rate"] = format_double(hyper_.learning_rate);
  ckpt.meta["max_epochs"] = std::to_string(hyper_.max_epochs);
  ckpt.meta["patience"] = std::to_string(hyper_.patience);
  ckpt.meta["batch_size"] = std::to_string(hyper_.batch_size);
  ckpt.meta["unk_replace_rate"] = format_double(hyper_.unk_replace_rate);
  ckpt.lists["char_vocab"] = char_vocab_.items();
  ckpt.lists["word_vocab"] = word_vocab_.items();
  for (const auto* p : parameters()) ckpt.add_tensor(p->name, p->value);
  ckpt.write(path);
}

TaggerModel TaggerModel::load(const std::filesystem::path& path) {
  const Checkpoint ckpt = Checkpoint::read(path);
  if (ckpt.kind != kCheckpointKind) {
    throw Error(ErrorCode::kMalformedCheckpoint, path.string() + " holds a '" + ckpt.kind + "', not a tagger");
  }
  TaggerHyperparams hyper;
  try {
    hyper.char_embedding_dim = std::stoi(ckpt.get_meta("char_embedding_dim"));
    hyper.char_conv_filters = std::stoi(ckpt.get_meta("char_conv_filters"));
    hyper.char_conv_width = std::stoi(ckpt.get_meta("char_conv_width"));
    hyper.word_embedding_dim = std::stoi(ckpt.get_meta("word_embedding_dim"));
    hyper.lstm_hidden_dim = std::stoi(ckpt.get_meta("lstm_hidden_dim"));
    hyper.dropout_rate = std::stod(ckpt.get_meta("dropout_rate"));
    hyper.learning_rate = std::stod(ckpt.get_meta("learning_rate"));
    hyper.max_epochs = std::stoi(ckpt.get_meta("max_epochs"));
    hyper.patience = std::stoi(ckpt.get_meta("patience"));
    hyper.batch_size = std::stoi(ckpt.get_meta("batch_size"));
    hyper.unk_replace_rate = std::stod(ckpt.get_meta("unk_replace_rate"));
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::kMalformedCheckpoint, std::string("bad tagger metadata: ") + e.what());
  }
  TaggerModel model(Vocabulary::from_items(ckpt.get_list("char_vocab")),
                    Vocabulary::from_items(ckpt.get_list("word_vocab")), hyper,
                    std::stoull(ckpt.get_meta("seed")));
  for (auto* p : model.parameters()) p->value = ckpt.tensor(p->name, p->value.rows(), p->value.cols());
  return model;
}

TaggerModel train_tagger(std::span<const TaggedSentence> data, const TaggerHyperparams& hyper,
                         std::uint64_t seed) {
  if (data.empty()) throw Error(ErrorCode::kEmptyTrainingData, "no tagged sentences to train on");
  bool any_otg = false;
  for (const auto& s : data) {
    if (s.tags.size() != s.tokens.size()) {
      throw Error(ErrorCode::kMalformedRecord, "sentence '" + s.doc_id + "' has mismatched tags");
    }
    any_otg = any_otg || s.otg_count() > 0;
  }
  if (!any_otg) throw Error(ErrorCode::kNoPositiveTags, "no OTG tag in the training data");
  hyper.validate();

  auto [validation_idx, train_idx] = holdout_indices(data.size(), 0.1, derive_seed(seed, 1));
  // Too little data for a holdout: validate on the training sentences.
  if (validation_idx.empty()) validation_idx = train_idx;

  std::vector<TaggedSentence> train;
  for (std::size_t i : train_idx) train.push_back(data[i]);
  TaggerModel model(train, hyper, seed);

  const auto params = model.parameters();
  nn::Adam adam({.learning_rate = hyper.learning_rate});
  Rng rng(derive_seed(seed, 2));
  std::vector<std::size_t> order(train.size());

  auto run_epoch = [&](int) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
    double total = 0.0;
    std::size_t tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      std::size_t batch_tokens = 0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = train[order[k]];
        total += model.loss(s.tokens, s.tags, &rng, true);
        batch_tokens += s.tokens.size();
      }
      tokens += batch_tokens;
      if (batch_tokens > 0) adam.step(params, 1.0 / static_cast<double>(batch_tokens));
    }
    return tokens > 0 ? total / static_cast<double>(tokens) : 0.0;
  };
  auto validation_loss = [&] {
    double total = 0.0;
    std::size_t tokens = 0;
    for (std::size_t i : validation_idx) {
      total += model.loss(data[i].tokens, data[i].tags, nullptr, false);
      tokens += data[i].tokens.size();
    }
    return tokens > 0 ? total / static_cast<double>(tokens) : 0.0;
  };

  nn::FitResult fit = nn::fit_with_early_stopping(params, hyper.max_epochs, hyper.patience, run_epoch,
                                                  validation_loss);
  nn::quantize_to_float(params);
  for (auto* p : params) {
    p->adam_m.resize(0, 0);
    p->adam_v.resize(0, 0);
  }
  model.set_history(std::move(fit.history));
  return model;
}

TaggedSentence tag_sentence(const TaggerModel& model, std::string doc_id, std::span<const std::string> tokens) {
  return {std::move(doc_id), std::vector<std::string>(tokens.begin(), tokens.end()), model.predict(tokens)};
}

std::vector<TaggedSentence> tag_corpus(const TaggerModel& model, const Corpus& corpus) {
  std::vector<TaggedSentence> out(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) {
    out[i] = tag_sentence(model, corpus[i].id, corpus[i].tokens);
  });
  return out;
}

double token_accuracy(const TaggerModel& model, std::span<const TaggedSentence> data) {
  std::size_t correct = 0, total = 0;
  for (const auto& s : data) {
    const auto predicted = model.predict(s.tokens);
    for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == s.tags[i];
    total += s.tokens.size();
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace otgforge
