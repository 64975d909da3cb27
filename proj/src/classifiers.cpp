#include "otgforge/classifiers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "otgforge/checkpoint.hpp"
#include "otgforge/error.hpp"
#include "otgforge/parallel.hpp"

namespace otgforge {
namespace {

constexpr std::string_view kCheckpointKind = "otg-classifier";
constexpr std::string_view kPunctuation = "-,;.!?:'\"/\\|_@#$%^&*~`+=<>()[]{}";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <std::size_t N>
std::string join_ints(const std::array<int, N>& values) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

template <std::size_t N>
std::array<int, N> split_ints(const std::string& text) {
  std::array<int, N> out{};
  std::istringstream in(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(in, item, ',')) {
    if (i >= N) throw Error(ErrorCode::kMalformedCheckpoint, "too many values in '" + text + "'");
    out[i++] = std::stoi(item);
  }
  if (i != N) throw Error(ErrorCode::kMalformedCheckpoint, "too few values in '" + text + "'");
  return out;
}

// Feature map length after each Char-CNN layer; 0 marks a collapsed map.
std::array<Eigen::Index, 6> char_cnn_lengths(const ClassifierHyperparams& h) {
  std::array<Eigen::Index, 6> lengths{};
  Eigen::Index len = h.max_chars;
  for (std::size_t l = 0; l < 6; ++l) {
    len = len - h.conv_widths[l] + 1;
    if (len < 1) len = 0;
    if (h.pool_sizes[l] > 1) len /= h.pool_sizes[l];
    lengths[l] = len;
  }
  return lengths;
}

}  // namespace

std::string_view variant_name(ClassifierVariant variant) {
  return variant == ClassifierVariant::kWordBiLstm ? "word-bilstm" : "char-cnn";
}

std::string_view variant_display_name(ClassifierVariant variant) {
  return variant == ClassifierVariant::kWordBiLstm ? "Word-BiLSTM" : "Char-CNN";
}

std::optional<ClassifierVariant> parse_variant(std::string_view name) {
  std::string v(name);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "word-bilstm" || v == "wordbilstm") return ClassifierVariant::kWordBiLstm;
  if (v == "char-cnn" || v == "charcnn") return ClassifierVariant::kCharCnn;
  return std::nullopt;
}

ClassifierHyperparams ClassifierHyperparams::defaults(ClassifierVariant variant) {
  ClassifierHyperparams h;
  h.variant = variant;
  if (variant == ClassifierVariant::kCharCnn) h.dropout_rate = 0.5;
  return h;
}

void ClassifierHyperparams::validate() const {
  auto positive = [](int v) { return v >= 1; };
  bool ok = positive(max_epochs) && positive(batch_size) && positive(patience);
  if (variant == ClassifierVariant::kWordBiLstm) {
    ok = ok && positive(word_embedding_dim) && positive(lstm_hidden_dim) && positive(fc_hidden_dim) &&
         positive(max_tokens);
  } else {
    ok = ok && positive(max_chars) && std::all_of(conv_channels.begin(), conv_channels.end(), positive) &&
         std::all_of(conv_widths.begin(), conv_widths.end(), positive) &&
         std::all_of(pool_sizes.begin(), pool_sizes.end(), positive) &&
         std::all_of(fc_dims.begin(), fc_dims.end(), positive);
  }
  if (!ok) throw Error(ErrorCode::kConfig, "classifier dimensions, epochs, batch size and patience must be >= 1");
  if (variant == ClassifierVariant::kCharCnn) {
    if (fc_dims[2] != 2) throw Error(ErrorCode::kConfig, "the last Char-CNN fully connected layer must have 2 outputs");
    if (char_cnn_lengths(*this)[5] < 1) {
      throw Error(ErrorCode::kConfig, "max_chars " + std::to_string(max_chars) + " is too short for the Char-CNN stack");
    }
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw Error(ErrorCode::kConfig, "classifier dropout must lie in [0, 1)");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kConfig, "classifier learning rate must be > 0");
}

int CharAlphabet::index(unsigned char c) {
  if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c >= '0' && c <= '9') return 26 + (c - '0');
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return kBlank;
  if (c >= 0x80) return kNonAscii;
  const auto pos = kPunctuation.find(static_cast<char>(c));
  return pos == std::string_view::npos ? kUnk : 36 + static_cast<int>(pos);
}

std::vector<int> CharAlphabet::encode(std::string_view text, int max_chars) {
  std::vector<int> out(static_cast<std::size_t>(max_chars), kBlank);
  const std::size_t n = std::min(text.size(), static_cast<std::size_t>(max_chars));
  for (std::size_t i = 0; i < n; ++i) out[i] = index(static_cast<unsigned char>(text[i]));
  return out;
}

std::vector<double> ScoreSet::probabilities() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.second);
  return out;
}

struct ClassifierModel::Trace {
  Input input;
  // Word-BiLSTM
  nn::Matrix embedded;
  nn::Matrix embed_mask;
  nn::BiLstmTrace lstm;
  Eigen::Index steps = 0;
  // Char-CNN: per-layer unfolded input (layers 2..6), pre-activation output
  // and pooling argmax
  std::vector<nn::Matrix> unfolded;
  std::vector<nn::Matrix> conv_out;
  std::vector<Eigen::Index> conv_cols;
  std::vector<std::vector<Eigen::Index>> pool_argmax;
  // Fully connected stack: input to layer i, its pre-activation and the
  // dropout mask applied to its input
  std::vector<nn::Matrix> fc_in;
  std::vector<nn::Matrix> fc_pre;
  std::vector<nn::Matrix> fc_mask;
};

ClassifierModel::ClassifierModel(Vocabulary word_vocab, const ClassifierHyperparams& hyper, std::uint64_t seed)
    : word_vocab_(std::move(word_vocab)), hyper_(hyper), seed_(seed) {
  hyper_.validate();
  allocate();
}

Eigen::Index ClassifierModel::feature_dim() const {
  if (hyper_.variant == ClassifierVariant::kWordBiLstm) return 2 * hyper_.lstm_hidden_dim;
  return hyper_.conv_channels[5] * char_cnn_lengths(hyper_)[5];
}

void ClassifierModel::allocate() {
  Rng rng(derive_seed(seed_, 0));
  std::vector<int> fc_sizes;
  if (hyper_.variant == ClassifierVariant::kWordBiLstm) {
    embedding_ = nn::Parameter("embedding", hyper_.word_embedding_dim, static_cast<Eigen::Index>(word_vocab_.size()));
    init_uniform(embedding_, std::sqrt(3.0 / hyper_.word_embedding_dim), rng);
    embedding_.value.col(Vocabulary::kPad).setZero();
    lstm_ = nn::BiLstm("bilstm", hyper_.word_embedding_dim, hyper_.lstm_hidden_dim);
    lstm_.init(rng);
    fc_sizes = {hyper_.fc_hidden_dim, 2};
  } else {
    int in_channels = CharAlphabet::kSize;
    for (std::size_t l = 0; l < 6; ++l) {
      const std::string name = "conv" + std::to_string(l + 1);
      conv_weights_.emplace_back(name + ".weight", hyper_.conv_channels[l],
                                 static_cast<Eigen::Index>(in_channels) * hyper_.conv_widths[l]);
      conv_biases_.emplace_back(name + ".bias", hyper_.conv_channels[l], 1);
      init_glorot(conv_weights_.back(), rng);
      in_channels = hyper_.conv_channels[l];
    }
    fc_sizes.assign(hyper_.fc_dims.begin(), hyper_.fc_dims.end());
  }
  Eigen::Index in_dim = feature_dim();
  for (std::size_t i = 0; i < fc_sizes.size(); ++i) {
    const std::string name = "fc" + std::to_string(i + 1);
    fc_weights_.emplace_back(name + ".weight", fc_sizes[i], in_dim);
    fc_biases_.emplace_back(name + ".bias", fc_sizes[i], 1);
    init_glorot(fc_weights_.back(), rng);
    in_dim = fc_sizes[i];
  }
}

nn::ParameterList ClassifierModel::parameters() {
  nn::ParameterList list;
  if (hyper_.variant == ClassifierVariant::kWordBiLstm) {
    list.push_back(&embedding_);
    lstm_.append_to(list);
  }
  for (std::size_t i = 0; i < conv_weights_.size(); ++i) {
    list.push_back(&conv_weights_[i]);
    list.push_back(&conv_biases_[i]);
  }
  for (std::size_t i = 0; i < fc_weights_.size(); ++i) {
    list.push_back(&fc_weights_[i]);
    list.push_back(&fc_biases_[i]);
  }
  return list;
}

std::vector<const nn::Parameter*> ClassifierModel::parameters() const {
  const auto list = const_cast<ClassifierModel*>(this)->parameters();
  return {list.begin(), list.end()};
}

std::uint64_t ClassifierModel::checksum() { return nn::parameter_checksum(parameters()); }

ClassifierModel::Input ClassifierModel::encode(const Document& doc) const {
  Input input;
  if (hyper_.variant == ClassifierVariant::kWordBiLstm) {
    const std::size_t n = std::min(doc.tokens.size(), static_cast<std::size_t>(hyper_.max_tokens));
    for (std::size_t i = 0; i < n; ++i) input.ids.push_back(word_vocab_.lookup(doc.tokens[i]));
    if (input.ids.empty()) input.ids.push_back(-1);  // empty text: one zero vector
  } else {
    input.ids = CharAlphabet::encode(doc.raw_text, hyper_.max_chars);
  }
  return input;
}

Eigen::Vector2d ClassifierModel::forward(const Input& input, Rng* rng, Trace* trace) const {
  const bool dropout = rng && hyper_.dropout_rate > 0.0;
  nn::Matrix features;
  if (hyper_.variant == ClassifierVariant::kWordBiLstm) {
    nn::Matrix embedded = nn::gather_columns(embedding_, input.ids);
    if (dropout) {
      nn::Matrix mask = nn::dropout_mask(embedded.rows(), embedded.cols(), hyper_.dropout_rate, *rng);
      embedded.array() *= mask.array();
      if (trace) trace->embed_mask = std::move(mask);
    }
    const nn::Matrix h = nn::bilstm_forward(lstm_, embedded, trace ? &trace->lstm : nullptr);
    const Eigen::Index hidden = hyper_.lstm_hidden_dim;
    const Eigen::Index steps = h.cols();
    features.resize(2 * hidden, 1);
    features.topRows(hidden) = h.block(0, steps - 1, hidden, 1);
    features.bottomRows(hidden) = h.block(hidden, 0, hidden, 1);
    if (trace) trace->steps = steps;
  } else {
    nn::Matrix x;
    for (std::size_t l = 0; l < 6; ++l) {
      nn::Matrix pre;
      if (l == 0) {
        pre = nn::onehot_conv1d_forward(conv_weights_[0], conv_biases_[0], input.ids, CharAlphabet::kSize,
                                        hyper_.conv_widths[0]);
      } else {
        nn::Matrix unfolded = nn::unfold(x, hyper_.conv_widths[l]);
        pre = nn::conv1d_forward(conv_weights_[l], conv_biases_[l], unfolded);
        if (trace) trace->unfolded.push_back(std::move(unfolded));
      }
      nn::Matrix act = nn::relu(pre);
      if (trace) {
        trace->conv_out.push_back(pre);
        trace->conv_cols.push_back(x.cols());
      }
      if (hyper_.pool_sizes[l] > 1) {
        std::vector<Eigen::Index> argmax;
        x = nn::max_pool_forward(act, hyper_.pool_sizes[l], trace ? &argmax : nullptr);
        if (trace) trace->pool_argmax.push_back(std::move(argmax));
      } else {
        x = std::move(act);
        if (trace) trace->pool_argmax.emplace_back();
      }
    }
    features = Eigen::Map<const nn::Matrix>(x.data(), x.size(), 1);
  }

  // Dropout on the encoder output, and between fully connected layers.
  nn::Matrix a = std::move(features);
  const std::size_t layers = fc_weights_.size();
  for (std::size_t i = 0; i < layers; ++i) {
    nn::Matrix mask;
    if (dropout) {
      mask = nn::dropout_mask(a.rows(), 1, hyper_.dropout_rate, *rng);
      a.array() *= mask.array();
    }
    nn::Matrix pre = nn::linear_forward(fc_weights_[i], fc_biases_[i], a);
    if (trace) {
      trace->fc_in.push_back(a);
      trace->fc_pre.push_back(pre);
      trace->fc_mask.push_back(std::move(mask));
    }
    a = (i + 1 < layers) ? nn::relu(pre) : std::move(pre);
  }
  if (trace) trace->input = input;
  return Eigen::Vector2d(a(0, 0), a(1, 0));
}

void ClassifierModel::backward(const Trace& trace, const Eigen::Vector2d& d_logits) {
  nn::Matrix d = d_logits;
  for (std::size_t i = fc_weights_.size(); i-- > 0;) {
    if (i + 1 < fc_weights_.size()) d = nn::relu_backward(trace.fc_pre[i], d);
    d = nn::linear_backward(fc_weights_[i], fc_biases_[i], trace.fc_in[i], d);
    if (trace.fc_mask[i].size() > 0) d.array() *= trace.fc_mask[i].array();
  }
  if (hyper_.variant == ClassifierVariant::kWordBiLstm) {
    const Eigen::Index hidden = hyper_.lstm_hidden_dim;
    nn::Matrix dh = nn::Matrix::Zero(2 * hidden, trace.steps);
    dh.block(0, trace.steps - 1, hidden, 1) = d.topRows(hidden);
    dh.block(hidden, 0, hidden, 1) += d.bottomRows(hidden);
    nn::Matrix dx = nn::bilstm_backward(lstm_, trace.lstm, dh);
    if (trace.embed_mask.size() > 0) dx.array() *= trace.embed_mask.array();
    nn::scatter_add_columns(embedding_, trace.input.ids, dx);
    return;
  }
  const Eigen::Index channels = hyper_.conv_channels[5];
  nn::Matrix dx = Eigen::Map<const nn::Matrix>(d.data(), channels, d.size() / channels);
  for (std::size_t l = 6; l-- > 0;) {
    const nn::Matrix& pre = trace.conv_out[l];
    nn::Matrix d_act = hyper_.pool_sizes[l] > 1 ? nn::max_pool_backward(dx, trace.pool_argmax[l], pre.cols()) : dx;
    const nn::Matrix d_pre = nn::relu_backward(pre, d_act);
    if (l == 0) {
      nn::onehot_conv1d_backward(conv_weights_[0], conv_biases_[0], trace.input.ids, CharAlphabet::kSize,
                                 hyper_.conv_widths[0], d_pre);
    } else {
      const nn::Matrix& unfolded = trace.unfolded[l - 1];
      const nn::Matrix d_unfolded = nn::conv1d_backward(conv_weights_[l], conv_biases_[l], unfolded, d_pre);
      dx = nn::fold_gradient(d_unfolded, hyper_.conv_channels[l - 1], trace.conv_cols[l], hyper_.conv_widths[l]);
    }
  }
}

Eigen::Vector2d ClassifierModel::probabilities(const Document& doc) const {
  const Eigen::Vector2d logits = forward(encode(doc), nullptr, nullptr);
  const double m = logits.maxCoeff();
  Eigen::Vector2d p = (logits.array() - m).exp();
  return p / p.sum();
}

double ClassifierModel::loss(const Document& doc, Label label, Rng* rng, bool accumulate) {
  Trace trace;
  const Eigen::Vector2d logits = forward(encode(doc), rng, accumulate ? &trace : nullptr);
  const int target = static_cast<int>(label);
  const std::vector<int> targets{target};
  nn::Matrix d_logits;
  const double value = nn::softmax_cross_entropy(logits, targets, accumulate ? &d_logits : nullptr);
  if (accumulate) backward(trace, Eigen::Vector2d(d_logits(0, 0), d_logits(1, 0)));
  return value;
}

std::size_t ClassifierModel::load_embeddings(const std::filesystem::path& path) {
  if (hyper_.variant != ClassifierVariant::kWordBiLstm) return 0;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::size_t loaded = 0;
  const int dim = hyper_.word_embedding_dim;
  for (std::string line; std::getline(in, line);) {
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token) || !word_vocab_.contains(token)) continue;
    std::vector<double> values;
    for (double v; fields >> v;) values.push_back(v);
    if (static_cast<int>(values.size()) != dim) continue;  // header line or other dimension
    const auto col = word_vocab_.lookup(token);
    for (int k = 0; k < dim; ++k) embedding_.value(k, col) = values[static_cast<std::size_t>(k)];
    ++loaded;
  }
  return loaded;
}

void ClassifierModel::save(const std::filesystem::path& path) const {
  Checkpoint ckpt;
  ckpt.kind = std::string(kCheckpointKind);
  ckpt.meta["variant"] = std::string(variant_name(hyper_.variant));
  ckpt.meta["seed"] = std::to_string(seed_);
  ckpt.meta["word_embedding_dim"] = std::to_string(hyper_.word_embedding_dim);
  ckpt.meta["lstm_hidden_dim"] = std::to_string(hyper_.lstm_hidden_dim);
  ckpt.meta["fc_hidden_dim"] = std::to_string(hyper_.fc_hidden_dim);
  ckpt.meta["max_tokens"] = std::to_string(hyper_.max_tokens);
  ckpt.meta["conv_channels"] = join_ints(hyper_.conv_channels);
  ckpt.meta["conv_widths"] = join_ints(hyper_.conv_widths);
  ckpt.meta["pool_sizes"] = join_ints(hyper_.pool_sizes);
  ckpt.meta["fc_dims"] = join_ints(hyper_.fc_dims);
  ckpt.meta["max_chars"] = std::to_string(hyper_.max_chars);
  ckpt.meta["dropout_rate"] = format_double(hyper_.dropout_rate);
  ckpt.meta["learning_rate"] = format_double(hyper_.learning_rate);
  ckpt.meta["max_epochs"] = std::to_string(hyper_.max_epochs);
  ckpt.meta["patience"] = std::to_string(hyper_.patience);
  ckpt.meta["batch_size"] = std::to_string(hyper_.batch_size);
  ckpt.lists["word_vocab"] = word_vocab_.items();
  auto& history = ckpt.lists["history"];
  for (const auto& r : history_) {
    history.push_back(std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," +
                      format_double(r.validation_loss));
  }
  for (const auto* p : parameters()) ckpt.add_tensor(p->name, p->value);
  ckpt.write(path);
}

ClassifierModel ClassifierModel::load(const std::filesystem::path& path) {
  const Checkpoint ckpt = Checkpoint::read(path);
  if (ckpt.kind != kCheckpointKind) {
    throw Error(ErrorCode::kMalformedCheckpoint, path.string() + " holds a '" + ckpt.kind + "', not a classifier");
  }
  ClassifierHyperparams h;
  std::vector<nn::EpochRecord> history;
  try {
    const auto variant = parse_variant(ckpt.get_meta("variant"));
    if (!variant) throw Error(ErrorCode::kMalformedCheckpoint, "unknown classifier variant");
    h.variant = *variant;
    h.word_embedding_dim = std::stoi(ckpt.get_meta("word_embedding_dim"));
    h.lstm_hidden_dim = std::stoi(ckpt.get_meta("lstm_hidden_dim"));
    h.fc_hidden_dim = std::stoi(ckpt.get_meta("fc_hidden_dim"));
    h.max_tokens = std::stoi(ckpt.get_meta("max_tokens"));
    h.conv_channels = split_ints<6>(ckpt.get_meta("conv_channels"));
    h.conv_widths = split_ints<6>(ckpt.get_meta("conv_widths"));
    h.pool_sizes = split_ints<6>(ckpt.get_meta("pool_sizes"));
    h.fc_dims = split_ints<3>(ckpt.get_meta("fc_dims"));
    h.max_chars = std::stoi(ckpt.get_meta("max_chars"));
    h.dropout_rate = std::stod(ckpt.get_meta("dropout_rate"));
    h.learning_rate = std::stod(ckpt.get_meta("learning_rate"));
    h.max_epochs = std::stoi(ckpt.get_meta("max_epochs"));
    h.patience = std::stoi(ckpt.get_meta("patience"));
    h.batch_size = std::stoi(ckpt.get_meta("batch_size"));
    for (const auto& line : ckpt.get_list("history")) {
      std::istringstream in(line);
      std::string a, b, c;
      std::getline(in, a, ',');
      std::getline(in, b, ',');
      std::getline(in, c, ',');
      history.push_back({std::stoi(a), std::stod(b), std::stod(c)});
    }
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::kMalformedCheckpoint, std::string("bad classifier metadata: ") + e.what());
  }
  ClassifierModel model(Vocabulary::from_items(ckpt.get_list("word_vocab")), h, std::stoull(ckpt.get_meta("seed")));
  for (auto* p : model.parameters()) p->value = ckpt.tensor(p->name, p->value.rows(), p->value.cols());
  model.set_history(std::move(history));
  return model;
}

ClassifierModel train_classifier(const Corpus& corpus, const ClassifierHyperparams& hyper, std::uint64_t seed) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot train on an empty corpus");
  if (!corpus.labeled()) throw Error(ErrorCode::kMissingLabel, "classifier training needs a labeled corpus");
  if (corpus.count_label(Label::kHate) == 0 || corpus.count_label(Label::kNonHate) == 0) {
    throw Error(ErrorCode::kSingleClassCorpus, "training corpus '" + corpus.name() + "' has a single class");
  }
  hyper.validate();

  auto [validation_idx, train_idx] = holdout_indices(corpus.size(), 0.1, derive_seed(seed, 11));
  if (validation_idx.empty()) validation_idx = train_idx;

  Vocabulary vocab;
  if (hyper.variant == ClassifierVariant::kWordBiLstm) {
    for (std::size_t i : train_idx) {
      for (const auto& token : corpus[i].tokens) vocab.add(token);
    }
  }
  ClassifierModel model(std::move(vocab), hyper, seed);
  if (!hyper.embeddings_path.empty()) model.load_embeddings(hyper.embeddings_path);

  const auto params = model.parameters();
  nn::Adam adam({.learning_rate = hyper.learning_rate});
  Rng rng(derive_seed(seed, 12));
  std::vector<std::size_t> order = train_idx;

  auto run_epoch = [&](int) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      for (std::size_t k = start; k < end; ++k) {
        const Document& doc = corpus[order[k]];
        total += model.loss(doc, *doc.label, &rng, true);
      }
      adam.step(params, 1.0 / static_cast<double>(end - start));
    }
    return total / static_cast<double>(order.size());
  };
  auto validation_loss = [&] {
    std::vector<double> losses(validation_idx.size());
    parallel_for(validation_idx.size(), [&](std::size_t k) {
      const Document& doc = corpus[validation_idx[k]];
      const Eigen::Vector2d p = model.probabilities(doc);
      losses[k] = -std::log(std::max(p(static_cast<int>(*doc.label)), 1e-300));
    });
    double total = 0.0;
    for (double l : losses) total += l;
    return total / static_cast<double>(losses.size());
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

ScoreSet predict(const ClassifierModel& model, const Corpus& corpus) {
  ScoreSet scores;
  scores.entries.resize(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) {
    scores.entries[i] = {corpus[i].id, model.probabilities(corpus[i])(1)};
  });
  return scores;
}

ScoreSet import_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  ScoreSet scores;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0) throw Error(ErrorCode::kMalformedScore, where + ": expected doc_id,probability");
    const std::string value = line.substr(comma + 1);
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw Error(ErrorCode::kMalformedScore, where + ": '" + value + "' is not a number");
    }
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw Error(ErrorCode::kOutOfRange, where + ": probability " + value + " outside [0, 1]");
    }
    scores.entries.emplace_back(line.substr(0, comma), p);
  }
  return scores;
}

void save_scores(const ScoreSet& scores, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& [id, p] : scores.entries) out << id << ',' << format_double(p) << '\n';
}

}  // namespace otgforge
