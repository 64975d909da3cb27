#include "otgforge/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "otgforge/error.hpp"

namespace otgforge {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kConfig, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

long long to_int(std::string_view key, std::string_view value) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return v;
}

int to_int32(std::string_view key, std::string_view value) { return static_cast<int>(to_int(key, value)); }

std::size_t to_count(std::string_view key, std::string_view value) {
  const long long v = to_int(key, value);
  if (v < 0) bad_value(key, value);
  return static_cast<std::size_t>(v);
}

double to_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(value), &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

template <std::size_t N>
std::array<int, N> to_int_array(std::string_view key, std::string_view value) {
  std::string v = trim(value);
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::array<int, N> out{};
  std::istringstream in(v);
  std::string item;
  std::size_t i = 0;
  while (std::getline(in, item, ',')) {
    if (i >= N) bad_value(key, value);
    out[i++] = to_int32(key, trim(item));
  }
  if (i != N) bad_value(key, value);
  return out;
}

template <std::size_t N>
std::string join(const std::array<int, N>& values) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value) {
  std::filesystem::path p{std::string(value)};
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

CorpusFormat to_format(std::string_view key, std::string_view value) {
  const auto f = parse_corpus_format(value);
  if (!f) bad_value(key, value);
  return *f;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_name(CorpusFormat f) { return f == CorpusFormat::kJsonl ? "jsonl" : "csv"; }

std::string path_text(const std::filesystem::path& p) {
  if (p.empty()) return "";
  return std::filesystem::weakly_canonical(std::filesystem::absolute(p)).string();
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::string v = trim(text);
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = trim(v.substr(1, v.size() - 2));
  std::vector<std::uint64_t> seeds;
  if (const auto dots = v.find(".."); dots != std::string::npos) {
    const long long a = to_int("seeds", trim(v.substr(0, dots)));
    const long long b = to_int("seeds", trim(v.substr(dots + 2)));
    if (a < 0 || b < a) bad_value("seeds", text);
    for (long long s = a; s <= b; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    return seeds;
  }
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    const long long s = to_int("seeds", trim(item));
    if (s < 0) bad_value("seeds", text);
    seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (seeds.empty()) bad_value("seeds", text);
  return seeds;
}

void set_config_value(PipelineConfig& c, std::string_view key, std::string_view raw,
                      const std::filesystem::path& base_dir) {
  const std::string value = unquote(trim(raw));
  auto& t = c.tagger;
  auto& k = c.classifier;
  if (key == "data.source") c.source_path = resolve(base_dir, value);
  else if (key == "data.source_format") c.source_format = to_format(key, value);
  else if (key == "data.target") c.target_path = resolve(base_dir, value);
  else if (key == "data.target_format") c.target_format = to_format(key, value);
  else if (key == "data.weak") c.weak_path = resolve(base_dir, value);
  else if (key == "data.weak_format") c.weak_format = to_format(key, value);
  else if (key == "data.lexicon") c.lexicon_path = resolve(base_dir, value);
  else if (key == "sampling.target_fraction") c.target_sample_fraction = to_double(key, value);
  else if (key == "sampling.seed") c.sample_seed = static_cast<std::uint64_t>(to_count(key, value));
  else if (key == "augment.k_hate") c.k_hate = to_count(key, value);
  else if (key == "augment.k_nonhate") c.k_nonhate = to_count(key, value);
  else if (key == "augment.hate_min_slots") c.hate_min_slots = to_int32(key, value);
  else if (key == "augment.nonhate_max_slots") c.nonhate_max_slots = to_int32(key, value);
  else if (key == "augment.weak_limit") c.weak_limit = to_count(key, value);
  else if (key == "tagger.char_embedding_dim") t.char_embedding_dim = to_int32(key, value);
  else if (key == "tagger.char_conv_filters") t.char_conv_filters = to_int32(key, value);
  else if (key == "tagger.char_conv_width") t.char_conv_width = to_int32(key, value);
  else if (key == "tagger.word_embedding_dim") t.word_embedding_dim = to_int32(key, value);
  else if (key == "tagger.lstm_hidden_dim") t.lstm_hidden_dim = to_int32(key, value);
  else if (key == "tagger.dropout_rate") t.dropout_rate = to_double(key, value);
  else if (key == "tagger.learning_rate") t.learning_rate = to_double(key, value);
  else if (key == "tagger.max_epochs") t.max_epochs = to_int32(key, value);
  else if (key == "tagger.patience") t.patience = to_int32(key, value);
  else if (key == "tagger.batch_size") t.batch_size = to_int32(key, value);
  else if (key == "tagger.unk_replace_rate") t.unk_replace_rate = to_double(key, value);
  else if (key == "classifier.variant") {
    const auto v = parse_variant(value);
    if (!v) bad_value(key, value);
    k = ClassifierHyperparams::defaults(*v);
  }
  else if (key == "classifier.word_embedding_dim") k.word_embedding_dim = to_int32(key, value);
  else if (key == "classifier.lstm_hidden_dim") k.lstm_hidden_dim = to_int32(key, value);
  else if (key == "classifier.fc_hidden_dim") k.fc_hidden_dim = to_int32(key, value);
  else if (key == "classifier.max_tokens") k.max_tokens = to_int32(key, value);
  else if (key == "classifier.embeddings") k.embeddings_path = resolve(base_dir, value).string();
  else if (key == "classifier.conv_channels") k.conv_channels = to_int_array<6>(key, value);
  else if (key == "classifier.conv_widths") k.conv_widths = to_int_array<6>(key, value);
  else if (key == "classifier.pool_sizes") k.pool_sizes = to_int_array<6>(key, value);
  else if (key == "classifier.fc_dims") k.fc_dims = to_int_array<3>(key, value);
  else if (key == "classifier.max_chars") k.max_chars = to_int32(key, value);
  else if (key == "classifier.dropout_rate") k.dropout_rate = to_double(key, value);
  else if (key == "classifier.learning_rate") k.learning_rate = to_double(key, value);
  else if (key == "classifier.max_epochs") k.max_epochs = to_int32(key, value);
  else if (key == "classifier.patience") k.patience = to_int32(key, value);
  else if (key == "classifier.batch_size") k.batch_size = to_int32(key, value);
  else if (key == "experiment.seeds") c.seeds = parse_seed_list(value);
  else if (key == "experiment.threshold") c.threshold = to_double(key, value);
  else if (key == "output.dir") c.output_dir = resolve(base_dir, value);
  else throw Error(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in{std::string(text)};
  std::string section;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    entries.emplace_back(std::move(key), trim(std::string_view(line).substr(eq + 1)));
  }
  PipelineConfig config;
  // The variant resets classifier defaults, so it applies first.
  for (const auto& [key, value] : entries) {
    if (key == "classifier.variant") set_config_value(config, key, value, base_dir);
  }
  for (const auto& [key, value] : entries) {
    if (key != "classifier.variant") set_config_value(config, key, value, base_dir);
  }
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

void PipelineConfig::apply_desk_scale() {
  k_hate = 200;
  k_nonhate = 200;
  weak_limit = 5000;
}

void PipelineConfig::validate() const {
  if (!(target_sample_fraction >= 0.0 && target_sample_fraction <= 1.0)) {
    throw Error(ErrorCode::kConfig, "sampling.target_fraction must lie in [0, 1]");
  }
  if (seeds.empty()) throw Error(ErrorCode::kConfig, "experiment.seeds must not be empty");
  if (hate_min_slots < 0 || nonhate_max_slots < 0) throw Error(ErrorCode::kConfig, "slot bounds must be >= 0");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorCode::kConfig, "experiment.threshold must lie in [0, 1]");
  tagger.validate();
  classifier.validate();
}

std::string PipelineConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["data.source"] = path_text(source_path);
  kv["data.source_format"] = format_name(source_format);
  kv["data.target"] = path_text(target_path);
  kv["data.target_format"] = format_name(target_format);
  kv["data.weak"] = path_text(weak_path);
  kv["data.weak_format"] = format_name(weak_format);
  kv["data.lexicon"] = path_text(lexicon_path);
  kv["sampling.target_fraction"] = num(target_sample_fraction);
  kv["sampling.seed"] = std::to_string(sample_seed);
  kv["augment.k_hate"] = std::to_string(k_hate);
  kv["augment.k_nonhate"] = std::to_string(k_nonhate);
  kv["augment.hate_min_slots"] = std::to_string(hate_min_slots);
  kv["augment.nonhate_max_slots"] = std::to_string(nonhate_max_slots);
  kv["augment.weak_limit"] = std::to_string(weak_limit);
  kv["tagger.char_embedding_dim"] = std::to_string(tagger.char_embedding_dim);
  kv["tagger.char_conv_filters"] = std::to_string(tagger.char_conv_filters);
  kv["tagger.char_conv_width"] = std::to_string(tagger.char_conv_width);
  kv["tagger.word_embedding_dim"] = std::to_string(tagger.word_embedding_dim);
  kv["tagger.lstm_hidden_dim"] = std::to_string(tagger.lstm_hidden_dim);
  kv["tagger.dropout_rate"] = num(tagger.dropout_rate);
  kv["tagger.learning_rate"] = num(tagger.learning_rate);
  kv["tagger.max_epochs"] = std::to_string(tagger.max_epochs);
  kv["tagger.patience"] = std::to_string(tagger.patience);
  kv["tagger.batch_size"] = std::to_string(tagger.batch_size);
  kv["tagger.unk_replace_rate"] = num(tagger.unk_replace_rate);
  const auto& k = classifier;
  kv["classifier.variant"] = std::string(variant_name(k.variant));
  kv["classifier.dropout_rate"] = num(k.dropout_rate);
  kv["classifier.learning_rate"] = num(k.learning_rate);
  kv["classifier.max_epochs"] = std::to_string(k.max_epochs);
  kv["classifier.patience"] = std::to_string(k.patience);
  kv["classifier.batch_size"] = std::to_string(k.batch_size);
  if (k.variant == ClassifierVariant::kWordBiLstm) {
    kv["classifier.word_embedding_dim"] = std::to_string(k.word_embedding_dim);
    kv["classifier.lstm_hidden_dim"] = std::to_string(k.lstm_hidden_dim);
    kv["classifier.fc_hidden_dim"] = std::to_string(k.fc_hidden_dim);
    kv["classifier.max_tokens"] = std::to_string(k.max_tokens);
    kv["classifier.embeddings"] = path_text(k.embeddings_path);
  } else {
    kv["classifier.conv_channels"] = join(k.conv_channels);
    kv["classifier.conv_widths"] = join(k.conv_widths);
    kv["classifier.pool_sizes"] = join(k.pool_sizes);
    kv["classifier.fc_dims"] = join(k.fc_dims);
    kv["classifier.max_chars"] = std::to_string(k.max_chars);
  }
  std::string seed_text;
  for (std::size_t i = 0; i < seeds.size(); ++i) seed_text += (i ? "," : "") + std::to_string(seeds[i]);
  kv["experiment.seeds"] = seed_text;
  kv["experiment.threshold"] = num(threshold);

  std::string out;
  for (const auto& [key, value] : kv) out += key + " = " + value + "\n";
  return out;
}

std::string PipelineConfig::hash() const { return sha256_hex(canonical()); }

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

}  // namespace otgforge
