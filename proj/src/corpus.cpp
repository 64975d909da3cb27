#include "otgforge/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "otgforge/error.hpp"
#include "otgforge/random.hpp"
#include "otgforge/text.hpp"

namespace otgforge {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string record_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  return path.string() + ":" + std::to_string(line) + ": " + what;
}

std::optional<Label> json_label(const nlohmann::json& value) {
  if (value.is_number_integer()) {
    const auto v = value.get<long long>();
    if (v == 0) return Label::kNonHate;
    if (v == 1) return Label::kHate;
    return std::nullopt;
  }
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (v == 0.0) return Label::kNonHate;
    if (v == 1.0) return Label::kHate;
    return std::nullopt;
  }
  if (value.is_boolean()) return value.get<bool>() ? Label::kHate : Label::kNonHate;
  if (value.is_string()) return parse_label(value.get<std::string>());
  return std::nullopt;
}

}  // namespace

std::optional<Label> parse_label(std::string_view value) {
  const std::string v = lowercase(value);
  if (v == "1" || v == "hate") return Label::kHate;
  if (v == "0" || v == "non-hate") return Label::kNonHate;
  return std::nullopt;
}

Document Document::make(std::string id, std::string raw_text, std::optional<Label> label,
                        std::string domain) {
  Document doc;
  doc.id = std::move(id);
  doc.raw_text = std::move(raw_text);
  doc.tokens = tokenize(doc.raw_text);
  doc.label = label;
  doc.domain = std::move(domain);
  return doc;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) {
  const std::string v = lowercase(name);
  if (v == "jsonl") return CorpusFormat::kJsonl;
  if (v == "csv") return CorpusFormat::kCsv;
  return std::nullopt;
}

Corpus::Corpus(std::string name, std::vector<Document> documents, bool labeled)
    : name_(std::move(name)), documents_(std::move(documents)), labeled_(labeled) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(documents_.size());
  for (const auto& doc : documents_) {
    if (!seen.insert(doc.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate document id '" + doc.id + "' in " + name_);
    }
    if (labeled_ && !doc.label) {
      throw Error(ErrorCode::kMissingLabel, "document '" + doc.id + "' has no label");
    }
  }
}

Corpus Corpus::filter_label(Label label, std::string name) const {
  std::vector<Document> kept;
  for (const auto& doc : documents_) {
    if (doc.label == label) kept.push_back(doc);
  }
  return Corpus(std::move(name), std::move(kept), labeled_);
}

std::size_t Corpus::count_label(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      documents_.begin(), documents_.end(), [&](const Document& d) { return d.label == label; }));
}

std::vector<std::vector<std::string>> parse_csv(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  const std::size_t n = content.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::kMalformedRecord, "unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, bool labeled,
                   std::string domain) {
  const std::string content = read_file(path);
  std::vector<Document> docs;

  auto add = [&](std::size_t line, std::string id, std::string text, std::optional<Label> label,
                 bool has_label) {
    if (has_label && !label) {
      throw Error(ErrorCode::kMalformedRecord, record_error(path, line, "unrecognized label"));
    }
    if (labeled && !has_label) {
      throw Error(ErrorCode::kMissingLabel, record_error(path, line, "record '" + id + "' has no label"));
    }
    docs.push_back(Document::make(std::move(id), std::move(text), labeled ? label : std::nullopt, domain));
  };

  if (format == CorpusFormat::kJsonl) {
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json record;
      try {
        record = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::kMalformedRecord, record_error(path, line_no, e.what()));
      }
      if (!record.is_object() || !record.contains("id") || !record.contains("text") ||
          !record["text"].is_string() || !(record["id"].is_string() || record["id"].is_number_integer())) {
        throw Error(ErrorCode::kMalformedRecord,
                    record_error(path, line_no, "expected an object with string id and text"));
      }
      std::string id = record["id"].is_string() ? record["id"].get<std::string>()
                                                : std::to_string(record["id"].get<long long>());
      const bool has_label = record.contains("label") && !record["label"].is_null();
      std::optional<Label> label = has_label ? json_label(record["label"]) : std::nullopt;
      add(line_no, std::move(id), record["text"].get<std::string>(), label, has_label);
    }
  } else {
    std::vector<std::vector<std::string>> rows;
    try {
      rows = parse_csv(content);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedRecord, path.string() + ": " + e.what());
    }
    if (rows.empty()) throw Error(ErrorCode::kMalformedRecord, record_error(path, 1, "missing header"));
    const auto& header = rows.front();
    long id_col = -1, text_col = -1, label_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string name = lowercase(header[c]);
      if (name == "id") id_col = static_cast<long>(c);
      else if (name == "text") text_col = static_cast<long>(c);
      else if (name == "label") label_col = static_cast<long>(c);
    }
    if (id_col < 0 || text_col < 0) {
      throw Error(ErrorCode::kMalformedRecord, record_error(path, 1, "header must contain id,text"));
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      const std::size_t line_no = r + 1;
      if (row.size() != header.size()) {
        throw Error(ErrorCode::kMalformedRecord,
                    record_error(path, line_no, "expected " + std::to_string(header.size()) + " fields"));
      }
      const bool has_label = label_col >= 0 && !row[static_cast<std::size_t>(label_col)].empty();
      std::optional<Label> label =
          has_label ? parse_label(row[static_cast<std::size_t>(label_col)]) : std::nullopt;
      add(line_no, row[static_cast<std::size_t>(id_col)], row[static_cast<std::size_t>(text_col)],
          label, has_label);
    }
  }
  return Corpus(path.stem().string(), std::move(docs), labeled);
}

void save_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& doc : corpus) {
    nlohmann::ordered_json record;
    record["id"] = doc.id;
    record["text"] = doc.raw_text;
    if (doc.label) record["label"] = static_cast<int>(*doc.label);
    out << record.dump() << '\n';
  }
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_indices(
    std::size_t n, double fraction, std::uint64_t seed) {
  const auto order = seeded_permutation(n, seed);
  const auto take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  std::vector<std::size_t> holdout(order.begin(), order.begin() + static_cast<long>(std::min(take, n)));
  std::vector<std::size_t> rest(order.begin() + static_cast<long>(std::min(take, n)), order.end());
  std::sort(holdout.begin(), holdout.end());
  std::sort(rest.begin(), rest.end());
  return {std::move(holdout), std::move(rest)};
}

UnlabeledSplit sample_unlabeled(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kConfig, "sample fraction must lie in [0, 1]");
  }
  const auto [sample, rest] = holdout_indices(corpus.size(), fraction, seed);
  std::vector<Document> unlabeled;
  unlabeled.reserve(sample.size());
  for (std::size_t i : sample) {
    Document doc = corpus[i];
    doc.label.reset();
    unlabeled.push_back(std::move(doc));
  }
  std::vector<Document> test;
  test.reserve(rest.size());
  for (std::size_t i : rest) test.push_back(corpus[i]);
  return {Corpus(corpus.name() + "-unlabeled", std::move(unlabeled), false),
          Corpus(corpus.name() + "-test", std::move(test), corpus.labeled())};
}

}  // namespace otgforge
