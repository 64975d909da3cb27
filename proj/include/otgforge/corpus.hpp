#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace otgforge {

enum class Label : int { kNonHate = 0, kHate = 1 };

// Accepts 0/1 and "non-hate"/"hate" (case-insensitive).
std::optional<Label> parse_label(std::string_view value);

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;
  std::optional<Label> label;
  std::string domain;

  // Builds a document with tokens = tokenize(raw_text).
  static Document make(std::string id, std::string raw_text, std::optional<Label> label,
                       std::string domain);
};

enum class CorpusFormat { kJsonl, kCsv };

std::optional<CorpusFormat> parse_corpus_format(std::string_view name);

class Corpus {
 public:
  Corpus() = default;
  // Throws kDuplicateId on repeated ids and kMissingLabel when `labeled` is set
  // and a document has no label.
  Corpus(std::string name, std::vector<Document> documents, bool labeled);

  const std::string& name() const { return name_; }
  const std::vector<Document>& documents() const { return documents_; }
  bool labeled() const { return labeled_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

  // Documents whose label is `label`, in order.
  Corpus filter_label(Label label, std::string name) const;
  std::size_t count_label(Label label) const;

 private:
  std::string name_;
  std::vector<Document> documents_;
  bool labeled_ = false;
};

// Loads one document per record. JSONL records carry id, text and an optional
// label; CSV has a header row id,text[,label]. Labels are validated against
// the accepted vocabularies even when `labeled` is false.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, bool labeled,
                   std::string domain = "source");

// Parses one RFC-4180 CSV file into rows of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view content);

// Writes {id, text, label?} JSON lines, in order.
void save_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

struct UnlabeledSplit {
  Corpus unlabeled;
  Corpus test;
};

// Partitions `corpus` by the seeded permutation: the first
// floor(fraction * n) permuted indices go to `unlabeled` (labels stripped),
// the rest to `test`. Both outputs keep the input's document order.
UnlabeledSplit sample_unlabeled(const Corpus& corpus, double fraction, std::uint64_t seed);

// Seeded holdout split used for validation sets: floor(fraction * n) permuted
// indices become the holdout; order within each part follows the input.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_indices(
    std::size_t n, double fraction, std::uint64_t seed);

}  // namespace otgforge
