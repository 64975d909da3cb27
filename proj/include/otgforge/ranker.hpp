#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "otgforge/templating.hpp"

namespace otgforge {

// Sparse vector as (term index, weight) pairs sorted by index.
using SparseVector = std::vector<std::pair<std::int32_t, double>>;

struct TfIdfModel {
  std::unordered_map<std::string, std::int32_t> vocabulary;
  std::vector<std::string> terms;           // index -> token
  std::vector<std::int64_t> document_frequency;
  std::vector<double> idf;                  // ln((1 + n) / (1 + df)) + 1
  std::int64_t n_docs = 0;

  std::int32_t index_of(const std::string& token) const;  // -1 when absent
};

// Fits over all given templates; the slot token is never a term. Throws
// kEmptyInput on an empty list.
TfIdfModel fit_tfidf(std::span<const Template> templates);
// Convenience overload fitting over the union of both lists.
TfIdfModel fit_tfidf(std::span<const Template> weak, std::span<const Template> target);

// Raw count x idf for in-vocabulary tokens, L2-normalized. All-OOV templates
// give the empty (zero) vector.
SparseVector vectorize(const TfIdfModel& model, const Template& tmpl);

double cosine(const SparseVector& a, const SparseVector& b);

struct ScoredTemplate {
  Template tmpl;
  double score = 0.0;
};

// score(w) = sum over targets t of cosine(vec(w), vec(t)). Because every
// non-zero vector is unit length this equals vec(w) . sum_t vec(t); the target
// sum is accumulated once per term and each weak score walks only its own
// non-zeros in ascending term order. Output order matches `weak`.
std::vector<ScoredTemplate> score_pool(std::span<const Template> weak,
                                       std::span<const Template> target, const TfIdfModel& model);

inline constexpr int kUnboundedSlots = std::numeric_limits<int>::max();

// Keeps min_slots <= slot_count <= max_slots, sorts by score descending then
// doc_id ascending, and returns the first min(k, available).
std::vector<Template> select_top(std::span<const ScoredTemplate> scored, std::size_t k,
                                 int min_slots, int max_slots);

// Sorts by score descending, doc_id ascending.
void sort_by_score(std::vector<ScoredTemplate>& scored);

// JSONL: {doc_id, slotted_text, slot_count, score}, sorted as above.
void save_scored_jsonl(std::vector<ScoredTemplate> scored, const std::filesystem::path& path);
std::vector<ScoredTemplate> load_scored_jsonl(const std::filesystem::path& path);

}  // namespace otgforge
