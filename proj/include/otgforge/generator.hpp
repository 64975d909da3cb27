#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "otgforge/corpus.hpp"
#include "otgforge/lexicon.hpp"
#include "otgforge/random.hpp"
#include "otgforge/templating.hpp"

namespace otgforge {

struct AugmentedExample {
  Document document;
  std::string template_id;
  std::vector<std::string> imputed;
  std::vector<std::size_t> slot_positions;  // token indices that were filled
};

// Replaces every slot with an independent uniform draw (with replacement) from
// lexicon.sorted_unigrams(). The label is left unset. Throws kEmptyLexicon.
AugmentedExample impute(const Template& tmpl, const Lexicon& lexicon, Rng& rng);

struct AugmentedCorpus {
  Corpus corpus;  // domain "augmented", labeled
  std::vector<AugmentedExample> examples;
};

// Hate templates first (label Hate, ids aug-hate-<n>), then non-hate templates
// (label NonHate, ids aug-nonhate-<n>), each in input order, all drawn from one
// generator seeded with `seed`. Throws kEmptyLexicon.
AugmentedCorpus generate(std::span<const Template> hate_templates,
                         std::span<const Template> nonhate_templates, const Lexicon& lexicon,
                         std::uint64_t seed);

// Source then augmented documents. Throws kDuplicateId on id overlap.
Corpus merge(const Corpus& source, const Corpus& augmented, std::string name = "merged");

// Standard corpus JSONL plus template_id and imputed.
void save_augmented_jsonl(const AugmentedCorpus& augmented, const std::filesystem::path& path);

}  // namespace otgforge
