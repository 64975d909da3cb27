#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "otgforge/lexicon.hpp"

namespace otgforge {

// A context carrier: the sentence with each maximal OTG run replaced by the
// reserved slot token.
struct Template {
  std::string doc_id;
  std::vector<std::string> slotted_tokens;
  int slot_count = 0;
  // The replaced runs, in order. Empty for weak-pool templates.
  std::vector<std::vector<std::string>> removed_otg;

  std::string slotted_text() const;
};

Template templatize(const TaggedSentence& tagged);

// Inverse of templatize for templates that kept their removed runs.
std::vector<std::string> splice(const Template& tmpl);

// Unigrams = every token tagged OTG anywhere; phrases empty. Throws
// kEmptyTargetLexicon when nothing was tagged.
Lexicon extract_target_lexicon(std::span<const TaggedSentence> tagged_target);

// Templatizes every sentence, drops the removed OTG values and keeps the first
// occurrence of each distinct slotted token sequence.
std::vector<Template> build_weak_pool(std::span<const TaggedSentence> tagged_weak);

// JSONL: {doc_id, slotted_text, slot_count[, removed_otg]}.
void save_templates_jsonl(std::span<const Template> templates, const std::filesystem::path& path);
std::vector<Template> load_templates_jsonl(const std::filesystem::path& path);

}  // namespace otgforge
