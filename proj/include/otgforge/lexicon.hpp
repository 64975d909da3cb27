#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otgforge/corpus.hpp"

namespace otgforge {

enum class Tag : std::uint8_t { kO = 0, kOtg = 1 };

std::string_view tag_name(Tag tag);
Tag parse_tag(std::string_view name);

// Every token of every phrase is also a unigram.
struct Lexicon {
  std::set<std::string> unigrams;
  std::set<std::vector<std::string>> phrases;
  std::string source_name;

  bool empty() const { return unigrams.empty(); }
  // Unigrams in sorted order; the order used for uniform draws.
  std::vector<std::string> sorted_unigrams() const;
};

struct TaggedSentence {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<Tag> tags;

  std::size_t otg_count() const;
};

// Tokenizes each entry; multi-token entries become phrases and all their
// tokens are merged into the unigram set. Blank and '#' lines are skipped.
Lexicon consolidate_lexicon(std::span<const std::string> entries, std::string source_name);
Lexicon load_and_consolidate(const std::filesystem::path& path);
void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path);

// OTG tags for one token list: a token is OTG when it is a unigram or lies
// inside a contiguous phrase occurrence.
std::vector<Tag> match_lexicon(std::span<const std::string> tokens, const Lexicon& lexicon);

// One TaggedSentence per hate document, in order. Throws kNonHateInput if any
// document is not hate-labeled.
std::vector<TaggedSentence> weak_label(const Corpus& hate_docs, const Lexicon& lexicon);

void save_tagged_jsonl(std::span<const TaggedSentence> sentences, const std::filesystem::path& path);
std::vector<TaggedSentence> load_tagged_jsonl(const std::filesystem::path& path);

}  // namespace otgforge
