#include "otgforge/lexicon.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "otgforge/error.hpp"
#include "otgforge/text.hpp"

namespace otgforge {

std::string_view tag_name(Tag tag) { return tag == Tag::kOtg ? "OTG" : "O"; }

Tag parse_tag(std::string_view name) {
  if (name == "OTG") return Tag::kOtg;
  if (name == "O") return Tag::kO;
  throw Error(ErrorCode::kMalformedRecord, "unknown tag '" + std::string(name) + "'");
}

std::vector<std::string> Lexicon::sorted_unigrams() const {
  return {unigrams.begin(), unigrams.end()};
}

std::size_t TaggedSentence::otg_count() const {
  std::size_t n = 0;
  for (Tag t : tags) n += t == Tag::kOtg;
  return n;
}

Lexicon consolidate_lexicon(std::span<const std::string> entries, std::string source_name) {
  Lexicon lexicon;
  lexicon.source_name = std::move(source_name);
  for (const auto& entry : entries) {
    const auto first = entry.find_first_not_of(" \t\r");
    if (first == std::string::npos || entry[first] == '#') continue;
    auto tokens = tokenize(entry);
    if (tokens.empty()) continue;
    for (const auto& t : tokens) lexicon.unigrams.insert(t);
    if (tokens.size() >= 2) lexicon.phrases.insert(std::move(tokens));
  }
  if (lexicon.unigrams.empty()) {
    throw Error(ErrorCode::kEmptyLexicon, "lexicon '" + lexicon.source_name + "' has no entries");
  }
  return lexicon;
}

Lexicon load_and_consolidate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::string> entries;
  for (std::string line; std::getline(in, line);) entries.push_back(std::move(line));
  return consolidate_lexicon(entries, path.filename().string());
}

void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& u : lexicon.unigrams) out << u << '\n';
  for (const auto& p : lexicon.phrases) out << join_tokens(p) << '\n';
}

std::vector<Tag> match_lexicon(std::span<const std::string> tokens, const Lexicon& lexicon) {
  std::vector<Tag> tags(tokens.size(), Tag::kO);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lexicon.unigrams.contains(tokens[i])) tags[i] = Tag::kOtg;
  }
  if (lexicon.phrases.empty()) return tags;

  std::map<std::string_view, std::vector<const std::vector<std::string>*>> by_first;
  for (const auto& phrase : lexicon.phrases) by_first[phrase.front()].push_back(&phrase);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto it = by_first.find(tokens[i]);
    if (it == by_first.end()) continue;
    for (const auto* phrase : it->second) {
      if (i + phrase->size() > tokens.size()) continue;
      if (std::equal(phrase->begin(), phrase->end(), tokens.begin() + static_cast<long>(i))) {
        for (std::size_t k = 0; k < phrase->size(); ++k) tags[i + k] = Tag::kOtg;
      }
    }
  }
  return tags;
}

std::vector<TaggedSentence> weak_label(const Corpus& hate_docs, const Lexicon& lexicon) {
  std::vector<TaggedSentence> out;
  out.reserve(hate_docs.size());
  for (const auto& doc : hate_docs) {
    if (doc.label != Label::kHate) {
      throw Error(ErrorCode::kNonHateInput, "document '" + doc.id + "' is not hate-labeled");
    }
    out.push_back({doc.id, doc.tokens, match_lexicon(doc.tokens, lexicon)});
  }
  return out;
}

void save_tagged_jsonl(std::span<const TaggedSentence> sentences, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& s : sentences) {
    nlohmann::ordered_json record;
    record["doc_id"] = s.doc_id;
    record["tokens"] = s.tokens;
    auto& tags = record["tags"] = nlohmann::ordered_json::array();
    for (Tag t : s.tags) tags.push_back(tag_name(t));
    out << record.dump() << '\n';
  }
}

std::vector<TaggedSentence> load_tagged_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<TaggedSentence> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      TaggedSentence s;
      s.doc_id = record.at("doc_id").get<std::string>();
      s.tokens = record.at("tokens").get<std::vector<std::string>>();
      for (const auto& t : record.at("tags")) s.tags.push_back(parse_tag(t.get<std::string>()));
      if (s.tags.size() != s.tokens.size()) throw Error(ErrorCode::kMalformedRecord, "tag count mismatch");
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace otgforge
