#include "otgforge/templating.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "otgforge/error.hpp"
#include "otgforge/text.hpp"

namespace otgforge {

std::string Template::slotted_text() const { return join_tokens(slotted_tokens); }

Template templatize(const TaggedSentence& tagged) {
  Template tmpl;
  tmpl.doc_id = tagged.doc_id;
  const std::size_t n = tagged.tokens.size();
  for (std::size_t i = 0; i < n;) {
    if (tagged.tags[i] != Tag::kOtg) {
      tmpl.slotted_tokens.push_back(tagged.tokens[i]);
      ++i;
      continue;
    }
    std::vector<std::string> run;
    while (i < n && tagged.tags[i] == Tag::kOtg) run.push_back(tagged.tokens[i++]);
    tmpl.slotted_tokens.emplace_back(kSlotToken);
    tmpl.removed_otg.push_back(std::move(run));
    ++tmpl.slot_count;
  }
  return tmpl;
}

std::vector<std::string> splice(const Template& tmpl) {
  std::vector<std::string> tokens;
  std::size_t run = 0;
  for (const auto& token : tmpl.slotted_tokens) {
    if (token == kSlotToken && run < tmpl.removed_otg.size()) {
      const auto& removed = tmpl.removed_otg[run++];
      tokens.insert(tokens.end(), removed.begin(), removed.end());
    } else {
      tokens.push_back(token);
    }
  }
  return tokens;
}

Lexicon extract_target_lexicon(std::span<const TaggedSentence> tagged_target) {
  Lexicon lexicon;
  lexicon.source_name = "target";
  for (const auto& s : tagged_target) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (s.tags[i] == Tag::kOtg) lexicon.unigrams.insert(s.tokens[i]);
    }
  }
  if (lexicon.unigrams.empty()) {
    throw Error(ErrorCode::kEmptyTargetLexicon, "the tagger found no OTG token in the target sample");
  }
  return lexicon;
}

std::vector<Template> build_weak_pool(std::span<const TaggedSentence> tagged_weak) {
  std::vector<Template> pool;
  std::set<std::vector<std::string>> seen;
  for (const auto& s : tagged_weak) {
    Template tmpl = templatize(s);
    tmpl.removed_otg.clear();
    if (seen.insert(tmpl.slotted_tokens).second) pool.push_back(std::move(tmpl));
  }
  return pool;
}

void save_templates_jsonl(std::span<const Template> templates, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& t : templates) {
    nlohmann::ordered_json record;
    record["doc_id"] = t.doc_id;
    record["slotted_text"] = t.slotted_text();
    record["slot_count"] = t.slot_count;
    if (!t.removed_otg.empty()) record["removed_otg"] = t.removed_otg;
    out << record.dump() << '\n';
  }
}

std::vector<Template> load_templates_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<Template> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      Template t;
      t.doc_id = record.at("doc_id").get<std::string>();
      std::istringstream words(record.at("slotted_text").get<std::string>());
      for (std::string w; words >> w;) {
        if (w == kSlotToken) ++t.slot_count;
        t.slotted_tokens.push_back(std::move(w));
      }
      if (record.contains("removed_otg")) {
        t.removed_otg = record["removed_otg"].get<std::vector<std::vector<std::string>>>();
      }
      if (t.slot_count != record.at("slot_count").get<int>()) {
        throw Error(ErrorCode::kMalformedRecord,
                    path.string() + ":" + std::to_string(line_no) + ": slot_count disagrees with slotted_text");
      }
      out.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace otgforge
