#include "otgforge/generator.hpp"

#include <fstream>

#include "json.hpp"
#include "otgforge/error.hpp"
#include "otgforge/text.hpp"

namespace otgforge {
namespace {

AugmentedExample impute_from(const Template& tmpl, const std::vector<std::string>& terms, Rng& rng) {
  AugmentedExample ex;
  ex.template_id = tmpl.doc_id;
  std::vector<std::string> tokens;
  tokens.reserve(tmpl.slotted_tokens.size());
  for (const auto& token : tmpl.slotted_tokens) {
    if (token == kSlotToken) {
      const auto& drawn = terms[uniform_below(rng, terms.size())];
      ex.slot_positions.push_back(tokens.size());
      ex.imputed.push_back(drawn);
      tokens.push_back(drawn);
    } else {
      tokens.push_back(token);
    }
  }
  ex.document.raw_text = join_tokens(tokens);
  ex.document.tokens = std::move(tokens);
  ex.document.domain = "augmented";
  return ex;
}

}  // namespace

AugmentedExample impute(const Template& tmpl, const Lexicon& lexicon, Rng& rng) {
  if (lexicon.empty()) throw Error(ErrorCode::kEmptyLexicon, "cannot impute from an empty lexicon");
  return impute_from(tmpl, lexicon.sorted_unigrams(), rng);
}

AugmentedCorpus generate(std::span<const Template> hate_templates, std::span<const Template> nonhate_templates,
                         const Lexicon& lexicon, std::uint64_t seed) {
  if (lexicon.empty()) throw Error(ErrorCode::kEmptyLexicon, "cannot generate from an empty lexicon");
  const std::vector<std::string> terms = lexicon.sorted_unigrams();
  Rng rng(seed);
  AugmentedCorpus out;
  std::vector<Document> docs;
  docs.reserve(hate_templates.size() + nonhate_templates.size());
  auto emit = [&](std::span<const Template> templates, Label label, std::string_view prefix) {
    std::size_t n = 0;
    for (const auto& tmpl : templates) {
      AugmentedExample ex = impute_from(tmpl, terms, rng);
      ex.document.id = std::string(prefix) + std::to_string(n++);
      ex.document.label = label;
      docs.push_back(ex.document);
      out.examples.push_back(std::move(ex));
    }
  };
  emit(hate_templates, Label::kHate, "aug-hate-");
  emit(nonhate_templates, Label::kNonHate, "aug-nonhate-");
  out.corpus = Corpus("augmented", std::move(docs), true);
  return out;
}

Corpus merge(const Corpus& source, const Corpus& augmented, std::string name) {
  if (!source.labeled() || !augmented.labeled()) {
    throw Error(ErrorCode::kMissingLabel, "merge requires two labeled corpora");
  }
  std::vector<Document> docs(source.begin(), source.end());
  docs.insert(docs.end(), augmented.begin(), augmented.end());
  return Corpus(std::move(name), std::move(docs), true);
}

void save_augmented_jsonl(const AugmentedCorpus& augmented, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& ex : augmented.examples) {
    nlohmann::ordered_json record;
    record["id"] = ex.document.id;
    record["text"] = ex.document.raw_text;
    record["label"] = static_cast<int>(*ex.document.label);
    record["template_id"] = ex.template_id;
    record["imputed"] = ex.imputed;
    out << record.dump() << '\n';
  }
}

}  // namespace otgforge
