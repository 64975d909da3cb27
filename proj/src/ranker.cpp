#include "otgforge/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "otgforge/error.hpp"
#include "otgforge/parallel.hpp"
#include "otgforge/text.hpp"

namespace otgforge {

std::int32_t TfIdfModel::index_of(const std::string& token) const {
  const auto it = vocabulary.find(token);
  return it == vocabulary.end() ? -1 : it->second;
}

TfIdfModel fit_tfidf(std::span<const Template> templates) {
  if (templates.empty()) throw Error(ErrorCode::kEmptyInput, "cannot fit tf-idf on zero templates");
  TfIdfModel model;
  model.n_docs = static_cast<std::int64_t>(templates.size());
  std::vector<std::int32_t> seen_in_doc;
  for (const auto& t : templates) {
    seen_in_doc.clear();
    for (const auto& token : t.slotted_tokens) {
      if (token == kSlotToken) continue;
      auto [it, inserted] = model.vocabulary.try_emplace(token, static_cast<std::int32_t>(model.terms.size()));
      if (inserted) {
        model.terms.push_back(token);
        model.document_frequency.push_back(0);
      }
      seen_in_doc.push_back(it->second);
    }
    std::sort(seen_in_doc.begin(), seen_in_doc.end());
    seen_in_doc.erase(std::unique(seen_in_doc.begin(), seen_in_doc.end()), seen_in_doc.end());
    for (auto idx : seen_in_doc) ++model.document_frequency[static_cast<std::size_t>(idx)];
  }
  model.idf.resize(model.terms.size());
  const double n = static_cast<double>(model.n_docs);
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    model.idf[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(model.document_frequency[i]))) + 1.0;
  }
  return model;
}

TfIdfModel fit_tfidf(std::span<const Template> weak, std::span<const Template> target) {
  std::vector<Template> all(weak.begin(), weak.end());
  all.insert(all.end(), target.begin(), target.end());
  return fit_tfidf(all);
}

SparseVector vectorize(const TfIdfModel& model, const Template& tmpl) {
  std::vector<std::int32_t> ids;
  for (const auto& token : tmpl.slotted_tokens) {
    if (token == kSlotToken) continue;
    const auto idx = model.index_of(token);
    if (idx >= 0) ids.push_back(idx);
  }
  std::sort(ids.begin(), ids.end());
  SparseVector vec;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    vec.emplace_back(ids[i], static_cast<double>(j - i) * model.idf[static_cast<std::size_t>(ids[i])]);
    i = j;
  }
  double norm = 0.0;
  for (const auto& [_, w] : vec) norm += w * w;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& [_, w] : vec) w /= norm;
  }
  return vec;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [_, w] : a) na += w * w;
  for (const auto& [_, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<ScoredTemplate> score_pool(std::span<const Template> weak, std::span<const Template> target,
                                       const TfIdfModel& model) {
  // Column sums of the target matrix: one accumulator per term.
  std::vector<double> target_sum(model.terms.size(), 0.0);
  for (const auto& t : target) {
    for (const auto& [idx, w] : vectorize(model, t)) target_sum[static_cast<std::size_t>(idx)] += w;
  }
  std::vector<ScoredTemplate> scored(weak.size());
  parallel_for(weak.size(), [&](std::size_t i) {
    double score = 0.0;
    for (const auto& [idx, w] : vectorize(model, weak[i])) score += w * target_sum[static_cast<std::size_t>(idx)];
    scored[i] = {weak[i], std::max(0.0, score)};
  });
  return scored;
}

void sort_by_score(std::vector<ScoredTemplate>& scored) {
  std::stable_sort(scored.begin(), scored.end(), [](const ScoredTemplate& a, const ScoredTemplate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tmpl.doc_id < b.tmpl.doc_id;
  });
}

std::vector<Template> select_top(std::span<const ScoredTemplate> scored, std::size_t k, int min_slots,
                                 int max_slots) {
  std::vector<ScoredTemplate> eligible;
  for (const auto& s : scored) {
    if (s.tmpl.slot_count >= min_slots && s.tmpl.slot_count <= max_slots) eligible.push_back(s);
  }
  sort_by_score(eligible);
  std::vector<Template> out;
  const std::size_t take = std::min(k, eligible.size());
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(std::move(eligible[i].tmpl));
  return out;
}

void save_scored_jsonl(std::vector<ScoredTemplate> scored, const std::filesystem::path& path) {
  sort_by_score(scored);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& s : scored) {
    nlohmann::ordered_json record;
    record["doc_id"] = s.tmpl.doc_id;
    record["slotted_text"] = s.tmpl.slotted_text();
    record["slot_count"] = s.tmpl.slot_count;
    record["score"] = s.score;
    out << record.dump() << '\n';
  }
}

std::vector<ScoredTemplate> load_scored_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<ScoredTemplate> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      ScoredTemplate s;
      s.tmpl.doc_id = record.at("doc_id").get<std::string>();
      std::istringstream words(record.at("slotted_text").get<std::string>());
      for (std::string w; words >> w;) {
        if (w == kSlotToken) ++s.tmpl.slot_count;
        s.tmpl.slotted_tokens.push_back(std::move(w));
      }
      s.score = record.at("score").get<double>();
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace otgforge
