#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "otgforge/config.hpp"
#include "otgforge/corpus.hpp"
#include "otgforge/error.hpp"
#include "otgforge/generator.hpp"
#include "otgforge/lexicon.hpp"
#include "otgforge/metrics.hpp"
#include "otgforge/random.hpp"
#include "otgforge/ranker.hpp"
#include "otgforge/runner.hpp"
#include "otgforge/templating.hpp"
#include "otgforge/text.hpp"

namespace py = pybind11;
using namespace otgforge;

namespace {

ScoreSet to_scores(const std::vector<double>& scores) {
  ScoreSet s;
  for (std::size_t i = 0; i < scores.size(); ++i) s.entries.emplace_back(std::to_string(i), scores[i]);
  return s;
}

std::vector<Label> to_labels(const std::vector<int>& labels) {
  std::vector<Label> out;
  for (const int l : labels) {
    if (l != 0 && l != 1) throw py::value_error("labels must be 0 or 1");
    out.push_back(l ? Label::kHate : Label::kNonHate);
  }
  return out;
}

std::vector<Tag> to_tags(const std::vector<std::string>& tags) {
  std::vector<Tag> out;
  for (const auto& t : tags) out.push_back(parse_tag(t));
  return out;
}

std::vector<std::string> tag_names(const std::vector<Tag>& tags) {
  std::vector<std::string> out;
  for (const auto t : tags) out.emplace_back(tag_name(t));
  return out;
}

}  // namespace

PYBIND11_MODULE(_otgforge, m) {
  m.doc() = "Template-based domain adaptation for hate speech classifiers.";

  static py::exception<Error> error(m, "OtgError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.attr("SLOT") = std::string(kSlotToken);
  m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"));

  py::class_<Lexicon>(m, "Lexicon")
      .def(py::init([](const std::vector<std::string>& entries, const std::string& name) {
             return consolidate_lexicon(entries, name);
           }),
           py::arg("entries"), py::arg("name") = "lexicon")
      .def_static("load", &load_and_consolidate, py::arg("path"))
      .def("save", [](const Lexicon& l, const std::filesystem::path& p) { save_lexicon(l, p); })
      .def_property_readonly("unigrams", &Lexicon::sorted_unigrams)
      .def("__len__", [](const Lexicon& l) { return l.unigrams.size(); })
      .def("match", [](const Lexicon& l, const std::vector<std::string>& tokens) {
        return tag_names(match_lexicon(tokens, l));
      });

  py::class_<Template>(m, "Template")
      .def_readonly("doc_id", &Template::doc_id)
      .def_readonly("tokens", &Template::slotted_tokens)
      .def_readonly("slot_count", &Template::slot_count)
      .def_readonly("removed", &Template::removed_otg)
      .def_property_readonly("text", &Template::slotted_text)
      .def("__repr__", [](const Template& t) { return "<Template " + t.doc_id + ": " + t.slotted_text() + ">"; });

  m.def(
      "templatize",
      [](const std::vector<std::string>& tokens, const std::vector<std::string>& tags, const std::string& id) {
        return templatize(TaggedSentence{id, tokens, to_tags(tags)});
      },
      py::arg("tokens"), py::arg("tags"), py::arg("doc_id") = "");
  m.def("splice", &splice, py::arg("template"));
  m.def(
      "impute",
      [](const Template& t, const Lexicon& lexicon, std::uint64_t seed) {
        Rng rng(seed);
        return impute(t, lexicon, rng).document.tokens;
      },
      py::arg("template"), py::arg("lexicon"), py::arg("seed"));
  m.def(
      "target_lexicon",
      [](const std::vector<std::vector<std::string>>& tokens, const std::vector<std::vector<std::string>>& tags) {
        if (tokens.size() != tags.size()) throw py::value_error("tokens and tags differ in length");
        std::vector<TaggedSentence> tagged;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
          tagged.push_back({std::to_string(i), tokens[i], to_tags(tags[i])});
        }
        return extract_target_lexicon(tagged);
      },
      py::arg("tokens"), py::arg("tags"));

  m.def(
      "rank",
      [](const std::vector<Template>& weak, const std::vector<Template>& target) {
        const auto model = fit_tfidf(weak, target);
        auto scored = score_pool(weak, target, model);
        sort_by_score(scored);
        std::vector<std::pair<Template, double>> out;
        for (auto& s : scored) out.emplace_back(std::move(s.tmpl), s.score);
        return out;
      },
      py::arg("weak"), py::arg("target"),
      "Weak templates scored by summed cosine to the target templates, best first.");
  m.def(
      "select_top",
      [](const std::vector<std::pair<Template, double>>& scored, std::size_t k, int min_slots,
         std::optional<int> max_slots) {
        std::vector<ScoredTemplate> s;
        for (const auto& [t, v] : scored) s.push_back({t, v});
        return select_top(s, k, min_slots, max_slots.value_or(kUnboundedSlots));
      },
      py::arg("scored"), py::arg("k"), py::arg("min_slots") = 0, py::arg("max_slots") = py::none());

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("prauc", &EvalReport::prauc)
      .def_readonly("auc", &EvalReport::auc)
      .def_readonly("precision", &EvalReport::precision)
      .def_readonly("recall", &EvalReport::recall)
      .def_readonly("f1", &EvalReport::f1)
      .def_readonly("tp", &EvalReport::tp)
      .def_readonly("fp", &EvalReport::fp)
      .def_readonly("n_pos", &EvalReport::n_pos)
      .def_readonly("n_neg", &EvalReport::n_neg);

  m.def(
      "pr_auc", [](const std::vector<double>& s, const std::vector<int>& l) { return pr_auc(to_scores(s), to_labels(l)); },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "roc_auc", [](const std::vector<double>& s, const std::vector<int>& l) { return roc_auc(to_scores(s), to_labels(l)); },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "classification_report",
      [](const std::vector<double>& s, const std::vector<int>& l, double threshold) {
        return classification_report(to_scores(s), to_labels(l), threshold);
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def_static("load", &load_config, py::arg("path"))
      .def_static("parse", &parse_config, py::arg("text"), py::arg("base_dir") = std::filesystem::path{})
      .def("set", [](PipelineConfig& c, const std::string& k, const std::string& v) { set_config_value(c, k, v); })
      .def("apply_desk_scale", &PipelineConfig::apply_desk_scale)
      .def("hash", &PipelineConfig::hash)
      .def("canonical", &PipelineConfig::canonical)
      .def_readwrite("seeds", &PipelineConfig::seeds)
      .def_readwrite("output_dir", &PipelineConfig::output_dir);

  m.def("run_pipeline", &run_pipeline, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_baseline", &run_baseline, py::arg("config"), py::call_guard<py::gil_scoped_release>());
}
