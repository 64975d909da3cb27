#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "otgforge/classifiers.hpp"
#include "otgforge/corpus.hpp"

namespace otgforge {

struct EvalReport {
  double prauc = 0.0;
  double auc = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double tp = 0.0;
  double fp = 0.0;
  long n_pos = 0;
  long n_neg = 0;
  std::optional<long> seed;
};

// Average precision: positives are visited in descending score order (ties
// broken by ascending doc_id) and the precision at each positive's rank is
// averaged over n_pos. Throws kNoPositives.
double pr_auc(const ScoreSet& scores, std::span<const Label> labels);

// Mann-Whitney: fraction of (positive, negative) pairs ranked correctly, ties
// counting 1/2. Throws kSingleClass.
double roc_auc(const ScoreSet& scores, std::span<const Label> labels);

// Predicts Hate iff score >= threshold. Precision is 0 when nothing is
// predicted Hate and F1 is 0 when precision and recall are both 0. PRAUC/AUC
// are filled when defined, else left at 0.
EvalReport classification_report(const ScoreSet& scores, std::span<const Label> labels,
                                 double threshold = 0.5);

// Field-wise arithmetic mean. Throws kEmptyInput or kInconsistentCounts.
EvalReport aggregate(std::span<const EvalReport> reports);

// Labels of `corpus` aligned with its documents.
std::vector<Label> labels_of(const Corpus& corpus);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& json);

struct ReportRow {
  std::string model;
  std::string training;
  EvalReport report;
};

// Plain-text table with columns Model, Train, PRAUC, AUC, PR, REC, F1, TP, FP.
std::string format_report_table(std::span<const ReportRow> rows);

}  // namespace otgforge
