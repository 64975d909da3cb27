#include "otgforge/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "otgforge/error.hpp"

namespace otgforge {
namespace {

void check_aligned(const ScoreSet& scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kInconsistentCounts, std::to_string(scores.size()) + " scores for " +
                                                    std::to_string(labels.size()) + " labels");
  }
}

}  // namespace

double pr_auc(const ScoreSet& scores, std::span<const Label> labels) {
  check_aligned(scores, labels);
  const auto n_pos = std::count(labels.begin(), labels.end(), Label::kHate);
  if (n_pos == 0) throw Error(ErrorCode::kNoPositives, "average precision needs at least one positive");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = scores.entries[a];
    const auto& eb = scores.entries[b];
    if (ea.second != eb.second) return ea.second > eb.second;
    if (ea.first != eb.first) return ea.first < eb.first;
    return a < b;
  });
  double sum = 0.0;
  long tp = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] != Label::kHate) continue;
    ++tp;
    sum += static_cast<double>(tp) / static_cast<double>(rank + 1);
  }
  return sum / static_cast<double>(n_pos);
}

double roc_auc(const ScoreSet& scores, std::span<const Label> labels) {
  check_aligned(scores, labels);
  const auto n_pos = std::count(labels.begin(), labels.end(), Label::kHate);
  const auto n_neg = static_cast<long>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorCode::kSingleClass, "ROC AUC needs both classes");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores.entries[a].second < scores.entries[b].second; });
  // Twice the Mann-Whitney count, kept integral: each positive earns 2 per
  // negative strictly below it and 1 per tied negative.
  long long twice_u = 0;
  long negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    long pos_in_group = 0, neg_in_group = 0;
    while (j < order.size() && scores.entries[order[j]].second == scores.entries[order[i]].second) {
      (labels[order[j]] == Label::kHate ? pos_in_group : neg_in_group) += 1;
      ++j;
    }
    twice_u += static_cast<long long>(pos_in_group) * (2LL * negatives_below + neg_in_group);
    negatives_below += neg_in_group;
    i = j;
  }
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport classification_report(const ScoreSet& scores, std::span<const Label> labels, double threshold) {
  check_aligned(scores, labels);
  EvalReport report;
  long tp = 0, fp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool positive = labels[i] == Label::kHate;
    (positive ? report.n_pos : report.n_neg) += 1;
    if (scores.entries[i].second >= threshold) (positive ? tp : fp) += 1;
  }
  report.tp = static_cast<double>(tp);
  report.fp = static_cast<double>(fp);
  report.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  report.recall = report.n_pos > 0 ? static_cast<double>(tp) / static_cast<double>(report.n_pos) : 0.0;
  const double pr_sum = report.precision + report.recall;
  report.f1 = pr_sum > 0.0 ? 2.0 * report.precision * report.recall / pr_sum : 0.0;
  if (report.n_pos > 0) report.prauc = pr_auc(scores, labels);
  if (report.n_pos > 0 && report.n_neg > 0) report.auc = roc_auc(scores, labels);
  return report;
}

EvalReport aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to aggregate");
  EvalReport mean;
  mean.n_pos = reports.front().n_pos;
  mean.n_neg = reports.front().n_neg;
  for (const auto& r : reports) {
    if (r.n_pos != mean.n_pos || r.n_neg != mean.n_neg) {
      throw Error(ErrorCode::kInconsistentCounts, "reports disagree on n_pos/n_neg");
    }
    mean.prauc += r.prauc;
    mean.auc += r.auc;
    mean.precision += r.precision;
    mean.recall += r.recall;
    mean.f1 += r.f1;
    mean.tp += r.tp;
    mean.fp += r.fp;
  }
  const double n = static_cast<double>(reports.size());
  mean.prauc /= n;
  mean.auc /= n;
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  mean.tp /= n;
  mean.fp /= n;
  if (reports.size() == 1) mean.seed = reports.front().seed;
  return mean;
}

std::vector<Label> labels_of(const Corpus& corpus) {
  std::vector<Label> labels;
  labels.reserve(corpus.size());
  for (const auto& doc : corpus) {
    if (!doc.label) throw Error(ErrorCode::kMissingLabel, "document '" + doc.id + "' has no label");
    labels.push_back(*doc.label);
  }
  return labels;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["prauc"] = report.prauc;
  j["auc"] = report.auc;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["tp"] = report.tp;
  j["fp"] = report.fp;
  j["n_pos"] = report.n_pos;
  j["n_neg"] = report.n_neg;
  if (report.seed) j["seed"] = *report.seed;
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.prauc = j.at("prauc").get<double>();
  r.auc = j.at("auc").get<double>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.tp = j.at("tp").get<double>();
  r.fp = j.at("fp").get<double>();
  r.n_pos = j.at("n_pos").get<long>();
  r.n_neg = j.at("n_neg").get<long>();
  if (j.contains("seed")) r.seed = j["seed"].get<long>();
  return r;
}

std::string format_report_table(std::span<const ReportRow> rows) {
  std::size_t model_w = 5, train_w = 5;
  for (const auto& r : rows) {
    model_w = std::max(model_w, r.model.size());
    train_w = std::max(train_w, r.training.size());
  }
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %6s  %6s  %6s  %6s  %6s  %9s  %9s\n", static_cast<int>(model_w),
                "Model", static_cast<int>(train_w), "Train", "PRAUC", "AUC", "PR", "REC", "F1", "TP", "FP");
  out += buf;
  for (const auto& r : rows) {
    const auto& m = r.report;
    std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %6.3f  %6.3f  %6.3f  %6.3f  %6.3f  %9.1f  %9.1f\n",
                  static_cast<int>(model_w), r.model.c_str(), static_cast<int>(train_w), r.training.c_str(), m.prauc,
                  m.auc, m.precision, m.recall, m.f1, m.tp, m.fp);
    out += buf;
  }
  return out;
}

}  // namespace otgforge
