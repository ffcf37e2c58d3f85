#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "clickbait/dataset.hpp"
#include "clickbait/errors.hpp"
#include "clickbait/model.hpp"
#include "clickbait/trainer.hpp"

namespace clickbait {

struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> labels;  // 1 = positive

  std::size_t positives() const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1)); }
  std::size_t negatives() const { return labels.size() - positives(); }
};

struct RocPoint {
  double fpr = 0;
  double tpr = 0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocReport {
  std::vector<RocPoint> points;  // descending threshold order
  double auc = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

namespace detail {

inline void check_scored_set(const ScoredSet& s) {
  if (s.scores.size() != s.labels.size()) throw InvalidInput("scores and labels differ in length");
  for (double v : s.scores)
    if (!std::isfinite(v)) throw InvalidInput("scores must be finite");
  for (int l : s.labels)
    if (l != 0 && l != 1) throw InvalidInput("labels must be 0 or 1");
  if (s.positives() == 0 || s.negatives() == 0)
    throw DegenerateInput("ROC/AUC needs at least one positive and one negative");
}

}  // namespace detail

// Threshold sweep over the distinct scores, highest first. A sample counts
// as positive when score >= threshold, so tied scores enter together.
inline std::vector<RocPoint> roc_points(const ScoredSet& s) {
  detail::check_scored_set(s);
  std::vector<std::size_t> idx(s.scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.scores[a] > s.scores[b]; });

  const double n_pos = static_cast<double>(s.positives());
  const double n_neg = static_cast<double>(s.negatives());
  std::vector<RocPoint> pts{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < idx.size();) {
    const double threshold = s.scores[idx[i]];
    while (i < idx.size() && s.scores[idx[i]] == threshold) {
      (s.labels[idx[i]] == 1 ? tp : fp)++;
      ++i;
    }
    pts.push_back({static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos});
  }
  return pts;
}

inline double trapezoid_area(const std::vector<RocPoint>& pts) {
  double area = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2.0;
  return area;
}

// Mann-Whitney statistic from mid-ranks: ties between a positive and a
// negative earn half credit.
inline double auc_rank(const ScoredSet& s) {
  detail::check_scored_set(s);
  std::vector<std::size_t> idx(s.scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.scores[a] < s.scores[b]; });

  // Ranks are 1-based; a tie group spanning ranks [lo, hi] shares (lo + hi) / 2.
  double pos_rank_sum = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && s.scores[idx[j]] == s.scores[idx[i]]) ++j;
    const double mid_rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (s.labels[idx[k]] == 1) pos_rank_sum += mid_rank;
    i = j;
  }
  const double n_pos = static_cast<double>(s.positives());
  const double n_neg = static_cast<double>(s.negatives());
  const double u = pos_rank_sum - n_pos * (n_pos + 1) / 2.0;
  return u / (n_pos * n_neg);
}

inline RocReport roc_report(const ScoredSet& s) {
  RocReport r;
  r.points = roc_points(s);
  r.auc = auc_rank(s);
  r.n_pos = s.positives();
  r.n_neg = s.negatives();
  return r;
}

// Seeded shuffle dealt round-robin into k folds; each fold is sorted.
inline std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidInput("k must be at least 2");
  if (k > n) throw InvalidInput("k must not exceed the number of examples");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SeededRng rng(seed);
  rng.shuffle(perm);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(perm[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

struct EvaluationReport {
  std::vector<RocReport> folds;
  double mean_auc = 0;
  double accuracy = 0;  // pooled over every held-out prediction
};

// k-fold cross-validation: each fold is scored by a head trained on the
// remaining folds, in original index order.
inline EvaluationReport evaluate(const Dataset& data, std::size_t k, std::uint64_t seed, const Vocabulary& vocab,
                                 const TrainOptions& hp, const ModelSettings& settings = {}) {
  const auto folds = kfold_split(data.size(), k, seed);
  EvaluationReport report;
  std::size_t correct = 0, total = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<bool> held_out(data.size(), false);
    for (std::size_t i : folds[f]) held_out[i] = true;
    Dataset train_rows;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (!held_out[i]) train_rows.push_back(data[i]);

    const ModelArtifact model = train(train_rows, vocab, hp, settings);
    ScoredSet scored;
    for (std::size_t i : folds[f]) {
      const Prediction p = classify(model, data[i].text);
      scored.scores.push_back(p.score);
      scored.labels.push_back(data[i].label);
      correct += (as_int(p.label) == data[i].label) ? 1 : 0;
      ++total;
    }
    report.folds.push_back(roc_report(scored));
  }
  double sum = 0;
  for (const auto& r : report.folds) sum += r.auc;
  report.mean_auc = sum / static_cast<double>(report.folds.size());
  report.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  return report;
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void emit_roc_csv(const RocReport& report, std::ostream& out) {
  if (report.points.empty()) throw InvalidInput("ROC report has no points");
  out << "fpr,tpr\n";
  for (const auto& p : report.points) out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("failed to write ROC CSV");
}

inline nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& r : report.folds) folds.push_back({{"auc", r.auc}, {"n_pos", r.n_pos}, {"n_neg", r.n_neg}});
  return {{"mean_auc", report.mean_auc}, {"accuracy", report.accuracy}, {"folds", folds}};
}

}  // namespace clickbait
