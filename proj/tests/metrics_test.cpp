#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "clickbait/dataset.hpp"
#include "clickbait/metrics.hpp"

using namespace clickbait;

namespace {

// Pairwise definition: P(s+ > s-) + 0.5 P(s+ == s-).
double brute_force_auc(const ScoredSet& s) {
  double wins = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    if (s.labels[i] != 1) continue;
    for (std::size_t j = 0; j < s.scores.size(); ++j) {
      if (s.labels[j] != 0) continue;
      ++pairs;
      if (s.scores[i] > s.scores[j]) wins += 1;
      else if (s.scores[i] == s.scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

ScoredSet random_set(std::mt19937_64& rng) {
  ScoredSet s;
  const std::size_t n = 2 + rng() % 199;
  const int levels = 1 + static_cast<int>(rng() % 12);  // few levels forces ties
  for (std::size_t i = 0; i < n; ++i) {
    s.scores.push_back(static_cast<double>(rng() % levels) / levels);
    s.labels.push_back(static_cast<int>(rng() % 2));
  }
  s.labels[0] = 1;
  s.labels[1] = 0;
  return s;
}

}  // namespace

TEST(Roc, PerfectSeparation) {
  const ScoredSet s{{0.9, 0.1}, {1, 0}};
  EXPECT_EQ(roc_points(s), (std::vector<RocPoint>{{0, 0}, {0, 1}, {1, 1}}));
  EXPECT_EQ(auc_rank(s), 1.0);
}

TEST(Roc, AllScoresTied) {
  const ScoredSet s{{0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}};
  EXPECT_EQ(roc_points(s), (std::vector<RocPoint>{{0, 0}, {1, 1}}));
  EXPECT_EQ(auc_rank(s), 0.5);
}

TEST(Roc, InterleavedScores) {
  const ScoredSet s{{0.8, 0.3, 0.5, 0.1}, {1, 1, 0, 0}};
  EXPECT_EQ(roc_points(s), (std::vector<RocPoint>{{0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 1}, {1, 1}}));
  EXPECT_EQ(auc_rank(s), 0.75);
  EXPECT_EQ(trapezoid_area(roc_points(s)), 0.75);
}

TEST(Roc, ReportCountsClasses) {
  const RocReport r = roc_report({{0.8, 0.3, 0.5, 0.1, 0.2}, {1, 1, 0, 0, 0}});
  EXPECT_EQ(r.n_pos, 2u);
  EXPECT_EQ(r.n_neg, 3u);
  EXPECT_NEAR(r.auc, 5.0 / 6.0, 1e-15);
}

TEST(Roc, DegenerateAndInvalidInput) {
  EXPECT_THROW(auc_rank({{0.1, 0.2}, {1, 1}}), DegenerateInput);
  EXPECT_THROW(roc_points({{0.1, 0.2}, {0, 0}}), DegenerateInput);
  EXPECT_THROW(auc_rank({{}, {}}), DegenerateInput);
  EXPECT_THROW(auc_rank({{0.1}, {1, 0}}), InvalidInput);
  EXPECT_THROW(auc_rank({{0.1, NAN}, {1, 0}}), InvalidInput);
  EXPECT_THROW(auc_rank({{0.1, 0.2}, {1, 2}}), InvalidInput);
}

TEST(AucProperty, MatchesBruteForceAndTrapezoid) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const ScoredSet s = random_set(rng);
    const double auc = auc_rank(s);
    ASSERT_NEAR(auc, brute_force_auc(s), 1e-12);
    ASSERT_NEAR(auc, trapezoid_area(roc_points(s)), 1e-9);
  }
}

TEST(AucProperty, CurveIsMonotoneFromOriginToOne) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pts = roc_points(random_set(rng));
    ASSERT_EQ(pts.front(), (RocPoint{0, 0}));
    ASSERT_EQ(pts.back(), (RocPoint{1, 1}));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_GE(pts[i].fpr, pts[i - 1].fpr);
      EXPECT_GE(pts[i].tpr, pts[i - 1].tpr);
    }
  }
}

TEST(AucProperty, FlippingLabelsGivesComplement) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    ScoredSet s = random_set(rng);
    const double auc = auc_rank(s);
    for (int& l : s.labels) l = 1 - l;
    EXPECT_NEAR(auc_rank(s), 1.0 - auc, 1e-12);
  }
}

TEST(AucProperty, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 300; ++trial) {
    ScoredSet s = random_set(rng);
    const double auc = auc_rank(s);
    for (double& v : s.scores) v = std::exp(3 * v) - 7;
    EXPECT_NEAR(auc_rank(s), auc, 1e-12);
  }
}

TEST(KFold, PartitionsIndices) {
  for (std::size_t n : {5u, 17u, 200u}) {
    for (std::size_t k : {2u, 3u, 5u}) {
      const auto folds = kfold_split(n, k, 7);
      ASSERT_EQ(folds.size(), k);
      std::set<std::size_t> seen;
      std::size_t lo = n, hi = 0;
      for (const auto& f : folds) {
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
        for (std::size_t i : f) EXPECT_TRUE(seen.insert(i).second);
      }
      EXPECT_EQ(seen.size(), n);
      EXPECT_LE(hi - lo, 1u);
    }
  }
  const auto folds = kfold_split(5, 2, 0);
  EXPECT_EQ(folds[0].size(), 3u);
  EXPECT_EQ(folds[1].size(), 2u);
}

TEST(KFold, SeedDeterminesSplit) {
  EXPECT_EQ(kfold_split(100, 5, 3), kfold_split(100, 5, 3));
  EXPECT_NE(kfold_split(100, 5, 3), kfold_split(100, 5, 4));
}

TEST(KFold, RejectsBadK) {
  EXPECT_THROW(kfold_split(10, 1, 0), InvalidInput);
  EXPECT_THROW(kfold_split(10, 0, 0), InvalidInput);
  EXPECT_THROW(kfold_split(3, 4, 0), InvalidInput);
}

TEST(RocCsv, OneRowPerPointPlusHeader) {
  const RocReport r = roc_report({{0.8, 0.3, 0.5, 0.1}, {1, 1, 0, 0}});
  std::ostringstream out;
  emit_roc_csv(r, out);
  EXPECT_EQ(out.str(), "fpr,tpr\n0,0\n0,0.5\n0.5,0.5\n0.5,1\n1,1\n");
  std::ostringstream empty;
  EXPECT_THROW(emit_roc_csv(RocReport{}, empty), InvalidInput);
}

TEST(Evaluate, BundledCorpusIsSeparable) {
  const Dataset d = read_dataset_file(CLICKBAIT_DATA_DIR "/synthetic_headlines.csv");
  const Vocabulary v = Vocabulary::read_file(CLICKBAIT_DATA_DIR "/vocab.txt");
  const EvaluationReport r = evaluate(d, 5, 42, v, {});
  ASSERT_EQ(r.folds.size(), 5u);
  std::size_t total = 0;
  for (const auto& f : r.folds) total += f.n_pos + f.n_neg;
  EXPECT_EQ(total, d.size());
  EXPECT_GE(r.mean_auc, 0.95);

  const auto json = to_json(r);
  EXPECT_EQ(json["folds"].size(), 5u);
  EXPECT_EQ(json["mean_auc"].get<double>(), r.mean_auc);
}

TEST(Evaluate, RejectsKOfOne) {
  const Dataset d{{"a", 0}, {"b", 1}, {"c", 0}, {"d", 1}};
  EXPECT_THROW(evaluate(d, 1, 0, Vocabulary({"a"}), {}), InvalidInput);
}
