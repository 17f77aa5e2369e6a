#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "footpath/errors.hpp"
#include "footpath/metrics.hpp"
#include "footpath/tile_tree.hpp"

namespace footpath {
namespace {

BinaryMask from_rows(const std::vector<std::string>& rows) {
  BinaryMask m(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) m.set(c, r, rows[r][c] == '#');
  }
  return m;
}

// 4×4 worked example: tp=2, fp=2, fn=2, tn=10.
const BinaryMask kPred = from_rows({"##..", "##..", "....", "...."});
const BinaryMask kTruth = from_rows({"#...", "#...", "#...", "#..."});

TEST(Metrics, WorkedExample) {
  const ConfusionCounts c = confusion(kPred, kTruth);
  EXPECT_EQ(c, (ConfusionCounts{2, 2, 2, 10}));
  EXPECT_EQ(precision(c), 0.5);
  EXPECT_EQ(recall(c), 0.5);
  EXPECT_EQ(f1(c), 0.5);
  EXPECT_EQ(iou(c, SegClass::kForeground), 1.0 / 3.0);
  EXPECT_EQ(iou(c, SegClass::kBackground), 10.0 / 14.0);
  EXPECT_NEAR(miou(c), (1.0 / 3.0 + 10.0 / 14.0) / 2.0, 1e-15);
}

TEST(Metrics, ZeroDivisionConventions) {
  const BinaryMask empty(4, 4);
  const ConfusionCounts none = confusion(empty, empty);
  EXPECT_EQ(iou(none, SegClass::kForeground), 1.0);
  EXPECT_EQ(f1(none), 1.0);

  BinaryMask one(4, 4);
  one.set(1, 1, true);
  const ConfusionCounts missed = confusion(empty, one);
  EXPECT_EQ(precision(missed), 0.0);
  EXPECT_EQ(recall(missed), 0.0);
  EXPECT_EQ(f1(missed), 0.0);
  EXPECT_EQ(iou(missed, SegClass::kForeground), 0.0);

  BinaryMask full(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) full.set(c, r, true);
  EXPECT_EQ(iou(confusion(full, full), SegClass::kBackground), 1.0);
}

TEST(Metrics, IdenticalMasksScorePerfect) {
  const ConfusionCounts c = confusion(kTruth, kTruth);
  EXPECT_EQ(f1(c), 1.0);
  EXPECT_EQ(miou(c), 1.0);
}

TEST(Metrics, DimensionMismatch) { EXPECT_THROW(confusion(BinaryMask(4, 4), BinaryMask(4, 5)), DomainError); }

TEST(Metrics, F1IsHarmonicMeanAndMatchesCountForm) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> d(0, 1000);
  for (int i = 0; i < 500; ++i) {
    const ConfusionCounts c{d(rng) + 1, d(rng), d(rng), d(rng)};
    const double count_form = 2.0 * c.tp / (2.0 * c.tp + c.fp + c.fn);
    ASSERT_NEAR(f1(c), count_form, 1e-12);
  }
}

TEST(Metrics, MicroAggregationSumsCounts) {
  const ConfusionCounts a = confusion(kPred, kTruth);
  const ConfusionCounts b = confusion(kTruth, kTruth);
  ConfusionCounts total = a;
  total += b;
  const EvalReport r = make_report(total, 2);
  EXPECT_EQ(r.counts, (ConfusionCounts{6, 2, 2, 22}));
  EXPECT_EQ(r.f1, 2.0 * 6 / (2.0 * 6 + 4));
  EXPECT_EQ(r.n_images, 2u);
}

class MetricsDataset : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = std::filesystem::temp_directory_path() /
            ("footpath_metrics_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(root_);
  }
  void TearDown() override { std::filesystem::remove_all(root_); }
  std::filesystem::path root_;
};

TEST_F(MetricsDataset, EvaluatesMatchedTilesAndCountsMissing) {
  const TileId a{5, 6, 4}, b{6, 6, 4}, c{7, 6, 4};
  BinaryMask pred(256, 256), gt(256, 256);
  for (int i = 0; i < 10; ++i) pred.set(i, 0, true);
  for (int i = 5; i < 20; ++i) gt.set(i, 0, true);
  write_mask(tile_path(root_ / "pred", a), pred);
  write_mask(tile_path(root_ / "gt", a), gt);
  write_mask(tile_path(root_ / "pred", b), gt);
  write_mask(tile_path(root_ / "gt", b), gt);
  write_mask(tile_path(root_ / "gt", c), gt);

  const EvalReport r = evaluate_dataset(root_ / "pred", root_ / "gt", {2, true});
  EXPECT_EQ(r.n_images, 2u);
  EXPECT_EQ(r.missing_prediction, 1u);
  EXPECT_EQ(r.missing_ground_truth, 0u);
  EXPECT_EQ(r.counts.tp, 5u + 15u);
  EXPECT_EQ(r.counts.fp, 5u);
  EXPECT_EQ(r.counts.fn, 10u);
  ASSERT_EQ(r.per_image.size(), 2u);
  EXPECT_EQ(r.per_image[0].tile, a);

  const std::string csv = format_per_image_csv(r);
  EXPECT_NE(csv.find("4/5/6,5,5,10,"), std::string::npos);
  EXPECT_NE(format_report_json(r).find("\"aggregation\": \"micro\""), std::string::npos);
}

TEST_F(MetricsDataset, MissingDirectory) {
  EXPECT_THROW(evaluate_dataset(root_ / "nope", root_ / "gt"), MissingInputError);
}

}  // namespace
}  // namespace footpath
