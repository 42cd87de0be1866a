#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "eciou/eval_harness.hpp"
#include "eciou/metrics.hpp"
#include "test_support.hpp"

namespace eciou {
namespace {

const std::string kFixtures = ECIOU_FIXTURE_DIR;

std::vector<DetectionRecord> parse_text(const std::string& text, RecordKind kind) {
  std::istringstream in(text);
  return parse_records(in, kind);
}

DetectionRecord car(double x, double y, std::optional<double> score = std::nullopt,
                    std::string frame = "f0") {
  return {std::move(frame), "car", Box3D(x, y, 0.9, 4, 2, 1.6, 0), score};
}

TEST(ParseRecords, PredictionLine) {
  const auto recs = parse_text("f0 car 10.0 0.0 0.9 4.0 2.0 1.6 0.0 0.95\n",
                               RecordKind::kPredictions);
  ASSERT_EQ(recs.size(), 1u);
  const auto& r = recs[0];
  EXPECT_EQ(r.frame_id, "f0");
  EXPECT_EQ(r.class_label, "car");
  EXPECT_DOUBLE_EQ(r.box.bev().x(), 10.0);
  EXPECT_DOUBLE_EQ(r.box.z(), 0.9);
  EXPECT_DOUBLE_EQ(r.box.bev().l(), 4.0);
  EXPECT_DOUBLE_EQ(r.box.bev().w(), 2.0);
  EXPECT_DOUBLE_EQ(r.box.h(), 1.6);
  EXPECT_EQ(r.box.bev().theta(), 0.0);
  ASSERT_TRUE(r.score.has_value());
  EXPECT_DOUBLE_EQ(*r.score, 0.95);
}

TEST(ParseRecords, CommentsAndBlankLines) {
  const auto recs = parse_text(
      "# header\n\n  f1 pedestrian 1 2 0 0.5 0.5 1.7 0.3  # trailing\n\n",
      RecordKind::kGroundTruths);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_FALSE(recs[0].score.has_value());
  EXPECT_TRUE(parse_text("", RecordKind::kPredictions).empty());
}

TEST(ParseRecords, ErrorsNameTheLine) {
  try {
    parse_records(kFixtures + "/malformed_preds.txt", RecordKind::kPredictions);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(parse_text("f0 car 1 2 0 4 2 1.6 0 1.5\n", RecordKind::kPredictions),
               ParseError);
  EXPECT_THROW(parse_text("f0 car 1 2 0 4 2 1.6 0 0.5\n", RecordKind::kGroundTruths),
               ParseError);
  EXPECT_THROW(parse_text("f0 car 1 2 0 -4 2 1.6 0\n", RecordKind::kGroundTruths),
               ParseError);
  EXPECT_THROW(parse_text("f0 car 1 2x 0 4 2 1.6 0\n", RecordKind::kGroundTruths),
               ParseError);
  EXPECT_THROW(parse_records(kFixtures + "/missing.txt", RecordKind::kGroundTruths),
               ParseError);
}

TEST(MatchGreedy, Basics) {
  MatchOptions opts;
  const std::vector<DetectionRecord> gts{car(10, 0)};
  auto m = match_greedy({car(10, 0, 0.9)}, gts, opts);
  EXPECT_EQ(m.matches.size(), 1u);
  EXPECT_TRUE(m.false_positives.empty());
  EXPECT_TRUE(m.false_negatives.empty());

  m = match_greedy({car(12.5, 0, 0.9)}, gts, opts);
  EXPECT_TRUE(m.matches.empty());
  EXPECT_EQ(m.false_positives.size(), 1u);
  EXPECT_EQ(m.false_negatives.size(), 1u);
}

TEST(MatchGreedy, HigherScoreClaimsTheGroundTruth) {
  MatchOptions opts;
  const std::vector<DetectionRecord> gts{car(10, 0)};
  const std::vector<DetectionRecord> preds{car(10.3, 0, 0.4), car(10.6, 0, 0.8)};
  const auto m = match_greedy(preds, gts, opts);
  ASSERT_EQ(m.matches.size(), 1u);
  EXPECT_EQ(m.matches[0].pred, 1u);
  EXPECT_EQ(m.false_positives, std::vector<std::size_t>{0});
}

TEST(MatchGreedy, EcAffinityPrefersNearSide) {
  MatchOptions opts;
  opts.affinity = Affinity::kEcIoU;
  opts.threshold = 0.3;
  const std::vector<DetectionRecord> gts{car(10, 0)};
  // Mirror placements with equal IoU.
  const double near = affinity_score(car(9.5, 0, 0.5), gts[0], opts);
  const double far = affinity_score(car(10.5, 0, 0.5), gts[0], opts);
  EXPECT_GT(near, far);
}

TEST(MatchGreedy, OneToOneAndMonotoneInThreshold) {
  testing::Rng rng(51);
  for (int i = 0; i < 300; ++i) {
    const auto f = testing::random_frame(rng, 4);
    std::size_t prev_tp = f.preds.size() + 1;
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      MatchOptions opts;
      opts.threshold = t;
      const auto m = match_greedy(f.preds, f.gts, opts);
      std::vector<int> pred_seen(f.preds.size()), gt_seen(f.gts.size());
      for (const auto& mm : m.matches) {
        EXPECT_EQ(++pred_seen[mm.pred], 1);
        EXPECT_EQ(++gt_seen[mm.gt], 1);
        EXPECT_GE(mm.affinity, t);
      }
      EXPECT_EQ(m.matches.size() + m.false_positives.size(), f.preds.size());
      EXPECT_EQ(m.matches.size() + m.false_negatives.size(), f.gts.size());
      EXPECT_LE(m.matches.size(), prev_tp);
      prev_tp = m.matches.size();
    }
  }
}

TEST(MatchGreedy, AgreesWithBruteForceMostOfTheTime) {
  testing::Rng rng(52);
  int mismatches = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto f = testing::random_frame(rng, 4);
    MatchOptions opts;
    opts.threshold = 0.5;
    const auto m = match_greedy(f.preds, f.gts, opts);
    const auto best =
        testing::max_matching_size(testing::affinity_matrix(f, opts), 0.5);
    EXPECT_LE(m.matches.size(), best);
    if (m.matches.size() != best) ++mismatches;
  }
  RecordProperty("mismatches", mismatches);
  EXPECT_LE(mismatches, n / 20);
}

TEST(AveragePrecision40, Examples) {
  EXPECT_DOUBLE_EQ(*average_precision_40({{0.9, true}, {0.8, true}}, 2), 1.0);
  EXPECT_DOUBLE_EQ(*average_precision_40({}, 3), 0.0);
  EXPECT_FALSE(average_precision_40({{0.9, false}}, 0).has_value());
  const double ap =
      *average_precision_40({{0.7, true}, {0.9, true}, {0.8, false}}, 2);
  EXPECT_NEAR(ap, 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(ap, testing::brute_force_ap40({true, false, true}, 2), 1e-12);
}

TEST(AveragePrecision40, MatchesBruteForceEnumeration) {
  testing::Rng rng(53);
  for (int i = 0; i < 500; ++i) {
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    std::vector<ScoredOutcome> outcomes;
    std::vector<bool> ranked;
    std::size_t tps = 0;
    for (int k = 0; k < n; ++k) {
      const bool tp = testing::uniform(rng, 0, 1) < 0.6;
      tps += tp ? 1 : 0;
      // Strictly decreasing scores keep the ranking unambiguous.
      outcomes.push_back({1.0 - 0.05 * k, tp});
      ranked.push_back(tp);
    }
    const std::size_t gt_count = tps + std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    if (gt_count == 0) continue;
    std::shuffle(outcomes.begin(), outcomes.end(), rng);
    EXPECT_NEAR(*average_precision_40(outcomes, gt_count),
                testing::brute_force_ap40(ranked, gt_count), 1e-12);
  }
}

TEST(TpMetricMeans, Examples) {
  WeightConfig cfg;
  const std::vector<DetectionRecord> gts{car(10, 0)};
  auto tp = tp_metric_means({car(10, 0, 0.9)}, gts, 2.0, cfg);
  EXPECT_EQ(tp.true_positives, 1u);
  EXPECT_DOUBLE_EQ(*tp.mean_iou, 1.0);
  EXPECT_DOUBLE_EQ(*tp.mean_ec_iou, 1.0);

  tp = tp_metric_means({car(13, 0, 0.9)}, gts, 2.0, cfg);
  EXPECT_EQ(tp.true_positives, 0u);
  EXPECT_FALSE(tp.mean_iou.has_value());
  EXPECT_FALSE(tp.mean_ec_iou.has_value());

  const auto off = car(11, 0.5, 0.9);
  tp = tp_metric_means({off}, gts, 2.0, cfg);
  EXPECT_DOUBLE_EQ(*tp.mean_iou, iou_3d(off.box, gts[0].box).value);
  EXPECT_DOUBLE_EQ(*tp.mean_ec_iou, ec_iou_3d(off.box, gts[0].box, cfg).value);
}

TEST(TpMetricMeans, MatchesWithinFramesOnly) {
  WeightConfig cfg;
  const auto tp = tp_metric_means({car(10, 0, 0.9, "a")}, {car(10, 0, {}, "b")},
                                  2.0, cfg);
  EXPECT_EQ(tp.true_positives, 0u);
}

TEST(Evaluate, PerfectFixture) {
  const auto preds =
      parse_records(kFixtures + "/perfect_preds.txt", RecordKind::kPredictions);
  const auto gts =
      parse_records(kFixtures + "/perfect_gts.txt", RecordKind::kGroundTruths);
  const auto report = evaluate(preds, gts, EvalOptions{});
  ASSERT_EQ(report.classes.size(), 2u);
  for (const auto& [label, c] : report.classes) {
    EXPECT_DOUBLE_EQ(*c.ap40_iou, 1.0) << label;
    EXPECT_DOUBLE_EQ(*c.ap40_ec_iou, 1.0) << label;
    EXPECT_DOUBLE_EQ(*c.tp_mean_iou, 1.0);
    EXPECT_EQ(c.counts.fp, 0u);
    EXPECT_EQ(c.counts.fn, 0u);
  }
  EXPECT_DOUBLE_EQ(*report.map40, 1.0);
  EXPECT_DOUBLE_EQ(*report.ec_map40, 1.0);
}

TEST(Evaluate, EmptyPredictions) {
  const auto gts =
      parse_records(kFixtures + "/perfect_gts.txt", RecordKind::kGroundTruths);
  const auto report = evaluate({}, gts, EvalOptions{});
  const auto& c = report.classes.at("car");
  EXPECT_EQ(*c.ap40_iou, 0.0);
  EXPECT_EQ(c.counts.fn, 3u);
  EXPECT_EQ(c.counts.tp + c.counts.fn, c.gt_count);
  EXPECT_FALSE(c.tp_mean_iou.has_value());
}

TEST(Evaluate, TwoGroundTruthFixture) {
  const auto preds =
      parse_records(kFixtures + "/ap_preds.txt", RecordKind::kPredictions);
  const auto gts = parse_records(kFixtures + "/ap_gts.txt", RecordKind::kGroundTruths);
  const auto report = evaluate(preds, gts, EvalOptions{});
  const auto& c = report.classes.at("car");
  EXPECT_NEAR(*c.ap40_iou, 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(*c.ap40_ec_iou, 5.0 / 6.0, 1e-12);
  EXPECT_EQ(c.counts.tp, 2u);
  EXPECT_EQ(c.counts.fp, 1u);
}

TEST(Evaluate, EcApOrderingFollowsPairOrdering) {
  // Every prediction sits on the far side of its ground truth, so EC-IoU is
  // below IoU pair by pair; the threshold sits between the two.
  std::vector<DetectionRecord> gts;
  std::vector<DetectionRecord> preds;
  for (int i = 0; i < 6; ++i) {
    const std::string frame = "f" + std::to_string(i);
    gts.push_back(car(10, 0, {}, frame));
    preds.push_back(car(10.0 + 0.25 * i, 0, 0.9 - 0.1 * i, frame));
  }
  EvalOptions opts;
  opts.thresholds = {{"car", 0.7}};
  opts.weights.alpha = 4;
  for (const auto& p : preds) {
    EXPECT_LE(affinity_score(p, gts[0], {Affinity::kEcIoU, OverlapMode::k3d, 0.7, opts.weights}),
              affinity_score(p, gts[0], {Affinity::kIoU, OverlapMode::k3d, 0.7, opts.weights}) + 1e-12);
  }
  const auto far = evaluate(preds, gts, opts).classes.at("car");
  EXPECT_LE(*far.ap40_ec_iou, *far.ap40_iou);

  for (auto& p : preds) {
    p.box = Box3D(20.0 - p.box.bev().x(), 0, 0.9, 4, 2, 1.6, 0);
  }
  const auto near = evaluate(preds, gts, opts).classes.at("car");
  EXPECT_GE(*near.ap40_ec_iou, *near.ap40_iou);
  EXPECT_LT(*far.ap40_ec_iou, *near.ap40_ec_iou);
}

TEST(Evaluate, JsonShape) {
  const auto preds =
      parse_records(kFixtures + "/ap_preds.txt", RecordKind::kPredictions);
  const auto gts = parse_records(kFixtures + "/ap_gts.txt", RecordKind::kGroundTruths);
  const auto doc = nlohmann::json::parse(evaluate(preds, gts, EvalOptions{}).to_json());
  const auto& c = doc.at("classes").at("car");
  EXPECT_DOUBLE_EQ(c.at("ap40_iou").get<double>(), 0.833333);
  EXPECT_EQ(c.at("counts").at("tp").get<int>(), 2);
  EXPECT_EQ(c.at("counts").at("fp").get<int>(), 1);
  EXPECT_EQ(c.at("counts").at("fn").get<int>(), 0);
  EXPECT_EQ(c.at("gt_count").get<int>(), 2);
  EXPECT_TRUE(c.contains("tp_mean_ec_iou"));
  EXPECT_TRUE(doc.contains("map40"));
  EXPECT_TRUE(doc.contains("ec_map40"));
}

}  // namespace
}  // namespace eciou
