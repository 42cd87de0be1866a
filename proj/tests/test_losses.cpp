#include <gtest/gtest.h>

#include <cmath>

#include "eciou/losses.hpp"
#include "eciou/metrics.hpp"
#include "test_support.hpp"

namespace eciou {
namespace {

WeightConfig alpha_cfg(double alpha) {
  WeightConfig cfg;
  cfg.alpha = alpha;
  return cfg;
}

TEST(LossKind, NamesRoundTrip) {
  const auto all = LossKind::all();
  const char* expected[] = {"iou", "ec-iou", "diou", "ec-diou", "eiou", "ec-eiou"};
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].name(), expected[i]);
    EXPECT_EQ(LossKind::parse(expected[i]), all[i]);
  }
  EXPECT_THROW(LossKind::parse("giou"), std::invalid_argument);
}

TEST(LossValue, IdentityIsZeroForEveryKind) {
  const OrientedBoxBEV g(6, 6, 3, 1, 0.785);
  for (const auto& k : LossKind::all()) {
    EXPECT_EQ(loss_value(k, g, g, alpha_cfg(1)), 0.0) << k.name();
  }
}

TEST(LossValue, DisjointPlainIouIsOne) {
  const OrientedBoxBEV p(0, 5, 2, 2, 0);
  const OrientedBoxBEV g(10, 5, 2, 2, 0);
  EXPECT_EQ(loss_value({LossFamily::kIoU, false}, p, g, alpha_cfg(1)), 1.0);
}

TEST(LossValue, DiouExample) {
  const OrientedBoxBEV p(0, 0, 2, 2, 0);
  const OrientedBoxBEV g(3, 0, 2, 2, 0);
  EXPECT_NEAR(loss_value({LossFamily::kDIoU, false}, p, g, alpha_cfg(1)),
              1.0 + 9.0 / 29.0, 1e-12);
}

TEST(LossValue, EiouExample) {
  // Enclosing box spans x in [-1, 4.5] and y in [-1, 1].
  const OrientedBoxBEV p(0, 0, 2, 2, 0);
  const OrientedBoxBEV g(3, 0, 3, 1, 0);
  const double cl2 = 5.5 * 5.5;
  const double cw2 = 4.0;
  EXPECT_NEAR(eiou_regularizer(p, g), 9.0 / (cl2 + cw2) + 1.0 / cl2 + 1.0 / cw2,
              1e-12);
}

TEST(LossValue, Properties) {
  testing::Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const auto g = testing::random_ground_truth(rng);
    const auto p = testing::random_prediction(rng, g);
    const double r = diou_regularizer(p, g);
    EXPECT_GE(r, 0.0);
    EXPECT_LT(r, 1.0);
    for (const auto& k : LossKind::all()) {
      EXPECT_GE(loss_value(k, p, g, alpha_cfg(1)), 0.0);
    }
    for (auto fam : {LossFamily::kIoU, LossFamily::kDIoU, LossFamily::kEIoU}) {
      EXPECT_NEAR(loss_value({fam, true}, p, g, alpha_cfg(0)),
                  loss_value({fam, false}, p, g, alpha_cfg(0)), 1e-9);
    }
  }
}

TEST(LossGradient, CoaxialBoxesHaveNoLateralGradient) {
  const OrientedBoxBEV p(9, 0, 4, 2, 0);
  const OrientedBoxBEV g(10, 0, 4, 2, 0);
  const auto grad = loss_gradient({LossFamily::kIoU, false}, p, g, alpha_cfg(1));
  EXPECT_NEAR(grad.d_y, 0.0, 1e-8);
  EXPECT_LT(grad.d_x, 0.0);
}

TEST(LossGradient, MatchesOneSidedProbeSigns) {
  const OrientedBoxBEV p(1, 0.2, 2, 2, 0.1);
  const OrientedBoxBEV g(2, 0, 2, 2, 0);
  const LossKind k{LossFamily::kIoU, false};
  const auto grad = loss_gradient(k, p, g, alpha_cfg(1));
  const double up = loss_value(k, p.translated_to(p.x() + 1e-4, p.y()), g, alpha_cfg(1));
  const double down = loss_value(k, p.translated_to(p.x() - 1e-4, p.y()), g, alpha_cfg(1));
  EXPECT_LT(up, down);
  EXPECT_LT(grad.d_x, 0.0);
}

TEST(LossGradient, ProbeFailureIsReported) {
  const OrientedBoxBEV p(5, 5, 1e-5, 1, 0);
  const OrientedBoxBEV g(5, 5, 1, 1, 0);
  EXPECT_THROW(loss_gradient({LossFamily::kIoU, false}, p, g, alpha_cfg(1)),
               NonFiniteGradientError);
  EXPECT_THROW(loss_gradient({LossFamily::kIoU, false}, g, g, alpha_cfg(1), 0.0),
               std::invalid_argument);
}

TEST(LossGradient, SmallStepDecreasesLoss) {
  testing::Rng rng(42);
  int tried = 0;
  int improved = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto g = testing::random_ground_truth(rng);
    const auto p = testing::random_prediction(rng, g);
    if (iou_bev(p, g).value <= 0.0) continue;
    const auto& kinds = LossKind::all();
    const LossKind k = kinds[static_cast<std::size_t>(i) % kinds.size()];
    const auto grad = loss_gradient(k, p, g, alpha_cfg(1)).as_array();
    auto q = p.params();
    for (std::size_t j = 0; j < 5; ++j) q[j] -= 1e-3 * grad[j];
    ++tried;
    if (loss_value(k, OrientedBoxBEV::from_params(q), g, alpha_cfg(1)) <
        loss_value(k, p, g, alpha_cfg(1))) {
      ++improved;
    }
  }
  ASSERT_GT(tried, 500);
  EXPECT_GE(improved, 0.95 * tried);
}

}  // namespace
}  // namespace eciou
