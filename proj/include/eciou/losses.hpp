#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

#include "eciou/geometry.hpp"
#include "eciou/weighting.hpp"

namespace eciou {

enum class LossFamily { kIoU, kDIoU, kEIoU };

struct LossKind {
  LossFamily family = LossFamily::kIoU;
  bool ego_centric = false;

  // "iou", "diou", "eiou", "ec-iou", "ec-diou", "ec-eiou".
  std::string name() const;
  static LossKind parse(std::string_view name);
  // IoU, DIoU, EIoU families, each plain kind followed by its EC variant.
  static const std::array<LossKind, 6>& all();

  friend bool operator==(const LossKind&, const LossKind&) = default;
};

struct GradientVector {
  double d_x = 0.0;
  double d_y = 0.0;
  double d_l = 0.0;
  double d_w = 0.0;
  double d_theta = 0.0;

  std::array<double, 5> as_array() const { return {d_x, d_y, d_l, d_w, d_theta}; }
};

class NonFiniteGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Center-distance penalty d^2 / c^2 over the axis-aligned enclosing box.
double diou_regularizer(const OrientedBoxBEV& p, const OrientedBoxBEV& g);
// diou_regularizer plus squared length and width gaps over the enclosing
// box's x and y extents.
double eiou_regularizer(const OrientedBoxBEV& p, const OrientedBoxBEV& g);

/// 1 - M + R, where M is IoU or EC-IoU (alpha from cfg) and R the family
/// regularizer.
double loss_value(const LossKind& kind, const OrientedBoxBEV& p,
                  const OrientedBoxBEV& g, const WeightConfig& cfg);

inline constexpr double kDefaultGradientStep = 1e-4;

/// Central differences over (x, y, l, w, theta) with step h. Throws
/// NonFiniteGradientError if a probe box is invalid or a probe loss is not
/// finite.
GradientVector loss_gradient(const LossKind& kind, const OrientedBoxBEV& p,
                             const OrientedBoxBEV& g, const WeightConfig& cfg,
                             double h = kDefaultGradientStep);

}  // namespace eciou
