#pragma once

#include <iosfwd>
#include <vector>

#include "eciou/geometry.hpp"
#include "eciou/weighting.hpp"

namespace eciou {

struct MetricScore {
  double value = 0.0;
  // Set when the raw value exceeded 1 and was clamped.
  bool clamped = false;
};

MetricScore iou_bev(const OrientedBoxBEV& p, const OrientedBoxBEV& g);

/// Ego-centric IoU of prediction `p` against ground truth `g`.
///
///   WA_g(P n G) / (WA_g(G) + Area(P) - Area(P n G))
///
/// Both weighted areas use cfg.method. The result is clamped to [0, 1].
/// Throws DegenerateDistanceError when the ego touches a weighted point.
MetricScore ec_iou_bev(const OrientedBoxBEV& p, const OrientedBoxBEV& g,
                       const WeightConfig& cfg);

// 3D variants: BEV areas times vertical extents.
MetricScore iou_3d(const Box3D& p, const Box3D& g);
MetricScore ec_iou_3d(const Box3D& p, const Box3D& g, const WeightConfig& cfg);

// Length of the overlap of the two vertical intervals, 0 when disjoint.
double vertical_overlap(const Box3D& a, const Box3D& b);

struct SweepRow {
  double x;
  double iou;
  std::vector<double> ec_iou;  // one per alpha, same order as SweepTable
};

struct SweepTable {
  std::vector<double> alphas;
  std::vector<SweepRow> rows;

  // Header `x,iou,eciou_a<alpha>,...`, values at 6 significant digits.
  void write_csv(std::ostream& out) const;
};

// Number of samples lo, lo+step, ... that fit in [lo, hi].
std::size_t sweep_sample_count(double x_lo, double x_hi, double step);

/// Slides a copy of `g` along x (y fixed at g.y()) and tabulates IoU and
/// EC-IoU for each alpha. `base` supplies the method and Monte Carlo
/// settings; its alpha is ignored. Throws std::invalid_argument for a
/// non-positive step or x_hi < x_lo.
SweepTable sweep_curve(const OrientedBoxBEV& g, double x_lo, double x_hi,
                       double step, const std::vector<double>& alphas,
                       const WeightConfig& base);

}  // namespace eciou
