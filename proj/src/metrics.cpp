#include "eciou/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "eciou/format.hpp"
#include "eciou/parallel.hpp"

namespace eciou {

namespace {

// Monte Carlo streams for the two weighted regions of one evaluation.
constexpr std::uint64_t kIntersectionStream = 0;
constexpr std::uint64_t kGroundTruthStream = 1;

MetricScore clamp_score(double raw) {
  if (raw > 1.0) return {1.0, true};
  return {std::max(raw, 0.0), false};
}

struct OverlapParts {
  ConvexPolygon pred;
  ConvexPolygon gt;
  ConvexPolygon inter;
  double pred_area;
  double gt_area;
  double inter_area;
};

OverlapParts overlap_parts(const OrientedBoxBEV& p, const OrientedBoxBEV& g) {
  OverlapParts parts{box_to_polygon(p), box_to_polygon(g), {}, 0.0, 0.0, 0.0};
  parts.inter = intersect_convex(parts.pred, parts.gt);
  parts.pred_area = polygon_area(parts.pred);
  parts.gt_area = polygon_area(parts.gt);
  parts.inter_area = polygon_area(parts.inter);
  return parts;
}

// Height as the length of [z_min, z_max], so that a box overlapping itself
// gives a vertical overlap equal to its own height bit for bit.
double span(const Box3D& b) { return b.z_max() - b.z_min(); }

}  // namespace

MetricScore iou_bev(const OrientedBoxBEV& p, const OrientedBoxBEV& g) {
  const auto parts = overlap_parts(p, g);
  if (parts.inter_area <= 0.0) return {0.0, false};
  const double uni = parts.gt_area + parts.pred_area - parts.inter_area;
  return {std::clamp(parts.inter_area / uni, 0.0, 1.0), false};
}

MetricScore ec_iou_bev(const OrientedBoxBEV& p, const OrientedBoxBEV& g,
                       const WeightConfig& cfg) {
  cfg.validate();
  const auto parts = overlap_parts(p, g);
  const double wa_gt = weighted_area(g, parts.gt, cfg, kGroundTruthStream);
  if (parts.inter.empty()) return {0.0, false};
  const double wa_inter =
      weighted_area(g, parts.inter, cfg, kIntersectionStream);
  return clamp_score(wa_inter /
                     (wa_gt + (parts.pred_area - parts.inter_area)));
}

double vertical_overlap(const Box3D& a, const Box3D& b) {
  return std::max(0.0, std::min(a.z_max(), b.z_max()) -
                           std::max(a.z_min(), b.z_min()));
}

MetricScore iou_3d(const Box3D& p, const Box3D& g) {
  const double v = vertical_overlap(p, g);
  const auto parts = overlap_parts(p.bev(), g.bev());
  const double inter = parts.inter_area * v;
  if (inter <= 0.0) return {0.0, false};
  const double uni = parts.gt_area * span(g) + (parts.pred_area * span(p) - inter);
  return {std::clamp(inter / uni, 0.0, 1.0), false};
}

MetricScore ec_iou_3d(const Box3D& p, const Box3D& g,
                      const WeightConfig& cfg) {
  cfg.validate();
  const double v = vertical_overlap(p, g);
  const auto parts = overlap_parts(p.bev(), g.bev());
  const double wa_gt =
      weighted_area(g.bev(), parts.gt, cfg, kGroundTruthStream) * span(g);
  if (parts.inter.empty() || v <= 0.0) return {0.0, false};
  const double wa_inter =
      weighted_area(g.bev(), parts.inter, cfg, kIntersectionStream) * v;
  return clamp_score(wa_inter / (wa_gt + (parts.pred_area * span(p) -
                                  parts.inter_area * v)));
}

std::size_t sweep_sample_count(double x_lo, double x_hi, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("sweep step must be positive");
  }
  if (!(x_hi >= x_lo)) {
    throw std::invalid_argument("sweep range must satisfy lo <= hi");
  }
  // The slack absorbs representation error in ranges like [5, 15] / 0.1.
  return static_cast<std::size_t>(std::floor((x_hi - x_lo) / step + 1e-9)) + 1;
}

SweepTable sweep_curve(const OrientedBoxBEV& g, double x_lo, double x_hi,
                       double step, const std::vector<double>& alphas,
                       const WeightConfig& base) {
  const std::size_t n = sweep_sample_count(x_lo, x_hi, step);
  SweepTable table{alphas, std::vector<SweepRow>(n)};
  parallel_for(n, thread_count_from_env(), [&](std::size_t i) {
    const double x = x_lo + static_cast<double>(i) * step;
    const OrientedBoxBEV pred = g.translated_to(x, g.y());
    SweepRow row{x, iou_bev(pred, g).value, {}};
    row.ec_iou.reserve(alphas.size());
    for (double a : alphas) {
      WeightConfig cfg = base;
      cfg.alpha = a;
      row.ec_iou.push_back(ec_iou_bev(pred, g, cfg).value);
    }
    table.rows[i] = std::move(row);
  });
  return table;
}

void SweepTable::write_csv(std::ostream& out) const {
  out << "x,iou";
  for (double a : alphas) out << ",eciou_a" << format_sig(a);
  out << '\n';
  for (const auto& row : rows) {
    out << format_sig(row.x) << ',' << format_sig(row.iou);
    for (double v : row.ec_iou) out << ',' << format_sig(v);
    out << '\n';
  }
}

}  // namespace eciou
