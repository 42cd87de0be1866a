#include "eciou/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "eciou/sampling.hpp"

namespace eciou {

namespace {

constexpr double kMinEgoDistanceSq = kMinEgoDistance * kMinEgoDistance;

double checked_dist_sq(Vec2 p, const char* what) {
  const double d2 = norm_sq(p);
  if (d2 < kMinEgoDistanceSq) {
    throw DegenerateDistanceError(std::string(what) +
                                  " lies at the ego position");
  }
  return d2;
}

}  // namespace

std::string_view to_string(MeanMethod m) {
  switch (m) {
    case MeanMethod::kGeometric:
      return "geometric";
    case MeanMethod::kArithmetic:
      return "arithmetic";
    case MeanMethod::kMonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

MeanMethod parse_mean_method(std::string_view name) {
  if (name == "geometric") return MeanMethod::kGeometric;
  if (name == "arithmetic") return MeanMethod::kArithmetic;
  if (name == "monte-carlo") return MeanMethod::kMonteCarlo;
  throw std::invalid_argument("unknown mean method: " + std::string(name));
}

void WeightConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be finite and >= 0");
  }
  if (mc_samples < 1) {
    throw std::invalid_argument("mc_samples must be >= 1");
  }
}

double point_weight(const OrientedBoxBEV& gt, Vec2 pt, double alpha) {
  const double center_sq = checked_dist_sq(gt.center(), "ground-truth center");
  const double pt_sq = checked_dist_sq(pt, "weighted point");
  return std::pow(center_sq / pt_sq, 0.5 * alpha);
}

double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw EmptyPolygonError("geometric mean of no values");
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

double arithmetic_mean(std::span<const double> values) {
  if (values.empty()) throw EmptyPolygonError("arithmetic mean of no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double mean_vertex_weight(const OrientedBoxBEV& gt, const ConvexPolygon& poly,
                          const WeightConfig& cfg) {
  if (poly.empty()) throw EmptyPolygonError("mean weight of an empty polygon");
  const double center_sq = checked_dist_sq(gt.center(), "ground-truth center");
  const auto& verts = poly.vertices();
  const double m = static_cast<double>(verts.size());

  if (cfg.method == MeanMethod::kArithmetic) {
    double sum = 0.0;
    for (const Vec2& v : verts) {
      sum += std::pow(center_sq / checked_dist_sq(v, "polygon vertex"),
                      0.5 * cfg.alpha);
    }
    return sum / m;
  }

  // (prod_i w_i)^(1/m) with w_i = (rc^2 / ri^2)^(alpha/2): a single pow.
  double ratio_product = 1.0;
  for (const Vec2& v : verts) {
    ratio_product *= center_sq / checked_dist_sq(v, "polygon vertex");
  }
  return std::pow(ratio_product, 0.5 * cfg.alpha / m);
}

double weighted_area(const OrientedBoxBEV& gt, const ConvexPolygon& poly,
                     const WeightConfig& cfg, std::uint64_t stream) {
  if (poly.empty()) return 0.0;
  const double area = polygon_area(poly);
  if (cfg.method != MeanMethod::kMonteCarlo) {
    return mean_vertex_weight(gt, poly, cfg) * area;
  }

  const double center_sq = checked_dist_sq(gt.center(), "ground-truth center");
  const double half_alpha = 0.5 * cfg.alpha;
  double sum = 0.0;
  PolygonSampler sampler(poly, cfg.mc_seed, stream);
  for (std::size_t i = 0; i < cfg.mc_samples; ++i) {
    const Vec2 p = sampler.next();
    sum += std::pow(center_sq / checked_dist_sq(p, "sampled point"),
                    half_alpha);
  }
  return sum / static_cast<double>(cfg.mc_samples) * area;
}

WeightExtremes weight_extremes(const OrientedBoxBEV& gt, double alpha) {
  const double center_sq = checked_dist_sq(gt.center(), "ground-truth center");
  const double c = std::cos(gt.theta());
  const double s = std::sin(gt.theta());
  // Ego position in box-local coordinates.
  const Vec2 rel = Vec2{0.0, 0.0} - gt.center();
  const Vec2 ego{c * rel.x + s * rel.y, -s * rel.x + c * rel.y};
  const double hl = 0.5 * gt.l();
  const double hw = 0.5 * gt.w();

  const Vec2 near_local{std::clamp(ego.x, -hl, hl), std::clamp(ego.y, -hw, hw)};
  const Vec2 far_local{ego.x > 0.0 ? -hl : hl, ego.y > 0.0 ? -hw : hw};

  auto to_world = [&](Vec2 p) {
    return Vec2{gt.x() + c * p.x - s * p.y, gt.y() + s * p.x + c * p.y};
  };
  const Vec2 near_pt = to_world(near_local);
  const Vec2 far_pt = to_world(far_local);

  // Distances are taken in the local frame, where they are exact.
  const double near_sq = norm_sq(ego - near_local);
  const double far_sq = norm_sq(ego - far_local);
  if (near_sq < kMinEgoDistanceSq) {
    throw DegenerateDistanceError("ego lies inside or on the ground truth");
  }
  return {std::pow(center_sq / far_sq, 0.5 * alpha),
          std::pow(center_sq / near_sq, 0.5 * alpha), near_pt, far_pt};
}

}  // namespace eciou
