#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "eciou/geometry.hpp"

namespace eciou {

/// How the mean weight of a region is obtained.
enum class MeanMethod {
  kGeometric,   // geometric mean of the vertex weights
  kArithmetic,  // arithmetic mean of the vertex weights
  kMonteCarlo,  // sample mean over uniform points in the region
};

std::string_view to_string(MeanMethod m);
// Accepts "geometric", "arithmetic" and "monte-carlo"; throws
// std::invalid_argument otherwise.
MeanMethod parse_mean_method(std::string_view name);

struct WeightConfig {
  double alpha = 1.0;
  MeanMethod method = MeanMethod::kGeometric;
  std::size_t mc_samples = 6000;
  std::uint64_t mc_seed = 0;

  // Throws std::invalid_argument on alpha < 0 or mc_samples == 0.
  void validate() const;
};

// Raised whenever a distance to the ego falls below kMinEgoDistance, where
// the weight is undefined.
class DegenerateDistanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EmptyPolygonError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kMinEgoDistance = 1e-9;

/// [rho(gt center) / rho(pt)]^alpha.
double point_weight(const OrientedBoxBEV& gt, Vec2 pt, double alpha);

double geometric_mean(std::span<const double> values);
double arithmetic_mean(std::span<const double> values);

/// Geometric or arithmetic mean of the weights at the vertices of `poly`.
/// For kMonteCarlo the geometric mean is returned; the sampling estimate
/// only exists at the weighted_area level.
double mean_vertex_weight(const OrientedBoxBEV& gt, const ConvexPolygon& poly,
                          const WeightConfig& cfg);

/// Importance-weighted area of `poly` (expected to lie inside `gt`).
///
/// Vertex-mean methods return mean_vertex_weight * polygon_area. The Monte
/// Carlo method averages point_weight over cfg.mc_samples uniform samples,
/// drawn from a generator keyed on (cfg.mc_seed, stream) so that separate
/// polygons get independent but reproducible draws. Empty input gives 0.
double weighted_area(const OrientedBoxBEV& gt, const ConvexPolygon& poly,
                     const WeightConfig& cfg, std::uint64_t stream = 0);

struct WeightExtremes {
  double min_weight;
  double max_weight;
  Vec2 nearest_point;
  Vec2 farthest_point;
};

// Extreme weights over the whole gt rectangle. Throws
// DegenerateDistanceError if the ego lies inside or on the box.
WeightExtremes weight_extremes(const OrientedBoxBEV& gt, double alpha);

}  // namespace eciou
