#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eciou/geometry.hpp"
#include "eciou/losses.hpp"

namespace eciou {

struct Dims {
  double l;
  double w;
};

/// Learning rate schedule: `rate` until the first decay point, multiplied
/// by `decay_factor` at each listed fraction of the total iterations.
struct StepRule {
  double rate = 0.1;
  std::vector<double> decay_fractions{0.8};
  double decay_factor = 0.1;

  double rate_at(std::size_t iteration, std::size_t total) const;
};

struct ScenarioConfig {
  Vec2 target_center{6.0, 6.0};
  std::vector<Dims> target_dims{{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}};
  std::vector<double> target_thetas{0.0, std::numbers::pi / 4.0};
  double grid_extent = 6.0;
  std::size_t grid_points_per_axis = 13;
  std::vector<Dims> anchor_ratios{{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}};
  std::vector<double> anchor_scales{0.5, 1.0, 2.0};
  std::size_t iterations = 180;
  StepRule step_rule;
  double eval_alpha = 4.0;
  // Exponent inside the EC losses.
  double loss_alpha = 1.0;
  // Floor applied to l and w after each update; must exceed gradient_step
  // so that every probe box stays valid.
  double min_dimension = 0.02;
  // Probe step of the central differences that drive each update. The
  // vertex-mean weight jumps when the intersection gains or loses a vertex,
  // and a probe much finer than the update straddles those jumps with a
  // huge difference quotient.
  double gradient_step = 1e-2;
  // When false the heading keeps its anchor value.
  bool optimize_theta = true;

  // Throws std::invalid_argument when a count or extent is out of range.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a JSON document whose keys are ScenarioConfig field names. Missing
// keys keep their defaults; unknown keys and wrong types raise ConfigError.
ScenarioConfig parse_scenario_config(const std::string& json_text);

struct RegressionCase {
  OrientedBoxBEV anchor;
  OrientedBoxBEV target;
  std::size_t case_id;
};

/// One axis-aligned anchor per (grid point, ratio, scale) for every target,
/// ordered by (target, grid row, grid column, ratio, scale). Anchor
/// dimensions are (ratio.l * scale, ratio.w * scale).
std::vector<RegressionCase> build_scenario(const ScenarioConfig& cfg);

struct TrajectoryStep {
  std::size_t iteration;
  OrientedBoxBEV box;
  double loss;
};

struct Trajectory {
  std::size_t case_id;
  OrientedBoxBEV target;
  std::vector<TrajectoryStep> steps;  // iterations + 1 entries unless failed
  bool failed = false;
  std::string failure;
};

/// Plain gradient descent p <- p - rate_t * grad on all five parameters.
/// A box with zero loss sits at the global minimum and is left in place.
/// A failing gradient marks the trajectory failed instead of throwing.
Trajectory run_case(const RegressionCase& c, const LossKind& kind,
                    const ScenarioConfig& cfg);

struct CurvePoint {
  std::size_t iteration;
  double mean_iou;
  double mean_ec_iou;
};

struct CurveSeries {
  LossKind kind;
  std::vector<CurvePoint> points;
  std::size_t case_count = 0;
  std::size_t failed_count = 0;
};

struct CurveSet {
  std::vector<CurveSeries> series;

  // `kind,iteration,mean_iou,mean_eciou`, values at 6 significant digits.
  void write_csv(std::ostream& out) const;
};

/// Per-iteration means of IoU and EC-IoU (geometric, alpha = eval_alpha)
/// across the non-failed trajectories of each kind. Sums run in case_id
/// order, whatever order the trajectories arrive in.
CurveSet aggregate_curves(
    const std::vector<std::pair<LossKind, std::vector<Trajectory>>>& runs,
    double eval_alpha);

/// Builds the scenario and runs every case under every kind on `threads`
/// workers, aggregating as it goes. Equivalent to run_case + aggregate_curves
/// without holding all trajectories in memory.
CurveSet simulate(const ScenarioConfig& cfg, const std::vector<LossKind>& kinds,
                  unsigned threads);

}  // namespace eciou
