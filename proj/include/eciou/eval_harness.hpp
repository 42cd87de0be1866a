#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eciou/geometry.hpp"
#include "eciou/weighting.hpp"

namespace eciou {

struct DetectionRecord {
  std::string frame_id;
  std::string class_label;
  Box3D box;
  std::optional<double> score;  // set iff the record is a prediction
};

enum class RecordKind { kPredictions, kGroundTruths };

class ParseError : public std::runtime_error {
 public:
  // line 0 means the error is not tied to a line (e.g. unreadable file).
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads `frame_id class x y z l w h theta [score]` lines. Blank lines and
/// `#` comments are skipped. Predictions need the score column (in [0, 1]),
/// ground truths must not have it. Errors carry the 1-based line number.
std::vector<DetectionRecord> parse_records(std::istream& in, RecordKind kind);
std::vector<DetectionRecord> parse_records(const std::filesystem::path& path,
                                           RecordKind kind);

enum class Affinity { kIoU, kEcIoU };
enum class OverlapMode { kBev, k3d };

struct MatchOptions {
  Affinity affinity = Affinity::kIoU;
  OverlapMode mode = OverlapMode::k3d;
  double threshold = 0.5;
  WeightConfig weights;
};

double affinity_score(const DetectionRecord& pred, const DetectionRecord& gt,
                      const MatchOptions& opts);

struct Match {
  std::size_t pred;
  std::size_t gt;
  double affinity;
};

struct MatchResult {
  std::vector<Match> matches;
  std::vector<std::size_t> false_positives;  // prediction indices
  std::vector<std::size_t> false_negatives;  // ground-truth indices
};

/// Score-greedy one-to-one matching within one frame and class.
///
/// Predictions are visited by descending score (ties by index); each takes
/// the free ground truth with the highest affinity, provided it reaches the
/// threshold. Indices refer to the input vectors.
MatchResult match_greedy(const std::vector<DetectionRecord>& preds,
                         const std::vector<DetectionRecord>& gts,
                         const MatchOptions& opts);

struct ScoredOutcome {
  double score;
  bool true_positive;
};

/// Mean interpolated precision at recall 1/40, 2/40, ..., 1, where the
/// interpolated precision at r is the best precision at any recall >= r.
/// Returns nullopt when there are no ground truths.
std::optional<double> average_precision_40(std::vector<ScoredOutcome> outcomes,
                                           std::size_t gt_count);

struct TpMetricMeans {
  std::optional<double> mean_iou;
  std::optional<double> mean_ec_iou;
  std::size_t true_positives = 0;
};

/// Center-distance matching (greedy by score, nearest free ground truth
/// within `center_dist_threshold` in BEV), then means of iou_3d and
/// ec_iou_3d over the matched pairs.
TpMetricMeans tp_metric_means(const std::vector<DetectionRecord>& preds,
                              const std::vector<DetectionRecord>& gts,
                              double center_dist_threshold,
                              const WeightConfig& cfg);

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct ClassReport {
  std::optional<double> ap40_iou;
  std::optional<double> ap40_ec_iou;
  std::optional<double> tp_mean_iou;
  std::optional<double> tp_mean_ec_iou;
  MatchCounts counts;  // under the configured affinity
  std::size_t gt_count = 0;
};

struct EvalReport {
  std::map<std::string, ClassReport> classes;
  std::optional<double> map40;
  std::optional<double> ec_map40;

  std::string to_json() const;
};

struct EvalOptions {
  std::vector<std::string> classes;  // empty: every label in the inputs
  std::map<std::string, double> thresholds;
  double default_threshold = 0.5;
  Affinity affinity = Affinity::kIoU;
  OverlapMode mode = OverlapMode::k3d;
  WeightConfig weights;
  double tp_center_distance = 2.0;

  double threshold_for(const std::string& label) const;
};

// 0.5 for pedestrian and 0.7 for car.
std::map<std::string, double> default_class_thresholds();

EvalReport evaluate(const std::vector<DetectionRecord>& preds,
                    const std::vector<DetectionRecord>& gts,
                    const EvalOptions& opts);

}  // namespace eciou
