#include "eciou/eval_harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eciou/format.hpp"
#include "eciou/metrics.hpp"

namespace eciou {

namespace {

double parse_number(const std::string& token, std::size_t line,
                    const char* field) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(line, std::string("invalid ") + field + " '" + token + "'");
  }
  return v;
}

// Prediction indices by descending score, ties by index.
std::vector<std::size_t> score_order(const std::vector<DetectionRecord>& preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].score.value_or(0.0) > preds[b].score.value_or(0.0);
  });
  return order;
}

// Records grouped by frame id; frames come back in lexicographic order.
std::map<std::string, std::vector<DetectionRecord>> by_frame(
    const std::vector<DetectionRecord>& records, const std::string* label) {
  std::map<std::string, std::vector<DetectionRecord>> out;
  for (const auto& r : records) {
    if (label == nullptr || r.class_label == *label) {
      out[r.frame_id].push_back(r);
    }
  }
  return out;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return round_sig(*v);
}

std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& x : v) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(line == 0 ? message
                                   : "line " + std::to_string(line) + ": " +
                                         message),
      line_(line) {}

std::vector<DetectionRecord> parse_records(std::istream& in, RecordKind kind) {
  const std::size_t expected = kind == RecordKind::kPredictions ? 10 : 9;
  std::vector<DetectionRecord> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream fields(raw);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != expected) {
      throw ParseError(line_no, "expected " + std::to_string(expected) +
                                    " fields, found " +
                                    std::to_string(tok.size()));
    }
    const double x = parse_number(tok[2], line_no, "x");
    const double y = parse_number(tok[3], line_no, "y");
    const double z = parse_number(tok[4], line_no, "z");
    const double l = parse_number(tok[5], line_no, "l");
    const double w = parse_number(tok[6], line_no, "w");
    const double h = parse_number(tok[7], line_no, "h");
    const double theta = parse_number(tok[8], line_no, "theta");
    std::optional<double> score;
    if (kind == RecordKind::kPredictions) {
      score = parse_number(tok[9], line_no, "score");
      if (*score < 0.0 || *score > 1.0) {
        throw ParseError(line_no, "score " + tok[9] + " outside [0, 1]");
      }
    }
    try {
      out.push_back({tok[0], tok[1], Box3D(x, y, z, l, w, h, theta), score});
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

std::vector<DetectionRecord> parse_records(const std::filesystem::path& path,
                                           RecordKind kind) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return parse_records(in, kind);
}

double affinity_score(const DetectionRecord& pred, const DetectionRecord& gt,
                      const MatchOptions& opts) {
  if (opts.mode == OverlapMode::kBev) {
    return opts.affinity == Affinity::kIoU
               ? iou_bev(pred.box.bev(), gt.box.bev()).value
               : ec_iou_bev(pred.box.bev(), gt.box.bev(), opts.weights).value;
  }
  return opts.affinity == Affinity::kIoU
             ? iou_3d(pred.box, gt.box).value
             : ec_iou_3d(pred.box, gt.box, opts.weights).value;
}

MatchResult match_greedy(const std::vector<DetectionRecord>& preds,
                         const std::vector<DetectionRecord>& gts,
                         const MatchOptions& opts) {
  MatchResult result;
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t p : score_order(preds)) {
    std::optional<std::size_t> best;
    double best_aff = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double aff = affinity_score(preds[p], gts[g], opts);
      if (aff >= opts.threshold && aff > best_aff) {
        best = g;
        best_aff = aff;
      }
    }
    if (best) {
      taken[*best] = true;
      result.matches.push_back({p, *best, best_aff});
    } else {
      result.false_positives.push_back(p);
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!taken[g]) result.false_negatives.push_back(g);
  }
  return result;
}

std::optional<double> average_precision_40(std::vector<ScoredOutcome> outcomes,
                                           std::size_t gt_count) {
  if (gt_count == 0) return std::nullopt;
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const ScoredOutcome& a, const ScoredOutcome& b) {
                     return a.score > b.score;
                   });
  const double n_gt = static_cast<double>(gt_count);
  std::vector<double> recall;
  std::vector<double> precision;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].true_positive) ++tp;
    recall.push_back(static_cast<double>(tp) / n_gt);
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
  }
  // Suffix maximum turns precision into its interpolated envelope.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  constexpr int kRecallPoints = 40;
  double sum = 0.0;
  std::size_t cursor = 0;
  for (int k = 1; k <= kRecallPoints; ++k) {
    const double r = static_cast<double>(k) / kRecallPoints;
    while (cursor < recall.size() && recall[cursor] < r - 1e-12) ++cursor;
    if (cursor < recall.size()) sum += precision[cursor];
  }
  return sum / kRecallPoints;
}

TpMetricMeans tp_metric_means(const std::vector<DetectionRecord>& preds,
                              const std::vector<DetectionRecord>& gts,
                              double center_dist_threshold,
                              const WeightConfig& cfg) {
  if (!(center_dist_threshold > 0.0)) {
    throw std::invalid_argument("center distance threshold must be > 0");
  }
  const auto pred_frames = by_frame(preds, nullptr);
  const auto gt_frames = by_frame(gts, nullptr);
  TpMetricMeans out;
  double iou_sum = 0.0;
  double ec_sum = 0.0;
  for (const auto& [frame, fpreds] : pred_frames) {
    auto it = gt_frames.find(frame);
    if (it == gt_frames.end()) continue;
    const auto& fgts = it->second;
    std::vector<bool> taken(fgts.size(), false);
    for (std::size_t p : score_order(fpreds)) {
      std::optional<std::size_t> best;
      double best_dist = std::numeric_limits<double>::infinity();
      const Vec2 pc = fpreds[p].box.bev().center();
      for (std::size_t g = 0; g < fgts.size(); ++g) {
        if (taken[g]) continue;
        const Vec2 d = pc - fgts[g].box.bev().center();
        const double dist = std::sqrt(norm_sq(d));
        if (dist <= center_dist_threshold && dist < best_dist) {
          best = g;
          best_dist = dist;
        }
      }
      if (!best) continue;
      taken[*best] = true;
      ++out.true_positives;
      iou_sum += iou_3d(fpreds[p].box, fgts[*best].box).value;
      ec_sum += ec_iou_3d(fpreds[p].box, fgts[*best].box, cfg).value;
    }
  }
  if (out.true_positives > 0) {
    const double n = static_cast<double>(out.true_positives);
    out.mean_iou = iou_sum / n;
    out.mean_ec_iou = ec_sum / n;
  }
  return out;
}

std::map<std::string, double> default_class_thresholds() {
  return {{"pedestrian", 0.5}, {"car", 0.7}};
}

double EvalOptions::threshold_for(const std::string& label) const {
  auto it = thresholds.find(label);
  return it == thresholds.end() ? default_threshold : it->second;
}

EvalReport evaluate(const std::vector<DetectionRecord>& preds,
                    const std::vector<DetectionRecord>& gts,
                    const EvalOptions& opts) {
  std::vector<std::string> labels = opts.classes;
  if (labels.empty()) {
    std::set<std::string> seen;
    for (const auto& r : gts) seen.insert(r.class_label);
    for (const auto& r : preds) seen.insert(r.class_label);
    labels.assign(seen.begin(), seen.end());
  }

  EvalReport report;
  std::vector<std::optional<double>> aps;
  std::vector<std::optional<double>> ec_aps;
  for (const auto& label : labels) {
    const auto pred_frames = by_frame(preds, &label);
    const auto gt_frames = by_frame(gts, &label);
    std::set<std::string> frames;
    for (const auto& [f, _] : pred_frames) frames.insert(f);
    for (const auto& [f, _] : gt_frames) frames.insert(f);

    ClassReport cls;
    for (const auto& [f, v] : gt_frames) cls.gt_count += v.size();

    for (Affinity aff : {Affinity::kIoU, Affinity::kEcIoU}) {
      MatchOptions mopts{aff, opts.mode, opts.threshold_for(label),
                         opts.weights};
      std::vector<ScoredOutcome> outcomes;
      MatchCounts counts;
      static const std::vector<DetectionRecord> kNone;
      for (const auto& f : frames) {
        auto pit = pred_frames.find(f);
        auto git = gt_frames.find(f);
        const auto& fp = pit == pred_frames.end() ? kNone : pit->second;
        const auto& fg = git == gt_frames.end() ? kNone : git->second;
        const auto m = match_greedy(fp, fg, mopts);
        for (const auto& match : m.matches) {
          outcomes.push_back({*fp[match.pred].score, true});
        }
        for (std::size_t p : m.false_positives) {
          outcomes.push_back({*fp[p].score, false});
        }
        counts.tp += m.matches.size();
        counts.fp += m.false_positives.size();
        counts.fn += m.false_negatives.size();
      }
      const auto ap = average_precision_40(std::move(outcomes), cls.gt_count);
      if (aff == Affinity::kIoU) {
        cls.ap40_iou = ap;
      } else {
        cls.ap40_ec_iou = ap;
      }
      if (aff == opts.affinity) cls.counts = counts;
    }

    std::vector<DetectionRecord> class_preds;
    std::vector<DetectionRecord> class_gts;
    for (const auto& r : preds) {
      if (r.class_label == label) class_preds.push_back(r);
    }
    for (const auto& r : gts) {
      if (r.class_label == label) class_gts.push_back(r);
    }
    const auto tp = tp_metric_means(class_preds, class_gts,
                                    opts.tp_center_distance, opts.weights);
    cls.tp_mean_iou = tp.mean_iou;
    cls.tp_mean_ec_iou = tp.mean_ec_iou;

    aps.push_back(cls.ap40_iou);
    ec_aps.push_back(cls.ap40_ec_iou);
    report.classes.emplace(label, cls);
  }
  report.map40 = mean_of_defined(aps);
  report.ec_map40 = mean_of_defined(ec_aps);
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json doc;
  doc["classes"] = nlohmann::json::object();
  for (const auto& [label, c] : classes) {
    doc["classes"][label] = {
        {"ap40_iou", optional_number(c.ap40_iou)},
        {"ap40_ec_iou", optional_number(c.ap40_ec_iou)},
        {"tp_mean_iou", optional_number(c.tp_mean_iou)},
        {"tp_mean_ec_iou", optional_number(c.tp_mean_ec_iou)},
        {"counts", {{"tp", c.counts.tp}, {"fp", c.counts.fp}, {"fn", c.counts.fn}}},
        {"gt_count", c.gt_count},
    };
  }
  doc["map40"] = optional_number(map40);
  doc["ec_map40"] = optional_number(ec_map40);
  return doc.dump(2);
}

}  // namespace eciou
