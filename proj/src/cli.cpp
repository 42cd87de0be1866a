#include "eciou/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eciou/eval_harness.hpp"
#include "eciou/format.hpp"
#include "eciou/metrics.hpp"
#include "eciou/parallel.hpp"
#include "eciou/regression_sim.hpp"

namespace eciou {

namespace {

// Usage problems detected after CLI11 has accepted the flags.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input or output failures.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WeightFlags {
  double alpha = 1.0;
  std::string method = "geometric";
  std::size_t samples = 6000;
  std::uint64_t seed = 0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--alpha", alpha, "Weighting exponent (>= 0)")
        ->capture_default_str();
    cmd.add_option("--method", method, "Mean-weight method")
        ->check(CLI::IsMember({"geometric", "arithmetic", "monte-carlo"}))
        ->capture_default_str();
    cmd.add_option("--samples", samples, "Monte Carlo samples per region")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
  }

  WeightConfig config() const {
    WeightConfig cfg{alpha, parse_mean_method(method), samples, seed};
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

OrientedBoxBEV bev_from_flag(const std::vector<double>& v, const char* flag) {
  if (v.size() != 5) {
    throw UsageError(std::string(flag) + " expects x,y,l,w,theta");
  }
  try {
    return OrientedBoxBEV(v[0], v[1], v[2], v[3], v[4]);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

Box3D box3d_from_flag(const std::vector<double>& v, const char* flag) {
  if (v.size() != 7) {
    throw UsageError(std::string(flag) + " expects x,y,z,l,w,h,theta");
  }
  try {
    return Box3D(v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

// Writes `content` to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& content,
          std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open " + path + " for writing");
  file << content;
  file.close();
  if (!file) throw DataError("failed writing " + path);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Ego-centric IoU toolbench", "eciou"};
  app.require_subcommand(1);

  // metric
  auto* metric = app.add_subcommand("metric", "IoU and EC-IoU of two boxes");
  std::vector<double> pred_flag;
  std::vector<double> gt_flag;
  std::string mode = "bev";
  WeightFlags metric_weights;
  metric
      ->add_option("--pred", pred_flag,
                   "Prediction: x,y,l,w,theta (bev) or x,y,z,l,w,h,theta (3d)")
      ->delimiter(',')
      ->required();
  metric->add_option("--gt", gt_flag, "Ground truth, same layout as --pred")
      ->delimiter(',')
      ->required();
  metric->add_option("--mode", mode, "bev or 3d")
      ->check(CLI::IsMember({"bev", "3d"}))
      ->capture_default_str();
  metric_weights.add_to(*metric);

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "Slide a prediction along x past a ground truth; CSV out");
  std::vector<double> sweep_gt{10.0, 0.0, 4.0, 2.0, 0.0};
  std::vector<double> sweep_range{5.0, 15.0};
  double sweep_step = 0.1;
  std::vector<double> sweep_alphas{1.0, 2.0, 4.0, 8.0};
  std::string sweep_out;
  WeightFlags sweep_weights;
  sweep->add_option("--gt", sweep_gt, "Ground truth x,y,l,w,theta")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--range", sweep_range, "lo,hi of the prediction center x")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--step", sweep_step, "Sample spacing in meters")
      ->capture_default_str();
  sweep->add_option("--alphas", sweep_alphas, "Comma-separated exponents")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV path (default: stdout)");
  sweep_weights.add_to(*sweep);

  // sim
  auto* sim = app.add_subcommand(
      "sim", "Anchor-to-target box regression under the six losses; CSV out");
  std::string sim_config;
  std::string sim_out;
  std::string sim_kinds = "iou,ec-iou,diou,ec-diou,eiou,ec-eiou";
  sim->add_option("--config", sim_config, "Scenario JSON (default: built-in)")
      ->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "CSV path (default: stdout)");
  sim->add_option("--kinds", sim_kinds, "Comma-separated loss kinds")
      ->capture_default_str();

  // eval
  auto* eval = app.add_subcommand(
      "eval", "AP40 / EC-AP40 and TP-metric means over record files; JSON out");
  std::string preds_path;
  std::string gts_path;
  std::string eval_classes;
  std::vector<double> eval_thresholds;
  std::string affinity = "iou";
  std::string eval_mode = "3d";
  double tp_dist = 2.0;
  WeightFlags eval_weights;
  eval->add_option("--preds", preds_path, "Prediction record file")->required();
  eval->add_option("--gts", gts_path, "Ground-truth record file")->required();
  eval->add_option("--classes", eval_classes,
                   "Comma-separated classes (default: all labels seen)");
  eval->add_option("--thresholds", eval_thresholds,
                   "Affinity thresholds aligned with --classes "
                   "(default: car 0.7, pedestrian 0.5, others 0.5)")
      ->delimiter(',');
  eval->add_option("--affinity", affinity, "Affinity reported in counts")
      ->check(CLI::IsMember({"iou", "ec-iou"}))
      ->capture_default_str();
  eval->add_option("--mode", eval_mode, "Overlap in bev or 3d")
      ->check(CLI::IsMember({"bev", "3d"}))
      ->capture_default_str();
  eval->add_option("--tp-dist", tp_dist,
                   "Center-distance threshold for TP metrics (m)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_weights.add_to(*eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (metric->parsed()) {
      const WeightConfig cfg = metric_weights.config();
      MetricScore iou;
      MetricScore ec;
      if (mode == "bev") {
        const auto p = bev_from_flag(pred_flag, "--pred");
        const auto g = bev_from_flag(gt_flag, "--gt");
        iou = iou_bev(p, g);
        ec = ec_iou_bev(p, g, cfg);
      } else {
        const auto p = box3d_from_flag(pred_flag, "--pred");
        const auto g = box3d_from_flag(gt_flag, "--gt");
        iou = iou_3d(p, g);
        ec = ec_iou_3d(p, g, cfg);
      }
      out << "iou=" << format_fixed(iou.value) << " ec_iou="
          << format_fixed(ec.value)
          << " clamped=" << (ec.clamped ? "true" : "false") << '\n';
    } else if (sweep->parsed()) {
      const auto g = bev_from_flag(sweep_gt, "--gt");
      if (sweep_range.size() != 2) throw UsageError("--range expects lo,hi");
      SweepTable table;
      try {
        table = sweep_curve(g, sweep_range[0], sweep_range[1], sweep_step,
                            sweep_alphas, sweep_weights.config());
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      std::ostringstream csv;
      table.write_csv(csv);
      emit(sweep_out, csv.str(), out);
    } else if (sim->parsed()) {
      ScenarioConfig cfg;
      if (!sim_config.empty()) {
        std::ifstream in(sim_config);
        if (!in) throw DataError("cannot read " + sim_config);
        std::stringstream text;
        text << in.rdbuf();
        try {
          cfg = parse_scenario_config(text.str());
        } catch (const ConfigError& e) {
          throw UsageError(e.what());
        }
      }
      std::vector<LossKind> kinds;
      try {
        for (const auto& name : split_list(sim_kinds)) {
          kinds.push_back(LossKind::parse(name));
        }
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (kinds.empty()) throw UsageError("--kinds is empty");
      const CurveSet curves = simulate(cfg, kinds, thread_count_from_env());
      std::size_t failures = 0;
      for (const auto& s : curves.series) failures += s.failed_count;
      err << "cases=" << build_scenario(cfg).size()
          << " failures=" << failures << '\n';
      std::ostringstream csv;
      curves.write_csv(csv);
      emit(sim_out, csv.str(), out);
    } else if (eval->parsed()) {
      EvalOptions opts;
      opts.classes = split_list(eval_classes);
      opts.thresholds = default_class_thresholds();
      if (!eval_thresholds.empty()) {
        if (eval_thresholds.size() != opts.classes.size()) {
          throw UsageError("--thresholds needs one value per --classes entry");
        }
        for (std::size_t i = 0; i < opts.classes.size(); ++i) {
          if (!(eval_thresholds[i] > 0.0 && eval_thresholds[i] < 1.0)) {
            throw UsageError("thresholds must lie in (0, 1)");
          }
          opts.thresholds[opts.classes[i]] = eval_thresholds[i];
        }
      }
      opts.affinity = affinity == "iou" ? Affinity::kIoU : Affinity::kEcIoU;
      opts.mode = eval_mode == "bev" ? OverlapMode::kBev : OverlapMode::k3d;
      opts.weights = eval_weights.config();
      opts.tp_center_distance = tp_dist;
      std::vector<DetectionRecord> preds;
      std::vector<DetectionRecord> gts;
      try {
        preds = parse_records(preds_path, RecordKind::kPredictions);
      } catch (const ParseError& e) {
        throw DataError(preds_path + ": " + e.what());
      }
      try {
        gts = parse_records(gts_path, RecordKind::kGroundTruths);
      } catch (const ParseError& e) {
        throw DataError(gts_path + ": " + e.what());
      }
      out << evaluate(preds, gts, opts).to_json() << '\n';
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateDistanceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace eciou
