#include "eciou/regression_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "eciou/format.hpp"
#include "eciou/metrics.hpp"
#include "eciou/parallel.hpp"

namespace eciou {

namespace {

using nlohmann::json;

// Per-case metric series, one entry per trajectory step.
struct CaseSeries {
  std::vector<double> iou;
  std::vector<double> ec_iou;
  bool failed = false;
};

CaseSeries case_series(const Trajectory& t, double eval_alpha) {
  CaseSeries s;
  if (t.failed) {
    s.failed = true;
    return s;
  }
  WeightConfig cfg;
  cfg.alpha = eval_alpha;
  cfg.method = MeanMethod::kGeometric;
  s.iou.reserve(t.steps.size());
  s.ec_iou.reserve(t.steps.size());
  for (const auto& step : t.steps) {
    s.iou.push_back(iou_bev(step.box, t.target).value);
    s.ec_iou.push_back(ec_iou_bev(step.box, t.target, cfg).value);
  }
  return s;
}

// Accumulates case series in the order they are added.
class CurveAccumulator {
 public:
  CurveAccumulator(LossKind kind, std::size_t iterations)
      : kind_(kind), iou_sum_(iterations + 1, 0.0),
        ec_sum_(iterations + 1, 0.0) {}

  void add(const CaseSeries& s) {
    ++cases_;
    if (s.failed || s.iou.size() != iou_sum_.size()) {
      ++failed_;
      return;
    }
    for (std::size_t i = 0; i < iou_sum_.size(); ++i) {
      iou_sum_[i] += s.iou[i];
      ec_sum_[i] += s.ec_iou[i];
    }
  }

  CurveSeries finish() const {
    CurveSeries out{kind_, {}, cases_, failed_};
    const std::size_t ok = cases_ - failed_;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < iou_sum_.size(); ++i) {
      out.points.push_back(
          {i, ok ? iou_sum_[i] / static_cast<double>(ok) : nan,
           ok ? ec_sum_[i] / static_cast<double>(ok) : nan});
    }
    return out;
  }

 private:
  LossKind kind_;
  std::vector<double> iou_sum_;
  std::vector<double> ec_sum_;
  std::size_t cases_ = 0;
  std::size_t failed_ = 0;
};

std::vector<Dims> read_dims(const json& j, const char* key) {
  std::vector<Dims> out;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2) {
      throw ConfigError(std::string(key) + " entries must be [l, w] pairs");
    }
    out.push_back({item.at(0).get<double>(), item.at(1).get<double>()});
  }
  return out;
}

std::size_t read_count(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError(std::string(key) + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

void require_array(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string(key) + " must be an array");
}

}  // namespace

double StepRule::rate_at(std::size_t iteration, std::size_t total) const {
  double r = rate;
  for (double f : decay_fractions) {
    if (static_cast<double>(iteration) >= f * static_cast<double>(total)) {
      r *= decay_factor;
    }
  }
  return r;
}

void ScenarioConfig::validate() const {
  if (target_dims.empty() || target_thetas.empty() || anchor_ratios.empty() ||
      anchor_scales.empty()) {
    throw std::invalid_argument("scenario lists must be non-empty");
  }
  if (grid_points_per_axis < 1 || iterations < 1) {
    throw std::invalid_argument("scenario counts must be >= 1");
  }
  if (!(grid_extent > 0.0)) {
    throw std::invalid_argument("grid_extent must be positive");
  }
  if (!(step_rule.rate > 0.0)) {
    throw std::invalid_argument("step_rule.rate must be positive");
  }
  if (!(eval_alpha >= 0.0) || !(loss_alpha >= 0.0)) {
    throw std::invalid_argument("alphas must be >= 0");
  }
  if (!(min_dimension > 0.0)) {
    throw std::invalid_argument("min_dimension must be positive");
  }
  if (!(gradient_step > 0.0)) {
    throw std::invalid_argument("gradient_step must be positive");
  }
  if (!(min_dimension > gradient_step)) {
    throw std::invalid_argument("min_dimension must exceed gradient_step");
  }
  for (const Dims& d : target_dims) {
    if (!(d.l > 0.0) || !(d.w > 0.0)) {
      throw std::invalid_argument("target_dims must be positive");
    }
  }
  for (const Dims& d : anchor_ratios) {
    if (!(d.l > 0.0) || !(d.w > 0.0)) {
      throw std::invalid_argument("anchor_ratios must be positive");
    }
  }
  for (double s : anchor_scales) {
    if (!(s > 0.0)) throw std::invalid_argument("anchor_scales must be positive");
  }
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ScenarioConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "target_center") {
        if (!value.is_array() || value.size() != 2) {
          throw ConfigError("target_center must be [x, y]");
        }
        cfg.target_center = {value[0].get<double>(), value[1].get<double>()};
      } else if (key == "target_dims") {
        require_array(value, "target_dims");
        cfg.target_dims = read_dims(value, "target_dims");
      } else if (key == "target_thetas") {
        require_array(value, "target_thetas");
        cfg.target_thetas = value.get<std::vector<double>>();
      } else if (key == "grid_extent") {
        cfg.grid_extent = value.get<double>();
      } else if (key == "grid_points_per_axis") {
        cfg.grid_points_per_axis = read_count(value, "grid_points_per_axis");
      } else if (key == "anchor_ratios") {
        require_array(value, "anchor_ratios");
        cfg.anchor_ratios = read_dims(value, "anchor_ratios");
      } else if (key == "anchor_scales") {
        require_array(value, "anchor_scales");
        cfg.anchor_scales = value.get<std::vector<double>>();
      } else if (key == "iterations") {
        cfg.iterations = read_count(value, "iterations");
      } else if (key == "step_rule") {
        if (!value.is_object()) throw ConfigError("step_rule must be an object");
        for (const auto& [rk, rv] : value.items()) {
          if (rk == "rate") {
            cfg.step_rule.rate = rv.get<double>();
          } else if (rk == "decay_fractions") {
            require_array(rv, "step_rule.decay_fractions");
            cfg.step_rule.decay_fractions = rv.get<std::vector<double>>();
          } else if (rk == "decay_factor") {
            cfg.step_rule.decay_factor = rv.get<double>();
          } else {
            throw ConfigError("unknown step_rule key: " + rk);
          }
        }
      } else if (key == "eval_alpha") {
        cfg.eval_alpha = value.get<double>();
      } else if (key == "loss_alpha") {
        cfg.loss_alpha = value.get<double>();
      } else if (key == "min_dimension") {
        cfg.min_dimension = value.get<double>();
      } else if (key == "gradient_step") {
        cfg.gradient_step = value.get<double>();
      } else if (key == "optimize_theta") {
        cfg.optimize_theta = value.get<bool>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a wrong value type: ") +
                      e.what());
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::vector<RegressionCase> build_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.grid_points_per_axis;
  auto grid_coord = [&](double center, std::size_t i) {
    if (n == 1) return center;
    return center - 0.5 * cfg.grid_extent +
           cfg.grid_extent * static_cast<double>(i) /
               static_cast<double>(n - 1);
  };

  std::vector<OrientedBoxBEV> targets;
  for (const Dims& d : cfg.target_dims) {
    for (double theta : cfg.target_thetas) {
      targets.emplace_back(cfg.target_center.x, cfg.target_center.y, d.l, d.w,
                           theta);
    }
  }

  std::vector<RegressionCase> cases;
  cases.reserve(targets.size() * n * n * cfg.anchor_ratios.size() *
                cfg.anchor_scales.size());
  for (const auto& target : targets) {
    for (std::size_t row = 0; row < n; ++row) {
      const double y = grid_coord(cfg.target_center.y, row);
      for (std::size_t col = 0; col < n; ++col) {
        const double x = grid_coord(cfg.target_center.x, col);
        for (const Dims& ratio : cfg.anchor_ratios) {
          for (double scale : cfg.anchor_scales) {
            cases.push_back({OrientedBoxBEV(x, y, ratio.l * scale,
                                            ratio.w * scale, 0.0),
                             target, cases.size()});
          }
        }
      }
    }
  }
  return cases;
}

Trajectory run_case(const RegressionCase& c, const LossKind& kind,
                    const ScenarioConfig& cfg) {
  WeightConfig loss_cfg;
  loss_cfg.alpha = cfg.loss_alpha;
  loss_cfg.method = MeanMethod::kGeometric;

  Trajectory traj{c.case_id, c.target, {}, false, {}};
  traj.steps.reserve(cfg.iterations + 1);
  try {
    OrientedBoxBEV box = c.anchor;
    double loss = loss_value(kind, box, c.target, loss_cfg);
    traj.steps.push_back({0, box, loss});
    for (std::size_t t = 0; t < cfg.iterations; ++t) {
      if (loss > 0.0) {
        const auto grad =
            loss_gradient(kind, box, c.target, loss_cfg, cfg.gradient_step)
                .as_array();
        const double rate = cfg.step_rule.rate_at(t, cfg.iterations);
        auto params = box.params();
        const std::size_t moved = cfg.optimize_theta ? 5 : 4;
        for (std::size_t i = 0; i < moved; ++i) params[i] -= rate * grad[i];
        params[2] = std::max(params[2], cfg.min_dimension);
        params[3] = std::max(params[3], cfg.min_dimension);
        box = OrientedBoxBEV::from_params(params);
        loss = loss_value(kind, box, c.target, loss_cfg);
      }
      traj.steps.push_back({t + 1, box, loss});
    }
  } catch (const std::exception& e) {
    traj.failed = true;
    traj.failure = e.what();
  }
  return traj;
}

CurveSet aggregate_curves(
    const std::vector<std::pair<LossKind, std::vector<Trajectory>>>& runs,
    double eval_alpha) {
  CurveSet out;
  for (const auto& [kind, trajectories] : runs) {
    std::vector<const Trajectory*> ordered;
    ordered.reserve(trajectories.size());
    for (const auto& t : trajectories) ordered.push_back(&t);
    std::sort(ordered.begin(), ordered.end(),
              [](const Trajectory* a, const Trajectory* b) {
                return a->case_id < b->case_id;
              });
    std::size_t iterations = 0;
    for (const auto* t : ordered) {
      if (!t->failed && !t->steps.empty()) {
        iterations = t->steps.size() - 1;
        break;
      }
    }
    CurveAccumulator acc(kind, iterations);
    for (const auto* t : ordered) acc.add(case_series(*t, eval_alpha));
    out.series.push_back(acc.finish());
  }
  return out;
}

CurveSet simulate(const ScenarioConfig& cfg, const std::vector<LossKind>& kinds,
                  unsigned threads) {
  const auto cases = build_scenario(cfg);
  constexpr std::size_t kChunk = 256;
  CurveSet out;
  for (const LossKind& kind : kinds) {
    CurveAccumulator acc(kind, cfg.iterations);
    std::vector<CaseSeries> chunk;
    for (std::size_t begin = 0; begin < cases.size(); begin += kChunk) {
      const std::size_t count = std::min(kChunk, cases.size() - begin);
      chunk.assign(count, {});
      parallel_for(count, threads, [&](std::size_t i) {
        chunk[i] = case_series(run_case(cases[begin + i], kind, cfg),
                               cfg.eval_alpha);
      });
      for (const auto& s : chunk) acc.add(s);
    }
    out.series.push_back(acc.finish());
  }
  return out;
}

void CurveSet::write_csv(std::ostream& out) const {
  out << "kind,iteration,mean_iou,mean_eciou\n";
  for (const auto& s : series) {
    const std::string name = s.kind.name();
    for (const auto& p : s.points) {
      out << name << ',' << p.iteration << ',' << format_sig(p.mean_iou) << ','
          << format_sig(p.mean_ec_iou) << '\n';
    }
  }
}

}  // namespace eciou
