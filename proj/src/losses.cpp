#include "eciou/losses.hpp"

#include <cmath>

#include "eciou/metrics.hpp"

namespace eciou {

std::string LossKind::name() const {
  std::string base;
  switch (family) {
    case LossFamily::kIoU:
      base = "iou";
      break;
    case LossFamily::kDIoU:
      base = "diou";
      break;
    case LossFamily::kEIoU:
      base = "eiou";
      break;
  }
  return ego_centric ? "ec-" + base : base;
}

LossKind LossKind::parse(std::string_view name) {
  for (const LossKind& k : all()) {
    if (k.name() == name) return k;
  }
  throw std::invalid_argument("unknown loss kind: " + std::string(name));
}

const std::array<LossKind, 6>& LossKind::all() {
  static const std::array<LossKind, 6> kinds{{{LossFamily::kIoU, false},
                                              {LossFamily::kIoU, true},
                                              {LossFamily::kDIoU, false},
                                              {LossFamily::kDIoU, true},
                                              {LossFamily::kEIoU, false},
                                              {LossFamily::kEIoU, true}}};
  return kinds;
}

double diou_regularizer(const OrientedBoxBEV& p, const OrientedBoxBEV& g) {
  return norm_sq(p.center() - g.center()) / enclosing_diag_sq(p, g);
}

double eiou_regularizer(const OrientedBoxBEV& p, const OrientedBoxBEV& g) {
  const auto ext = enclosing_extent(p, g);
  const double cl = ext.width();
  const double cw = ext.height();
  const double dl = p.l() - g.l();
  const double dw = p.w() - g.w();
  return norm_sq(p.center() - g.center()) / (cl * cl + cw * cw) +
         dl * dl / (cl * cl) + dw * dw / (cw * cw);
}

double loss_value(const LossKind& kind, const OrientedBoxBEV& p,
                  const OrientedBoxBEV& g, const WeightConfig& cfg) {
  const double m =
      kind.ego_centric ? ec_iou_bev(p, g, cfg).value : iou_bev(p, g).value;
  double r = 0.0;
  switch (kind.family) {
    case LossFamily::kIoU:
      break;
    case LossFamily::kDIoU:
      r = diou_regularizer(p, g);
      break;
    case LossFamily::kEIoU:
      r = eiou_regularizer(p, g);
      break;
  }
  return 1.0 - m + r;
}

GradientVector loss_gradient(const LossKind& kind, const OrientedBoxBEV& p,
                             const OrientedBoxBEV& g, const WeightConfig& cfg,
                             double h) {
  if (!(h > 0.0)) throw std::invalid_argument("gradient step must be > 0");
  const auto base = p.params();
  std::array<double, 5> grad{};
  for (std::size_t i = 0; i < base.size(); ++i) {
    auto probe = [&](double delta) {
      auto q = base;
      q[i] += delta;
      try {
        return loss_value(kind, OrientedBoxBEV::from_params(q), g, cfg);
      } catch (const std::invalid_argument& e) {
        throw NonFiniteGradientError(std::string("gradient probe failed: ") +
                                     e.what());
      } catch (const DegenerateDistanceError& e) {
        throw NonFiniteGradientError(std::string("gradient probe failed: ") +
                                     e.what());
      }
    };
    grad[i] = (probe(h) - probe(-h)) / (2.0 * h);
    if (!std::isfinite(grad[i])) {
      throw NonFiniteGradientError("non-finite gradient component");
    }
  }
  return {grad[0], grad[1], grad[2], grad[3], grad[4]};
}

}  // namespace eciou
