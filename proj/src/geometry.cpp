#include "eciou/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eciou {

namespace {

// Side-of-line slack for clipping, in m^2 (cross-product units).
constexpr double kSideTolerance = 1e-12;

std::vector<Vec2> dedup_consecutive(std::vector<Vec2> v) {
  std::vector<Vec2> out;
  out.reserve(v.size());
  for (const Vec2& p : v) {
    if (out.empty() || std::hypot(p.x - out.back().x, p.y - out.back().y) >
                           kVertexTolerance) {
      out.push_back(p);
    }
  }
  while (out.size() > 1 && std::hypot(out.front().x - out.back().x,
                                      out.front().y - out.back().y) <=
                               kVertexTolerance) {
    out.pop_back();
  }
  return out;
}

}  // namespace

double canonical_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double t = theta - kTwoPi * std::floor((theta + std::numbers::pi) / kTwoPi);
  if (t >= std::numbers::pi) t -= kTwoPi;
  if (t < -std::numbers::pi) t = -std::numbers::pi;
  return t;
}

OrientedBoxBEV::OrientedBoxBEV(double x, double y, double l, double w,
                               double theta)
    : x_(x), y_(y), l_(l), w_(w), theta_(0.0) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("box center must be finite");
  }
  if (!(l > 0.0) || !(w > 0.0) || !std::isfinite(l) || !std::isfinite(w)) {
    throw std::invalid_argument("box length and width must be positive");
  }
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("box orientation must be finite");
  }
  theta_ = canonical_angle(theta);
}

std::array<Vec2, 4> OrientedBoxBEV::corners() const {
  const double c = std::cos(theta_);
  const double s = std::sin(theta_);
  const double hl = 0.5 * l_;
  const double hw = 0.5 * w_;
  auto to_world = [&](double lx, double ly) {
    return Vec2{x_ + c * lx - s * ly, y_ + s * lx + c * ly};
  };
  return {to_world(hl, hw), to_world(-hl, hw), to_world(-hl, -hw),
          to_world(hl, -hw)};
}

Box3D::Box3D(const OrientedBoxBEV& bev, double z, double h)
    : bev_(bev), z_(z), h_(h) {
  if (!std::isfinite(z)) throw std::invalid_argument("box z must be finite");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("box height must be positive");
  }
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices)
    : vertices_(dedup_consecutive(std::move(vertices))) {
  if (signed_area(vertices_) < 0.0) {
    std::reverse(vertices_.begin(), vertices_.end());
  }
}

ConvexPolygon box_to_polygon(const OrientedBoxBEV& box) {
  const auto c = box.corners();
  return ConvexPolygon({c.begin(), c.end()});
}

double signed_area(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(v[i], v[(i + 1) % n]);
  }
  return 0.5 * twice;
}

double polygon_area(const ConvexPolygon& p) {
  return std::abs(signed_area(p.vertices()));
}

ConvexPolygon intersect_convex(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.size() < 3 || b.size() < 3) return {};

  std::vector<Vec2> output = a.vertices();
  std::vector<Vec2> input;
  const auto& clip = b.vertices();
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Vec2 e0 = clip[e];
    const Vec2 edge = clip[(e + 1) % clip.size()] - e0;
    input.swap(output);
    output.clear();
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 cur = input[i];
      const Vec2 nxt = input[(i + 1) % n];
      const double s_cur = cross(edge, cur - e0);
      const double s_nxt = cross(edge, nxt - e0);
      const bool in_cur = s_cur >= -kSideTolerance;
      const bool in_nxt = s_nxt >= -kSideTolerance;
      if (in_cur) output.push_back(cur);
      if (in_cur != in_nxt) {
        const double t = s_cur / (s_cur - s_nxt);
        output.push_back(cur + (nxt - cur) * t);
      }
    }
  }

  ConvexPolygon result(std::move(output));
  if (result.size() < 3 || polygon_area(result) < kAreaTolerance) return {};
  return result;
}

AxisAlignedExtent enclosing_extent(const OrientedBoxBEV& a,
                                   const OrientedBoxBEV& b) {
  AxisAlignedExtent ext{a.x(), a.y(), a.x(), a.y()};
  for (const auto& box : {a, b}) {
    for (const Vec2& c : box.corners()) {
      ext.min_x = std::min(ext.min_x, c.x);
      ext.min_y = std::min(ext.min_y, c.y);
      ext.max_x = std::max(ext.max_x, c.x);
      ext.max_y = std::max(ext.max_y, c.y);
    }
  }
  return ext;
}

double enclosing_diag_sq(const OrientedBoxBEV& a, const OrientedBoxBEV& b) {
  const auto ext = enclosing_extent(a, b);
  return ext.width() * ext.width() + ext.height() * ext.height();
}

}  // namespace eciou
