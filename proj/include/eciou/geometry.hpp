#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace eciou {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm_sq(Vec2 a) { return dot(a, a); }

// Consecutive vertices closer than this are merged.
inline constexpr double kVertexTolerance = 1e-12;
// Regions below this area are treated as empty.
inline constexpr double kAreaTolerance = 1e-12;

// Wraps an angle into [-pi, pi).
double canonical_angle(double theta);

/// Oriented box on the ground plane, ego at the origin.
///
/// `l` runs along the box-local x axis, `w` along the local y axis, and
/// `theta` rotates local into world coordinates. Construction throws
/// std::invalid_argument for non-positive or non-finite dimensions and a
/// non-finite angle; the angle is stored canonicalized to [-pi, pi).
class OrientedBoxBEV {
 public:
  OrientedBoxBEV(double x, double y, double l, double w, double theta);

  double x() const { return x_; }
  double y() const { return y_; }
  double l() const { return l_; }
  double w() const { return w_; }
  double theta() const { return theta_; }
  Vec2 center() const { return {x_, y_}; }

  // (x, y, l, w, theta) in that order.
  std::array<double, 5> params() const { return {x_, y_, l_, w_, theta_}; }
  static OrientedBoxBEV from_params(const std::array<double, 5>& p) {
    return {p[0], p[1], p[2], p[3], p[4]};
  }

  // Corners in CCW order starting from the local (+l/2, +w/2) corner.
  std::array<Vec2, 4> corners() const;

  OrientedBoxBEV translated_to(double x, double y) const {
    return {x, y, l_, w_, theta_};
  }

 private:
  double x_, y_, l_, w_, theta_;
};

/// OrientedBoxBEV extended with a vertical center `z` and height `h`.
class Box3D {
 public:
  Box3D(const OrientedBoxBEV& bev, double z, double h);
  Box3D(double x, double y, double z, double l, double w, double h,
        double theta)
      : Box3D(OrientedBoxBEV(x, y, l, w, theta), z, h) {}

  const OrientedBoxBEV& bev() const { return bev_; }
  double z() const { return z_; }
  double h() const { return h_; }
  double z_min() const { return z_ - 0.5 * h_; }
  double z_max() const { return z_ + 0.5 * h_; }

 private:
  OrientedBoxBEV bev_;
  double z_, h_;
};

/// Convex region stored as CCW vertices; no vertices means the empty region.
///
/// The constructor merges consecutive duplicates and flips clockwise input
/// to CCW. It does not check convexity.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }

 private:
  std::vector<Vec2> vertices_;
};

ConvexPolygon box_to_polygon(const OrientedBoxBEV& box);

double signed_area(const std::vector<Vec2>& vertices);

// Shoelace area; 0 for fewer than three vertices.
double polygon_area(const ConvexPolygon& p);

// Sutherland-Hodgman clipping of `a` against every edge of `b`. Results
// whose area falls below kAreaTolerance come back empty.
ConvexPolygon intersect_convex(const ConvexPolygon& a, const ConvexPolygon& b);

struct AxisAlignedExtent {
  double min_x, min_y, max_x, max_y;
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

// Smallest axis-aligned rectangle holding the corners of both boxes.
AxisAlignedExtent enclosing_extent(const OrientedBoxBEV& a,
                                   const OrientedBoxBEV& b);

// Squared diagonal of enclosing_extent(a, b).
double enclosing_diag_sq(const OrientedBoxBEV& a, const OrientedBoxBEV& b);

}  // namespace eciou
