#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "eciou/geometry.hpp"

namespace eciou {

/// Uniform points inside a convex polygon.
///
/// The polygon is fan-triangulated from vertex 0; each draw picks a
/// triangle with probability proportional to its area and then a uniform
/// barycentric point in it. The generator is seeded from (seed, stream),
/// so a given pair always yields the same sequence.
class PolygonSampler {
 public:
  PolygonSampler(const ConvexPolygon& poly, std::uint64_t seed,
                 std::uint64_t stream);

  Vec2 next();

 private:
  double uniform01();

  std::vector<Vec2> vertices_;
  std::vector<double> cumulative_area_;
  std::mt19937_64 engine_;
};

}  // namespace eciou
