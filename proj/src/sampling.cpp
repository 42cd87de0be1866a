#include "eciou/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eciou {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32)};
}

}  // namespace

PolygonSampler::PolygonSampler(const ConvexPolygon& poly, std::uint64_t seed,
                               std::uint64_t stream)
    : vertices_(poly.vertices()) {
  if (vertices_.size() < 3) {
    throw std::invalid_argument("cannot sample from a degenerate polygon");
  }
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < vertices_.size(); ++i) {
    total += 0.5 * std::abs(cross(vertices_[i] - vertices_[0],
                                  vertices_[i + 1] - vertices_[0]));
    cumulative_area_.push_back(total);
  }
  auto seq = make_seed_seq(seed, stream);
  engine_.seed(seq);
}

double PolygonSampler::uniform01() {
  // 53 random mantissa bits, [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Vec2 PolygonSampler::next() {
  const double pick = uniform01() * cumulative_area_.back();
  auto it = std::upper_bound(cumulative_area_.begin(), cumulative_area_.end(),
                             pick);
  if (it == cumulative_area_.end()) --it;
  const std::size_t tri =
      static_cast<std::size_t>(it - cumulative_area_.begin()) + 1;

  double r1 = uniform01();
  double r2 = uniform01();
  if (r1 + r2 > 1.0) {
    r1 = 1.0 - r1;
    r2 = 1.0 - r2;
  }
  const Vec2 a = vertices_[0];
  return a + (vertices_[tri] - a) * r1 + (vertices_[tri + 1] - a) * r2;
}

}  // namespace eciou
