#include "stockpile/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <fmt/core.h>

#include "stockpile/errors.hpp"

namespace stockpile {

namespace {

// Uniform grid with cell size eps; neighbours of a point live in the 3x3 block
// of cells around it.
class GridIndex {
 public:
  GridIndex(std::span<const Point2> points, double cell) : points_(points), cell_(cell) {
    for (std::size_t i = 0; i < points.size(); ++i) cells_[key(points[i])].push_back(i);
  }

  // Ascending indices within eps (inclusive) of points[i], i included.
  std::vector<std::size_t> neighbours(std::size_t i, double eps) const {
    std::vector<std::size_t> out;
    const Point2 p = points_[i];
    const double eps2 = eps * eps;
    const auto [cx, cy] = coords(p);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(pack(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t j : it->second) {
          if (squared_distance(p, points_[j]) <= eps2) out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::pair<std::int64_t, std::int64_t> coords(Point2 p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_))};
  }
  static std::uint64_t pack(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
  }
  std::uint64_t key(Point2 p) const {
    const auto [x, y] = coords(p);
    return pack(x, y);
  }

  std::span<const Point2> points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

void DbscanParams::validate() const {
  if (!std::isfinite(eps) || !(eps > 0.0)) {
    throw ConfigError(fmt::format("dbscan eps must be > 0 metres (got {})", eps));
  }
  if (min_pts < 1) throw ConfigError("dbscan min_pts must be >= 1");
}

std::vector<std::vector<std::size_t>> ClusterAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(cluster_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kNoise) out[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return out;
}

ClusterAssignment dbscan(std::span<const Point2> points, const DbscanParams& params) {
  params.validate();
  const std::size_t n = points.size();
  ClusterAssignment result;
  result.labels.assign(n, kNoise);
  if (n == 0) return result;

  for (const Point2& p : points) {
    if (!is_finite(p)) throw ConfigError("dbscan input has a non-finite coordinate");
  }

  const GridIndex index(points, params.eps);
  std::vector<std::vector<std::size_t>> nbrs(n);
  std::vector<char> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    nbrs[i] = index.neighbours(i, params.eps);
    core[i] = nbrs[i].size() >= params.min_pts;
  }

  // Visit points in lexicographic order so cluster ids do not depend on input
  // order; ties keep input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  std::vector<std::int32_t> core_label(n, kNoise);
  std::int32_t next_id = 0;
  for (std::size_t seed : order) {
    if (!core[seed] || core_label[seed] != kNoise) continue;
    const std::int32_t id = next_id++;
    std::vector<std::size_t> frontier{seed};
    core_label[seed] = id;
    while (!frontier.empty()) {
      const std::size_t cur = frontier.back();
      frontier.pop_back();
      for (std::size_t j : nbrs[cur]) {
        if (core[j] && core_label[j] == kNoise) {
          core_label[j] = id;
          frontier.push_back(j);
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      result.labels[i] = core_label[i];
      continue;
    }
    for (std::size_t j : nbrs[i]) {
      if (core[j] && (result.labels[i] == kNoise || core_label[j] < result.labels[i])) {
        result.labels[i] = core_label[j];
      }
    }
  }
  result.cluster_count = static_cast<std::size_t>(next_id);
  return result;
}

}  // namespace stockpile
