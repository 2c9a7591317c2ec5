#pragma once

// Density-based clustering (DBSCAN) of event positions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stockpile/geometry.hpp"

namespace stockpile {

struct DbscanParams {
  double eps = 10.0;         // neighbourhood radius, metres
  std::size_t min_pts = 4;   // neighbours required for a core point, self included

  // Throws ConfigError unless eps > 0 and min_pts >= 1.
  void validate() const;
};

inline constexpr std::int32_t kNoise = -1;

struct ClusterAssignment {
  // One entry per input point: a cluster id in [0, cluster_count) or kNoise.
  std::vector<std::int32_t> labels;
  std::size_t cluster_count = 0;

  // Input indices per cluster, each list ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

// Ids are numbered in order of each cluster's lexicographically smallest core
// point; a border point reachable from several clusters joins the lowest id.
// Distances <= eps count as neighbours.
ClusterAssignment dbscan(std::span<const Point2> points, const DbscanParams& params);

}  // namespace stockpile
