#pragma once

// Synthetic telemetry for tests, demos and the `synth` CLI command. All
// generators are deterministic for a given seed.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stockpile/events.hpp"
#include "stockpile/geometry.hpp"

namespace stockpile::scenario {

using Rng = std::mt19937_64;

// Isotropic Gaussian scatter around centre.
std::vector<Point2> gaussian_blob(Rng& rng, Point2 centre, double sigma, std::size_t n);

// Uniform in the disc of the given radius.
std::vector<Point2> uniform_disk(Rng& rng, Point2 centre, double radius, std::size_t n);

// Uniform over three quarters of an annulus (opening towards +x), a concave
// "C" outline.
std::vector<Point2> c_shape(Rng& rng, Point2 centre, double inner_radius, double outer_radius,
                            std::size_t n);

// Evenly spaced points on a circle.
std::vector<Point2> ring(Point2 centre, double radius, std::size_t n);

// Stamps points as records of one kind, spread evenly over [start, start + span).
std::vector<TelemetryRecord> stamp(std::span<const Point2> points, EventKind kind,
                                   const std::string& equipment_id, Instant start, Duration span);

struct Scenario {
  Instant t0;
  Duration dt;
  std::size_t windows = 0;
  EventStream dumps;
  EventStream buckets;
  EventStream diggers;

  Instant end() const { return t0 + dt * static_cast<std::int64_t>(windows); }
};

Instant default_epoch();  // 2019-03-01T00:00:00Z

// Continuous dumping: one fresh 20-point blob per 2 h window, 15 windows, the
// blobs marching along +x 25 m apart.
Scenario growing_dumps(std::uint64_t seed = 1, std::size_t windows = 15);

// Three 24 h windows: a 20-point dump blob, then bucket fixes on a ring that
// covers it, then a 15-point blob well away from the reclaim area.
Scenario dump_reclaim_dump(std::uint64_t seed = 2);

// Same geometry as dump_reclaim_dump but the reclaim is recorded only by the
// digger GPS, with the bucket stream empty.
Scenario digger_only_reclaim(std::uint64_t seed = 2);

// High-side and low-side dump groups in one window plus bucket and digger
// reclaim over the low side in the next.
Scenario two_sided_stockpile(std::uint64_t seed = 3);

}  // namespace stockpile::scenario
