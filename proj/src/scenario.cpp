#include "stockpile/scenario.hpp"

#include <cmath>
#include <numbers>

#include <fmt/core.h>

namespace stockpile::scenario {

std::vector<Point2> gaussian_blob(Rng& rng, Point2 centre, double sigma, std::size_t n) {
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Point2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = noise(rng);
    const double dy = noise(rng);
    out.push_back({centre.x + dx, centre.y + dy});
  }
  return out;
}

std::vector<Point2> uniform_disk(Rng& rng, Point2 centre, double radius, std::size_t n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Point2> out;
  out.reserve(n);
  while (out.size() < n) {
    const double x = unit(rng);
    const double y = unit(rng);
    if (x * x + y * y <= 1.0) out.push_back({centre.x + radius * x, centre.y + radius * y});
  }
  return out;
}

std::vector<Point2> c_shape(Rng& rng, Point2 centre, double inner_radius, double outer_radius,
                            std::size_t n) {
  // Angles in [pi/4, 7pi/4]; radius drawn so the density is uniform in area.
  std::uniform_real_distribution<double> angle(0.25 * std::numbers::pi, 1.75 * std::numbers::pi);
  std::uniform_real_distribution<double> r2(inner_radius * inner_radius, outer_radius * outer_radius);
  std::vector<Point2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = angle(rng);
    const double r = std::sqrt(r2(rng));
    out.push_back({centre.x + r * std::cos(a), centre.y + r * std::sin(a)});
  }
  return out;
}

std::vector<Point2> ring(Point2 centre, double radius, std::size_t n) {
  std::vector<Point2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    out.push_back({centre.x + radius * std::cos(a), centre.y + radius * std::sin(a)});
  }
  return out;
}

std::vector<TelemetryRecord> stamp(std::span<const Point2> points, EventKind kind,
                                   const std::string& equipment_id, Instant start, Duration span) {
  std::vector<TelemetryRecord> out;
  out.reserve(points.size());
  const auto step = points.empty() ? Duration{0} : span / static_cast<std::int64_t>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    TelemetryRecord rec;
    rec.timestamp = start + step * static_cast<std::int64_t>(i);
    rec.equipment_id = equipment_id;
    rec.kind = kind;
    rec.position = points[i];
    if (kind == EventKind::TruckGps) rec.speed_mps = 0.0;
    out.push_back(std::move(rec));
  }
  return out;
}

Instant default_epoch() {
  using namespace std::chrono;
  return sys_days{year{2019} / March / 1};
}

namespace {

// Keeps the stamped records of a window well inside it.
Instant window_start(const Scenario& s, std::size_t w) {
  return s.t0 + s.dt * static_cast<std::int64_t>(w) + std::chrono::minutes(1);
}

Duration usable(const Scenario& s) { return s.dt - std::chrono::minutes(2); }

void append(std::vector<TelemetryRecord>& dst, std::vector<TelemetryRecord> src) {
  dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

constexpr Point2 kOrigin{500000.0, 7450000.0};  // a plausible mine-grid easting/northing

}  // namespace

Scenario growing_dumps(std::uint64_t seed, std::size_t windows) {
  Rng rng(seed);
  Scenario s{default_epoch(), std::chrono::hours(2), windows, {}, {}, {}};
  std::vector<TelemetryRecord> dumps;
  for (std::size_t w = 0; w < windows; ++w) {
    const Point2 centre = kOrigin + Point2{25.0 * static_cast<double>(w), 0.0};
    const auto pts = gaussian_blob(rng, centre, 1.5, 20);
    append(dumps, stamp(pts, EventKind::TruckGps, fmt::format("TRK{:02}", w % 4), window_start(s, w), usable(s)));
  }
  s.dumps = EventStream(std::move(dumps));
  return s;
}

Scenario dump_reclaim_dump(std::uint64_t seed) {
  Rng rng(seed);
  Scenario s{default_epoch(), std::chrono::hours(24), 3, {}, {}, {}};
  const Point2 low_side = kOrigin;
  const Point2 high_side = kOrigin + Point2{-80.0, 40.0};
  std::vector<TelemetryRecord> dumps;
  append(dumps, stamp(gaussian_blob(rng, low_side, 1.0, 20), EventKind::TruckGps, "TRK01",
                      window_start(s, 0), usable(s)));
  append(dumps, stamp(gaussian_blob(rng, high_side, 1.0, 15), EventKind::TruckGps, "TRK02",
                      window_start(s, 2), usable(s)));
  s.dumps = EventStream(std::move(dumps));
  s.buckets = EventStream(stamp(ring(low_side, 12.0, 16), EventKind::BucketReclaim, "LDR01",
                                window_start(s, 1), usable(s)));
  return s;
}

Scenario digger_only_reclaim(std::uint64_t seed) {
  Scenario s = dump_reclaim_dump(seed);
  std::vector<TelemetryRecord> digger(s.buckets.records().begin(), s.buckets.records().end());
  for (auto& rec : digger) rec.kind = EventKind::DiggerGps;
  s.diggers = EventStream(std::move(digger));
  s.buckets = EventStream();
  return s;
}

Scenario two_sided_stockpile(std::uint64_t seed) {
  Rng rng(seed);
  Scenario s{default_epoch(), std::chrono::hours(24), 2, {}, {}, {}};
  const Point2 low_side = kOrigin;
  const Point2 high_side = kOrigin + Point2{-60.0, 0.0};
  std::vector<TelemetryRecord> dumps;
  auto low = gaussian_blob(rng, low_side, 2.0, 25);
  auto high = gaussian_blob(rng, high_side, 2.0, 25);
  append(dumps, stamp(low, EventKind::TruckGps, "TRK01", window_start(s, 0), usable(s)));
  append(dumps, stamp(high, EventKind::TruckGps, "TRK02", window_start(s, 0), usable(s)));
  s.dumps = EventStream(std::move(dumps));

  const auto reclaim = ring(low_side, 15.0, 12);
  s.buckets = EventStream(stamp(reclaim, EventKind::BucketReclaim, "LDR01", window_start(s, 1), usable(s)));
  // The loader's GPS antenna sits 1.5 m behind the bucket tip.
  std::vector<Point2> antenna;
  for (const Point2& p : reclaim) antenna.push_back(p + Point2{-1.5, 0.0});
  s.diggers = EventStream(stamp(antenna, EventKind::DiggerGps, "LDR01", window_start(s, 1), usable(s)));
  return s;
}

}  // namespace stockpile::scenario
