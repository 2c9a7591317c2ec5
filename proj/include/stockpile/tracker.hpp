#pragma once

// Stockpile footprint tracking over time windows.
//
// run_algorithm1 treats every window on its own: the window's dump (or
// reclaim) fixes are clustered and each cluster is wrapped in a polygon.
//
// run_algorithm2 folds a dump ledger over the windows. Truck dumps are added
// to the ledger; when the window holds bucket reclaim fixes (or, failing
// those, digger GPS fixes shifted by a calibration offset) a reclaim polygon
// is built over them and every ledger point it covers is removed. The
// surviving points are re-clustered into the window's dump polygons.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stockpile/clustering.hpp"
#include "stockpile/events.hpp"
#include "stockpile/geometry.hpp"

namespace stockpile {

class PolygonModel {
 public:
  enum class Kind { Convex, Alpha };

  static PolygonModel convex() { return PolygonModel(Kind::Convex, AlphaParam::infinite()); }
  static PolygonModel alpha(AlphaParam param) { return PolygonModel(Kind::Alpha, param); }

  Kind kind() const { return kind_; }
  const AlphaParam& alpha_param() const { return alpha_; }
  std::string_view name() const { return kind_ == Kind::Convex ? "convex" : "alpha"; }

  // Throws DegenerateInput for fewer than 3 distinct or collinear points. The
  // alpha model may return an empty shape.
  MultiPolygon build(std::span<const Point2> points) const;

  friend bool operator==(const PolygonModel&, const PolygonModel&) = default;

 private:
  PolygonModel(Kind kind, AlphaParam alpha) : kind_(kind), alpha_(alpha) {}
  Kind kind_;
  AlphaParam alpha_;
};

enum class Role { Dump, Reclaim };
enum class Source { Truck, Bucket, Digger };

std::string_view to_string(Role role);
std::string_view to_string(Source source);

struct TrackerConfig {
  WindowSpec window{};
  PolygonModel model = PolygonModel::convex();
  DbscanParams dump_dbscan{};
  DbscanParams reclaim_dbscan{};
  Point2 digger_offset{};  // added to digger fixes before use
  double stationary_speed = kDefaultStationarySpeed;
  std::size_t min_polygon_points = 3;
  // Off reproduces a bucket-only run: digger fixes never remove dumps.
  bool digger_fallback = true;

  // Throws ConfigError.
  void validate() const;
};

inline constexpr Duration kDumpWindow = std::chrono::hours(2);
inline constexpr Duration kReclaimWindow = std::chrono::minutes(30);
inline constexpr Duration kLedgerWindow = std::chrono::hours(24);

struct PolygonFeature {
  Polygon polygon;
  Role role = Role::Dump;
  Source source = Source::Truck;
  std::size_t window_index = 0;
  std::int32_t cluster_id = 0;
  double area_m2 = 0.0;

  friend bool operator==(const PolygonFeature&, const PolygonFeature&) = default;
};

struct Snapshot {
  Window window;
  std::vector<PolygonFeature> dump_features;
  std::vector<PolygonFeature> reclaim_features;
  std::size_t degenerate_clusters = 0;
  std::size_t removed_this_window = 0;
  // Pairwise intersection area of convex dump polygons in this window.
  double dump_overlap_m2 = 0.0;

  // Ledger bookkeeping after the window (algorithm 2 only).
  std::size_t added_this_window = 0;
  std::size_t ledger_active = 0;
  std::size_t ledger_added_total = 0;
  std::size_t ledger_removed_total = 0;

  // Reclaim fixes were present but too few or collinear to form a polygon;
  // nothing was removed.
  bool reclaim_skipped = false;
  std::vector<std::string> notes;

  bool empty() const { return dump_features.empty() && reclaim_features.empty(); }
};

enum class Algorithm1Mode { DumpOnly, ReclaimOnly };

// One snapshot per window of cfg.window. DumpOnly reads truck fixes and
// cfg.dump_dbscan, ReclaimOnly reads bucket fixes and cfg.reclaim_dbscan;
// records of other kinds are ignored. Throws ConfigError.
std::vector<Snapshot> run_algorithm1(const EventStream& stream, const TrackerConfig& cfg,
                                     Algorithm1Mode mode);

struct LedgerPoint {
  Point2 position;
  Instant timestamp;
  std::size_t window_added = 0;
  std::int32_t cluster_at_add = kNoise;

  friend bool operator==(const LedgerPoint&, const LedgerPoint&) = default;
};

struct DumpLedger {
  std::vector<LedgerPoint> active;  // insertion order
  std::size_t added_total = 0;
  std::size_t removed_total = 0;

  friend bool operator==(const DumpLedger&, const DumpLedger&) = default;
};

struct WindowEvents {
  Window window;
  std::span<const TelemetryRecord> dumps;
  std::span<const TelemetryRecord> buckets;
  std::span<const TelemetryRecord> diggers;
};

struct StepResult {
  DumpLedger ledger;
  Snapshot snapshot;
};

// One ledger update. Dumps are appended first; then bucket fixes, else digger
// fixes (when cfg.digger_fallback), form the reclaim polygon that removes
// every covered ledger point; the survivors are clustered into dump polygons.
StepResult step_algorithm2(DumpLedger ledger, const WindowEvents& events, const TrackerConfig& cfg);

struct Algorithm2Streams {
  EventStream dumps;
  EventStream buckets;
  EventStream diggers;
};

struct Algorithm2Run {
  std::vector<Snapshot> snapshots;
  DumpLedger ledger;  // state after the last window
};

// Folds step_algorithm2 over the windows of cfg.window. Dumps are expected to
// be filtered for stationarity already. Throws ConfigError.
Algorithm2Run run_algorithm2(const Algorithm2Streams& streams, const TrackerConfig& cfg);

}  // namespace stockpile
