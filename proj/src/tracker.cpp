#include "stockpile/tracker.hpp"

#include <cmath>

#include <fmt/core.h>

#include "stockpile/errors.hpp"

namespace stockpile {

namespace {

struct ClusterPolygons {
  std::vector<PolygonFeature> features;
  ClusterAssignment assignment;
  std::size_t degenerate = 0;
};

// Clusters the points and wraps every cluster in the configured model. NOISE
// points never reach a polygon.
ClusterPolygons cluster_and_wrap(std::span<const Point2> points, const DbscanParams& params,
                                 const TrackerConfig& cfg, Role role, Source source,
                                 std::size_t window_index) {
  ClusterPolygons out;
  out.assignment = dbscan(points, params);
  const auto members = out.assignment.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    std::vector<Point2> cluster;
    cluster.reserve(members[c].size());
    for (std::size_t i : members[c]) cluster.push_back(points[i]);
    if (canonical_points(cluster).size() < cfg.min_polygon_points || is_degenerate(cluster)) {
      ++out.degenerate;
      continue;
    }
    const MultiPolygon shape = cfg.model.build(cluster);
    if (shape.empty()) {
      ++out.degenerate;
      continue;
    }
    for (const Polygon& part : shape.parts) {
      out.features.push_back(
          {part, role, source, window_index, static_cast<std::int32_t>(c), part.area()});
    }
  }
  return out;
}

double pairwise_overlap(std::span<const PolygonFeature> features) {
  double total = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!is_convex(features[i].polygon)) continue;
    for (std::size_t j = i + 1; j < features.size(); ++j) {
      if (!is_convex(features[j].polygon)) continue;
      total += convex_intersection_area(features[i].polygon, features[j].polygon);
    }
  }
  return total;
}

std::vector<Point2> ledger_positions(const DumpLedger& ledger) {
  std::vector<Point2> out;
  out.reserve(ledger.active.size());
  for (const auto& p : ledger.active) out.push_back(p.position);
  return out;
}

void fill_ledger_counts(Snapshot& snap, const DumpLedger& ledger) {
  snap.ledger_active = ledger.active.size();
  snap.ledger_added_total = ledger.added_total;
  snap.ledger_removed_total = ledger.removed_total;
}

}  // namespace

MultiPolygon PolygonModel::build(std::span<const Point2> points) const {
  if (kind_ == Kind::Convex) return MultiPolygon{{convex_hull(points)}};
  return alpha_shape(points, alpha_);
}

std::string_view to_string(Role role) { return role == Role::Dump ? "dump" : "reclaim"; }

std::string_view to_string(Source source) {
  switch (source) {
    case Source::Truck: return "truck";
    case Source::Bucket: return "bucket";
    case Source::Digger: return "digger";
  }
  return "unknown";
}

void TrackerConfig::validate() const {
  window.validate();
  dump_dbscan.validate();
  reclaim_dbscan.validate();
  if (!is_finite(digger_offset)) throw ConfigError("digger offset must be finite");
  if (!std::isfinite(stationary_speed) || stationary_speed < 0.0) {
    throw ConfigError("stationary speed must be >= 0");
  }
  if (min_polygon_points < 3) throw ConfigError("min_polygon_points must be >= 3");
}

std::vector<Snapshot> run_algorithm1(const EventStream& stream, const TrackerConfig& cfg,
                                     Algorithm1Mode mode) {
  cfg.validate();
  const bool dumps = mode == Algorithm1Mode::DumpOnly;
  const EventStream events = stream.only(dumps ? EventKind::TruckGps : EventKind::BucketReclaim);
  const DbscanParams& params = dumps ? cfg.dump_dbscan : cfg.reclaim_dbscan;
  const Role role = dumps ? Role::Dump : Role::Reclaim;
  const Source source = dumps ? Source::Truck : Source::Bucket;

  std::vector<Snapshot> out;
  for (const Window& w : make_windows(cfg.window)) {
    Snapshot snap;
    snap.window = w;
    const auto pts = positions(slice_window(events, w));
    auto wrapped = cluster_and_wrap(pts, params, cfg, role, source, w.index);
    snap.degenerate_clusters = wrapped.degenerate;
    if (dumps) {
      snap.dump_features = std::move(wrapped.features);
      snap.dump_overlap_m2 = pairwise_overlap(snap.dump_features);
    } else {
      snap.reclaim_features = std::move(wrapped.features);
    }
    out.push_back(std::move(snap));
  }
  return out;
}

StepResult step_algorithm2(DumpLedger ledger, const WindowEvents& events, const TrackerConfig& cfg) {
  Snapshot snap;
  snap.window = events.window;
  const std::size_t window_index = events.window.index;

  const std::size_t first_new = ledger.active.size();
  for (const auto& rec : events.dumps) {
    ledger.active.push_back({rec.position, rec.timestamp, window_index, kNoise});
  }
  snap.added_this_window = events.dumps.size();
  ledger.added_total += events.dumps.size();

  std::vector<Point2> reclaim_points;
  Source source = Source::Bucket;
  if (!events.buckets.empty()) {
    reclaim_points = positions(events.buckets);
  } else if (!events.diggers.empty() && cfg.digger_fallback) {
    source = Source::Digger;
    for (const auto& rec : events.diggers) reclaim_points.push_back(rec.position + cfg.digger_offset);
  }

  std::vector<char> removed(ledger.active.size(), 0);
  if (!reclaim_points.empty()) {
    MultiPolygon reclaim;
    if (!is_degenerate(reclaim_points)) reclaim = cfg.model.build(reclaim_points);
    if (reclaim.empty()) {
      snap.reclaim_skipped = true;
      snap.notes.push_back(fmt::format("{} reclaim fixes do not form a polygon; nothing removed",
                                       reclaim_points.size()));
    } else {
      for (const Polygon& part : reclaim.parts) {
        snap.reclaim_features.push_back({part, Role::Reclaim, source, window_index, 0, part.area()});
      }
      for (std::size_t i = 0; i < ledger.active.size(); ++i) {
        removed[i] = covers(reclaim, ledger.active[i].position);
      }
    }
  }

  std::vector<LedgerPoint> remaining;
  std::vector<char> is_new;
  remaining.reserve(ledger.active.size());
  for (std::size_t i = 0; i < ledger.active.size(); ++i) {
    if (removed[i]) {
      ++snap.removed_this_window;
      continue;
    }
    remaining.push_back(ledger.active[i]);
    is_new.push_back(i >= first_new);
  }
  ledger.active = std::move(remaining);
  ledger.removed_total += snap.removed_this_window;

  const auto pts = ledger_positions(ledger);
  auto wrapped = cluster_and_wrap(pts, cfg.dump_dbscan, cfg, Role::Dump, Source::Truck, window_index);
  for (std::size_t i = 0; i < ledger.active.size(); ++i) {
    if (is_new[i]) ledger.active[i].cluster_at_add = wrapped.assignment.labels[i];
  }
  snap.dump_features = std::move(wrapped.features);
  snap.degenerate_clusters = wrapped.degenerate;
  snap.dump_overlap_m2 = pairwise_overlap(snap.dump_features);
  fill_ledger_counts(snap, ledger);
  return {std::move(ledger), std::move(snap)};
}

Algorithm2Run run_algorithm2(const Algorithm2Streams& streams, const TrackerConfig& cfg) {
  cfg.validate();
  const EventStream dumps = streams.dumps.only(EventKind::TruckGps);
  const EventStream buckets = streams.buckets.only(EventKind::BucketReclaim);
  const EventStream diggers = streams.diggers.only(EventKind::DiggerGps);

  Algorithm2Run run;
  for (const Window& w : make_windows(cfg.window)) {
    const WindowEvents events{w, slice_window(dumps, w), slice_window(buckets, w), slice_window(diggers, w)};
    try {
      auto step = step_algorithm2(run.ledger, events, cfg);
      run.ledger = std::move(step.ledger);
      run.snapshots.push_back(std::move(step.snapshot));
    } catch (const Error& e) {
      // The window is flagged and the ledger carried over untouched.
      Snapshot snap;
      snap.window = w;
      snap.notes.push_back(fmt::format("window failed: {}", e.what()));
      fill_ledger_counts(snap, run.ledger);
      run.snapshots.push_back(std::move(snap));
    }
  }
  return run;
}

}  // namespace stockpile
