#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace stockpile::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

struct TrackOptions {
  int algorithm = 2;
  std::string mode = "dump";  // algorithm 1 only: dump | reclaim
  std::string dumps;
  std::string buckets;
  std::string diggers;
  std::string model = "convex";
  std::optional<double> alpha;
  double eps = 10.0;
  std::int64_t min_pts = 4;
  std::optional<double> window_hours;  // default depends on algorithm and mode
  std::string start;                   // ISO 8601; empty = earliest event
  std::string end;                     // ISO 8601; empty = cover the last event
  std::string digger_offset = "0,0";
  double stationary_speed = 0.3;
  bool digger_fallback = true;
  std::string out = "out";
  std::string format = "geojson";  // geojson | svg | both
  std::string crs = "local";
};

// Runs the tracker and writes snapshots plus manifest.txt under options.out.
// Returns kExitOk, kExitConfig or kExitIo; diagnostics go to err.
int cmd_track(const TrackOptions& options, std::ostream& err);

struct SynthOptions {
  std::string scenario = "growing";  // growing | dump-reclaim | digger-only | two-sided
  std::uint64_t seed = 0;            // 0 = scenario default
  std::string out = ".";
};

// Writes dumps.csv, buckets.csv and diggers.csv for a synthetic scenario.
int cmd_synth(const SynthOptions& options, std::ostream& err);

// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stockpile::cli
