#pragma once

// Snapshot emitters: one GeoJSON FeatureCollection per window and an SVG of a
// whole run.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "stockpile/tracker.hpp"

namespace stockpile {

// Shortest decimal text that keeps at most 9 fractional digits; no exponent,
// no negative zero.
std::string format_number(double value);

std::string json_escape(std::string_view text);

// "snapshot_00007.geojson"
std::string snapshot_filename(std::size_t window_index);

struct GeoJsonOptions {
  std::string crs_label = "local";
  std::string model_name = "convex";
};

// FeatureCollection with one Polygon feature per dump/reclaim polygon. Rings
// are closed and CCW; coordinates stay in the local metric grid, which the
// top-level "local_crs" member names.
std::string emit_geojson(const Snapshot& snapshot, const GeoJsonOptions& options = {});

// RGB of the oldest-to-latest ramp at rank / (count - 1).
struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
};
Rgb ramp_colour(std::size_t rank, std::size_t count);
std::string to_hex(Rgb c);

// All polygons of all snapshots in one drawing. Fill follows window age,
// reclaim outlines are dashed, and the legend lists every snapshot's window.
std::string emit_svg(std::span<const Snapshot> snapshots);

}  // namespace stockpile
