#pragma once

// Telemetry ingestion, stationary-dump filtering and half-open time windows.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stockpile/geometry.hpp"

namespace stockpile {

using Duration = std::chrono::microseconds;
using Instant = std::chrono::sys_time<Duration>;

// Parses ISO 8601 date-times with an explicit offset ("Z", "+08:00", "+0800"),
// e.g. 2019-03-01T06:30:00.250+08:00. Returns nullopt on anything else.
std::optional<Instant> parse_iso8601(std::string_view text);

// UTC rendering, "2019-02-28T22:30:00Z"; fractional seconds only when nonzero.
std::string format_iso8601(Instant t);

enum class EventKind { TruckGps, BucketReclaim, DiggerGps };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct TelemetryRecord {
  Instant timestamp;
  std::string equipment_id;
  EventKind kind = EventKind::TruckGps;
  Point2 position;
  std::optional<double> speed_mps;
  // Set by filter_stationary_dumps when stillness was inferred from position.
  bool stillness_inferred = false;

  friend bool operator==(const TelemetryRecord&, const TelemetryRecord&) = default;
};

// Immutable, timestamp-sorted sequence (stable on ties).
class EventStream {
 public:
  EventStream() = default;
  explicit EventStream(std::vector<TelemetryRecord> records);

  std::span<const TelemetryRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  EventStream only(EventKind kind) const;

 private:
  std::vector<TelemetryRecord> records_;
};

struct RowReject {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct LoadResult {
  EventStream stream;
  std::vector<RowReject> rejects;
};

// Reads `timestamp,equipment_id,kind,x,y,speed_mps` (any column order, extra
// columns ignored). Malformed rows end up in `rejects`; when expected_kind is
// given, rows of another kind are rejected too.
// Throws IoError when the file cannot be read and SchemaError when a required
// column is missing.
LoadResult load_csv(const std::filesystem::path& path,
                    std::optional<EventKind> expected_kind = std::nullopt);
LoadResult parse_csv(std::string_view text, std::optional<EventKind> expected_kind = std::nullopt);

std::string to_csv(const EventStream& stream);
std::string rejects_to_csv(std::span<const RowReject> rejects);

inline constexpr double kDefaultStationarySpeed = 0.3;      // m/s
inline constexpr Duration kStillnessLookback = std::chrono::seconds(10);
inline constexpr double kStillnessRadius = 1.0;             // metres

// Keeps truck fixes taken while standing still: reported speed <= threshold,
// or, without a speed, the previous fix of the same truck is at most 10 s
// older and at most 1 m away. Records of other kinds pass through.
EventStream filter_stationary_dumps(const EventStream& stream,
                                    double speed_threshold = kDefaultStationarySpeed);

struct WindowSpec {
  Instant t0;
  Duration dt;
  Instant ts;

  // Throws ConfigError unless dt > 0 and ts >= t0.
  void validate() const;
};

struct Window {
  std::size_t index = 0;
  Instant start;
  Instant end;

  friend bool operator==(const Window&, const Window&) = default;
};

// Consecutive [start, start + dt) windows from t0; the last one is cut at ts.
std::vector<Window> make_windows(const WindowSpec& spec);

// Records with start <= timestamp < end.
std::span<const TelemetryRecord> slice_window(const EventStream& stream, const Window& w);

std::vector<Point2> positions(std::span<const TelemetryRecord> records);

}  // namespace stockpile
