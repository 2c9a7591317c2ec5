#include "stockpile/events.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "stockpile/errors.hpp"

namespace stockpile {

namespace {

bool parse_uint(std::string_view text, int& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::string(trim(field)));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::string(trim(field)));
  return fields;
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_number(double v) {
  // Shortest round-trip digits, never in exponent form.
  std::array<char, 400> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  return std::string(buf.data(), ptr);
}

constexpr std::array<std::string_view, 6> kColumns = {"timestamp", "equipment_id", "kind",
                                                       "x",         "y",            "speed_mps"};

}  // namespace

std::optional<Instant> parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  // YYYY-MM-DDTHH:MM:SS
  if (text.size() < 20) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  int yr = 0, mo = 0, dy = 0, hh = 0, mm = 0, ss = 0;
  if (!parse_uint(text.substr(0, 4), yr) || !parse_uint(text.substr(5, 2), mo) ||
      !parse_uint(text.substr(8, 2), dy) || !parse_uint(text.substr(11, 2), hh) ||
      !parse_uint(text.substr(14, 2), mm) || !parse_uint(text.substr(17, 2), ss)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{yr}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(dy)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) return std::nullopt;

  std::size_t pos = 19;
  Duration fraction{0};
  if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
    ++pos;
    const std::size_t digits_start = pos;
    std::int64_t micros = 0;
    int scale = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (scale < 6) {
        micros = micros * 10 + (text[pos] - '0');
        ++scale;
      }
      ++pos;
    }
    if (pos == digits_start) return std::nullopt;
    while (scale++ < 6) micros *= 10;
    fraction = Duration{micros};
  }
  if (pos >= text.size()) return std::nullopt;  // offset is mandatory

  minutes offset{0};
  const std::string_view zone = text.substr(pos);
  if (zone == "Z" || zone == "z") {
    offset = minutes{0};
  } else if (zone[0] == '+' || zone[0] == '-') {
    int oh = 0, om = 0;
    if (zone.size() == 6 && zone[3] == ':') {
      if (!parse_uint(zone.substr(1, 2), oh) || !parse_uint(zone.substr(4, 2), om)) return std::nullopt;
    } else if (zone.size() == 5) {
      if (!parse_uint(zone.substr(1, 2), oh) || !parse_uint(zone.substr(3, 2), om)) return std::nullopt;
    } else if (zone.size() == 3) {
      if (!parse_uint(zone.substr(1, 2), oh)) return std::nullopt;
    } else {
      return std::nullopt;
    }
    if (oh > 23 || om > 59) return std::nullopt;
    offset = hours{oh} + minutes{om};
    if (zone[0] == '-') offset = -offset;
  } else {
    return std::nullopt;
  }

  const Instant local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + fraction;
  return local - offset;
}

std::string format_iso8601(Instant t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss<Duration> tod{t - day_start};
  std::string out = fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}", static_cast<int>(ymd.year()),
                                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                                tod.hours().count(), tod.minutes().count(), tod.seconds().count());
  if (const auto us = tod.subseconds().count(); us != 0) {
    std::string frac = fmt::format("{:06}", us);
    while (frac.back() == '0') frac.pop_back();
    out += "." + frac;
  }
  out += "Z";
  return out;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::TruckGps: return "truck_gps";
    case EventKind::BucketReclaim: return "bucket_reclaim";
    case EventKind::DiggerGps: return "digger_gps";
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  text = trim(text);
  if (text == "truck_gps") return EventKind::TruckGps;
  if (text == "bucket_reclaim") return EventKind::BucketReclaim;
  if (text == "digger_gps") return EventKind::DiggerGps;
  return std::nullopt;
}

EventStream::EventStream(std::vector<TelemetryRecord> records) : records_(std::move(records)) {
  std::stable_sort(records_.begin(), records_.end(),
                   [](const TelemetryRecord& a, const TelemetryRecord& b) { return a.timestamp < b.timestamp; });
}

EventStream EventStream::only(EventKind kind) const {
  std::vector<TelemetryRecord> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [kind](const TelemetryRecord& r) { return r.kind == kind; });
  return EventStream(std::move(out));
}

LoadResult parse_csv(std::string_view text, std::optional<EventKind> expected_kind) {
  LoadResult result;
  std::vector<TelemetryRecord> records;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::array<std::size_t, kColumns.size()> column{};
  std::size_t width = 0;
  bool have_header = false;

  // Strip a UTF-8 byte order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (!have_header) {
      const auto header = split_csv_line(line);
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const auto it = std::find(header.begin(), header.end(), kColumns[c]);
        if (it == header.end()) {
          throw SchemaError(fmt::format("missing required column '{}'", kColumns[c]));
        }
        column[c] = static_cast<std::size_t>(it - header.begin());
      }
      width = header.size();
      have_header = true;
      continue;
    }
    if (trim(line).empty()) continue;

    const auto fields = split_csv_line(line);
    auto reject = [&](std::string reason) { result.rejects.push_back({line_no, std::move(reason)}); };
    if (fields.size() != width) {
      reject(fmt::format("expected {} fields, found {}", width, fields.size()));
      continue;
    }
    TelemetryRecord rec;
    const auto ts = parse_iso8601(fields[column[0]]);
    if (!ts) {
      reject(fmt::format("unparseable timestamp '{}'", fields[column[0]]));
      continue;
    }
    rec.timestamp = *ts;
    rec.equipment_id = fields[column[1]];
    const auto kind = parse_event_kind(fields[column[2]]);
    if (!kind) {
      reject(fmt::format("unknown kind '{}'", fields[column[2]]));
      continue;
    }
    if (expected_kind && *kind != *expected_kind) {
      reject(fmt::format("kind '{}' where '{}' was expected", to_string(*kind), to_string(*expected_kind)));
      continue;
    }
    rec.kind = *kind;
    const auto x = parse_double(fields[column[3]]);
    const auto y = parse_double(fields[column[4]]);
    if (!x || !y) {
      reject(fmt::format("non-numeric coordinate '{}','{}'", fields[column[3]], fields[column[4]]));
      continue;
    }
    rec.position = {*x, *y};
    if (const std::string& speed = fields[column[5]]; !speed.empty()) {
      const auto v = parse_double(speed);
      if (!v || *v < 0.0) {
        reject(fmt::format("invalid speed '{}'", speed));
        continue;
      }
      if (rec.kind == EventKind::TruckGps) rec.speed_mps = *v;
    }
    records.push_back(std::move(rec));
  }
  if (!have_header) throw SchemaError("missing header row");
  result.stream = EventStream(std::move(records));
  return result;
}

LoadResult load_csv(const std::filesystem::path& path, std::optional<EventKind> expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("failed reading '{}'", path.string()));
  return parse_csv(buf.str(), expected_kind);
}

std::string to_csv(const EventStream& stream) {
  std::string out = "timestamp,equipment_id,kind,x,y,speed_mps\n";
  for (const auto& r : stream.records()) {
    out += fmt::format("{},{},{},{},{},{}\n", format_iso8601(r.timestamp), csv_escape(r.equipment_id),
                       to_string(r.kind), csv_number(r.position.x), csv_number(r.position.y),
                       r.speed_mps ? csv_number(*r.speed_mps) : std::string());
  }
  return out;
}

std::string rejects_to_csv(std::span<const RowReject> rejects) {
  std::string out = "line,reason\n";
  for (const auto& r : rejects) out += fmt::format("{},{}\n", r.line, csv_escape(r.reason));
  return out;
}

EventStream filter_stationary_dumps(const EventStream& stream, double speed_threshold) {
  std::vector<TelemetryRecord> kept;
  std::map<std::string, const TelemetryRecord*> previous;
  for (const auto& rec : stream.records()) {
    if (rec.kind != EventKind::TruckGps) {
      kept.push_back(rec);
      continue;
    }
    const TelemetryRecord* prev = nullptr;
    if (auto it = previous.find(rec.equipment_id); it != previous.end()) prev = it->second;
    previous[rec.equipment_id] = &rec;

    bool still = false;
    if (rec.speed_mps) {
      still = *rec.speed_mps <= speed_threshold;
    } else if (rec.stillness_inferred) {
      still = true;
    } else if (prev != nullptr) {
      still = rec.timestamp - prev->timestamp <= kStillnessLookback &&
              distance(rec.position, prev->position) <= kStillnessRadius;
    }
    if (!still) continue;
    kept.push_back(rec);
    if (!rec.speed_mps) kept.back().stillness_inferred = true;
  }
  return EventStream(std::move(kept));
}

void WindowSpec::validate() const {
  if (dt <= Duration::zero()) throw ConfigError("window duration must be > 0");
  if (ts < t0) throw ConfigError("window stop time precedes start time");
}

std::vector<Window> make_windows(const WindowSpec& spec) {
  spec.validate();
  std::vector<Window> out;
  for (Instant start = spec.t0; start < spec.ts; start += spec.dt) {
    out.push_back({out.size(), start, std::min(start + spec.dt, spec.ts)});
  }
  return out;
}

std::span<const TelemetryRecord> slice_window(const EventStream& stream, const Window& w) {
  const auto recs = stream.records();
  auto by_time = [](const TelemetryRecord& r, Instant t) { return r.timestamp < t; };
  const auto lo = std::lower_bound(recs.begin(), recs.end(), w.start, by_time);
  const auto hi = std::lower_bound(lo, recs.end(), w.end, by_time);
  return recs.subspan(static_cast<std::size_t>(lo - recs.begin()), static_cast<std::size_t>(hi - lo));
}

std::vector<Point2> positions(std::span<const TelemetryRecord> records) {
  std::vector<Point2> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.position);
  return out;
}

}  // namespace stockpile
