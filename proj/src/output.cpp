#include "stockpile/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/core.h>

namespace stockpile {

std::string format_number(double value) {
  if (value == 0.0 || !std::isfinite(value)) return "0";
  std::array<char, 128> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  std::string text(buf.data(), res.ptr);
  const auto dot = text.find('.');
  if (dot == std::string::npos || text.size() - dot - 1 > 9) {
    res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, 9);
    text.assign(buf.data(), res.ptr);
    while (text.back() == '0') text.pop_back();
    if (text.back() == '.') text.pop_back();
  }
  if (text == "-0") text = "0";
  return text;
}

std::string json_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += fmt::format("\\u{:04x}", static_cast<int>(c));
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string snapshot_filename(std::size_t window_index) {
  return fmt::format("snapshot_{:05}.geojson", window_index);
}

namespace {

void write_feature(std::string& out, const PolygonFeature& f, const Snapshot& snap,
                   const GeoJsonOptions& options) {
  out += R"({"type":"Feature","geometry":{"type":"Polygon","coordinates":[[)";
  const auto ring = f.polygon.vertices();
  for (std::size_t i = 0; i <= ring.size(); ++i) {
    const Point2 p = ring[i % ring.size()];
    if (i > 0) out += ',';
    out += '[' + format_number(p.x) + ',' + format_number(p.y) + ']';
  }
  out += "]]},\"properties\":{";
  out += fmt::format(R"("window_index":{},"t_start":"{}","t_end":"{}","role":"{}","source":"{}",)",
                     f.window_index, format_iso8601(snap.window.start), format_iso8601(snap.window.end),
                     to_string(f.role), to_string(f.source));
  out += fmt::format(R"("cluster_id":{},"model":"{}","area_m2":{}}}}})", f.cluster_id,
                     json_escape(options.model_name), format_number(f.area_m2));
}

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(Point2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  bool valid() const { return min_x <= max_x; }
};

}  // namespace

std::string emit_geojson(const Snapshot& snapshot, const GeoJsonOptions& options) {
  std::string out;
  out += fmt::format(R"({{"type":"FeatureCollection","local_crs":"{}","window_index":{},)",
                     json_escape(options.crs_label), snapshot.window.index);
  out += fmt::format(R"("t_start":"{}","t_end":"{}","features":[)", format_iso8601(snapshot.window.start),
                     format_iso8601(snapshot.window.end));
  bool first = true;
  for (const auto* list : {&snapshot.dump_features, &snapshot.reclaim_features}) {
    for (const auto& f : *list) {
      out += first ? "\n" : ",\n";
      first = false;
      write_feature(out, f, snapshot, options);
    }
  }
  out += first ? "]}\n" : "\n]}\n";
  return out;
}

Rgb ramp_colour(std::size_t rank, std::size_t count) {
  // Dark purple to yellow; red and green rise monotonically with rank.
  constexpr Rgb kOld{68, 1, 84};
  constexpr Rgb kNew{253, 231, 37};
  const double t = count > 1 ? static_cast<double>(rank) / static_cast<double>(count - 1) : 1.0;
  auto mix = [t](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
  return {mix(kOld.r, kNew.r), mix(kOld.g, kNew.g), mix(kOld.b, kNew.b)};
}

std::string to_hex(Rgb c) { return fmt::format("#{:02x}{:02x}{:02x}", c.r, c.g, c.b); }

std::string emit_svg(std::span<const Snapshot> snapshots) {
  Bounds box;
  for (const auto& snap : snapshots) {
    for (const auto* list : {&snap.dump_features, &snap.reclaim_features}) {
      for (const auto& f : *list) {
        for (const Point2& p : f.polygon.vertices()) box.add(p);
      }
    }
  }
  if (!box.valid()) box = Bounds{0.0, 0.0, 1.0, 1.0};
  double width = box.max_x - box.min_x;
  double height = box.max_y - box.min_y;
  if (width <= 0.0) width = 1.0;
  if (height <= 0.0) height = 1.0;
  const double mx = 0.05 * width;
  const double my = 0.05 * height;
  // SVG y grows downwards, so northings are negated.
  const double vx = box.min_x - mx;
  const double vy = -box.max_y - my;
  const double vw = width + 2 * mx;
  const double vh = height + 2 * my;

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n",
      format_number(vx), format_number(vy), format_number(vw), format_number(vh),
      std::max(1L, std::lround(800.0 * vh / vw)));
  out +=
      "<style>"
      "path{vector-effect:non-scaling-stroke;stroke-width:1.5px}"
      ".dump{stroke:#1f1f1f;stroke-dasharray:none;fill-opacity:0.55}"
      ".reclaim{stroke:#c0392b;stroke-dasharray:6 3;fill-opacity:0.3}"
      ".legend text{font-family:sans-serif}"
      "</style>\n";

  out += "<g class=\"polygons\">\n";
  for (std::size_t rank = 0; rank < snapshots.size(); ++rank) {
    const auto& snap = snapshots[rank];
    const std::string fill = to_hex(ramp_colour(rank, snapshots.size()));
    for (const auto* list : {&snap.dump_features, &snap.reclaim_features}) {
      for (const auto& f : *list) {
        std::string d;
        const auto ring = f.polygon.vertices();
        for (std::size_t i = 0; i < ring.size(); ++i) {
          d += fmt::format("{}{} {} ", i == 0 ? "M" : "L", format_number(ring[i].x), format_number(-ring[i].y));
        }
        d += "Z";
        out += fmt::format("<path class=\"{}\" data-window=\"{}\" fill=\"{}\" d=\"{}\"/>\n", to_string(f.role),
                           f.window_index, fill, d);
      }
    }
  }
  out += "</g>\n";

  const double row = vh / std::max<double>(30.0, static_cast<double>(snapshots.size()) + 4.0);
  out += "<g class=\"legend\">\n";
  for (std::size_t rank = 0; rank < snapshots.size(); ++rank) {
    const double y = vy + row * (static_cast<double>(rank) + 1.0);
    out += fmt::format(
        "<rect class=\"legend-entry\" data-window=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>"
        "<text x=\"{}\" y=\"{}\" font-size=\"{}\">{}</text>\n",
        snapshots[rank].window.index, format_number(vx + row), format_number(y), format_number(row),
        format_number(0.8 * row), to_hex(ramp_colour(rank, snapshots.size())), format_number(vx + 2.5 * row),
        format_number(y + 0.7 * row), format_number(0.7 * row), snapshots[rank].window.index);
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace stockpile
