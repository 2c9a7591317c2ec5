#include "stockpile/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "stockpile/errors.hpp"
#include "stockpile/events.hpp"
#include "stockpile/output.hpp"
#include "stockpile/scenario.hpp"
#include "stockpile/tracker.hpp"

namespace stockpile::cli {

namespace fs = std::filesystem;

namespace {

struct Input {
  std::string role;  // dumps | buckets | diggers
  std::string path;
  EventKind kind;
  LoadResult data;
  std::uint64_t digest = 0;
};

std::uint64_t fnv1a64(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << contents;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

Point2 parse_offset(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError(fmt::format("--digger-offset expects DX,DY, got '{}'", text));
  try {
    std::size_t used_x = 0;
    std::size_t used_y = 0;
    const std::string xs = text.substr(0, comma);
    const std::string ys = text.substr(comma + 1);
    const Point2 p{std::stod(xs, &used_x), std::stod(ys, &used_y)};
    if (used_x != xs.size() || used_y != ys.size() || !is_finite(p)) throw std::invalid_argument(text);
    return p;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("--digger-offset expects DX,DY in metres, got '{}'", text));
  }
}

Instant parse_instant_flag(const std::string& flag, const std::string& text) {
  const auto t = parse_iso8601(text);
  if (!t) throw ConfigError(fmt::format("{} expects an ISO 8601 time with offset, got '{}'", flag, text));
  return *t;
}

Duration default_window(const TrackOptions& o) {
  if (o.algorithm == 2) return kLedgerWindow;
  return o.mode == "reclaim" ? kReclaimWindow : kDumpWindow;
}

// Everything that can be checked before touching the filesystem.
TrackerConfig config_from(const TrackOptions& o) {
  if (o.algorithm != 1 && o.algorithm != 2) throw ConfigError("--algorithm must be 1 or 2");
  if (o.mode != "dump" && o.mode != "reclaim") throw ConfigError("--mode must be dump or reclaim");
  if (o.format != "geojson" && o.format != "svg" && o.format != "both") {
    throw ConfigError("--format must be geojson, svg or both");
  }
  TrackerConfig cfg;
  if (o.model == "convex") {
    cfg.model = PolygonModel::convex();
  } else if (o.model == "alpha") {
    if (!o.alpha) throw ConfigError("--model alpha needs --alpha METERS (alpha > 0)");
    cfg.model = PolygonModel::alpha(AlphaParam::meters(*o.alpha));
  } else {
    throw ConfigError("--model must be convex or alpha");
  }
  if (o.min_pts < 1) throw ConfigError("--min-pts must be >= 1");
  cfg.dump_dbscan = {o.eps, static_cast<std::size_t>(o.min_pts)};
  cfg.reclaim_dbscan = cfg.dump_dbscan;
  cfg.digger_offset = parse_offset(o.digger_offset);
  cfg.stationary_speed = o.stationary_speed;
  cfg.digger_fallback = o.digger_fallback;

  if (o.window_hours) {
    const double hours = *o.window_hours;
    if (!std::isfinite(hours) || !(hours > 0.0)) throw ConfigError("--window-hours must be > 0");
    cfg.window.dt = Duration{static_cast<std::int64_t>(std::llround(hours * 3600.0 * 1e6))};
    if (cfg.window.dt <= Duration::zero()) throw ConfigError("--window-hours is too small");
  } else {
    cfg.window.dt = default_window(o);
  }
  if (!o.start.empty()) cfg.window.t0 = parse_instant_flag("--start", o.start);
  if (!o.end.empty()) cfg.window.ts = parse_instant_flag("--end", o.end);
  if (!o.start.empty() && !o.end.empty() && cfg.window.ts < cfg.window.t0) {
    throw ConfigError("--end precedes --start");
  }
  cfg.dump_dbscan.validate();
  if (o.algorithm == 1 && o.mode == "dump" && o.dumps.empty()) throw ConfigError("--dumps is required");
  if (o.algorithm == 1 && o.mode == "reclaim" && o.buckets.empty()) throw ConfigError("--buckets is required");
  if (o.algorithm == 2 && o.dumps.empty()) throw ConfigError("--dumps is required");
  return cfg;
}

// Fills in whichever of start/end the flags left open from the event times.
void resolve_window(const TrackOptions& o, const std::vector<Input>& inputs, TrackerConfig& cfg) {
  std::optional<Instant> first;
  std::optional<Instant> last;
  for (const auto& in : inputs) {
    const auto recs = in.data.stream.records();
    if (recs.empty()) continue;
    if (!first || recs.front().timestamp < *first) first = recs.front().timestamp;
    if (!last || recs.back().timestamp > *last) last = recs.back().timestamp;
  }
  if (o.start.empty()) {
    if (!first) throw ConfigError("inputs hold no events; pass --start and --end");
    cfg.window.t0 = *first;
  }
  if (o.end.empty()) {
    const Instant cover = last && *last >= cfg.window.t0 ? *last : cfg.window.t0;
    const auto count = (cover - cfg.window.t0) / cfg.window.dt + 1;
    cfg.window.ts = cfg.window.t0 + cfg.window.dt * count;
  }
  if (cfg.window.ts < cfg.window.t0) throw ConfigError("--end precedes --start");
}

std::string manifest_text(const TrackOptions& o, const TrackerConfig& cfg, const std::vector<Input>& inputs,
                          const std::vector<Snapshot>& snapshots, std::int64_t duration_ms) {
  std::string m;
  auto kv = [&m](std::string_view key, const std::string& value) { m += fmt::format("{}: {}\n", key, value); };
  kv("command", "track");
  kv("algorithm", std::to_string(o.algorithm));
  if (o.algorithm == 1) kv("mode", o.mode);
  kv("model", std::string(cfg.model.name()));
  kv("alpha", cfg.model.kind() == PolygonModel::Kind::Alpha ? format_number(cfg.model.alpha_param().value())
                                                            : std::string("inf"));
  kv("eps", format_number(cfg.dump_dbscan.eps));
  kv("min_pts", std::to_string(cfg.dump_dbscan.min_pts));
  kv("window_seconds", format_number(std::chrono::duration<double>(cfg.window.dt).count()));
  kv("start", format_iso8601(cfg.window.t0));
  kv("end", format_iso8601(cfg.window.ts));
  kv("digger_offset", format_number(cfg.digger_offset.x) + "," + format_number(cfg.digger_offset.y));
  kv("digger_fallback", cfg.digger_fallback ? "true" : "false");
  kv("stationary_speed", format_number(cfg.stationary_speed));
  kv("format", o.format);
  kv("crs", o.crs);
  for (const auto& in : inputs) {
    kv(fmt::format("input.{}.path", in.role), in.path);
    kv(fmt::format("input.{}.fnv1a64", in.role), fmt::format("{:016x}", in.digest));
    kv(fmt::format("input.{}.records", in.role), std::to_string(in.data.stream.size()));
    kv(fmt::format("input.{}.rejects", in.role), std::to_string(in.data.rejects.size()));
  }
  kv("windows", std::to_string(snapshots.size()));
  std::size_t dumps = 0;
  std::size_t reclaims = 0;
  for (const auto& s : snapshots) {
    dumps += s.dump_features.size();
    reclaims += s.reclaim_features.size();
    kv(fmt::format("window.{:05}", s.window.index),
       fmt::format("dump_features={} reclaim_features={} degenerate_clusters={} removed={} active={} "
                   "overlap_m2={} reclaim_skipped={}",
                   s.dump_features.size(), s.reclaim_features.size(), s.degenerate_clusters,
                   s.removed_this_window, s.ledger_active, format_number(s.dump_overlap_m2),
                   s.reclaim_skipped ? "true" : "false"));
  }
  kv("total.dump_features", std::to_string(dumps));
  kv("total.reclaim_features", std::to_string(reclaims));
  kv("duration_ms", std::to_string(duration_ms));
  return m;
}

}  // namespace

int cmd_track(const TrackOptions& o, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  TrackerConfig cfg;
  try {
    cfg = config_from(o);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<Input> inputs;
  auto add_input = [&inputs](std::string role, const std::string& path, EventKind kind) {
    if (!path.empty()) inputs.push_back({std::move(role), path, kind, {}, 0});
  };
  if (o.algorithm == 1) {
    if (o.mode == "dump") add_input("dumps", o.dumps, EventKind::TruckGps);
    else add_input("buckets", o.buckets, EventKind::BucketReclaim);
  } else {
    add_input("dumps", o.dumps, EventKind::TruckGps);
    add_input("buckets", o.buckets, EventKind::BucketReclaim);
    add_input("diggers", o.diggers, EventKind::DiggerGps);
  }
  try {
    for (auto& in : inputs) {
      in.data = load_csv(in.path, in.kind);
      in.digest = fnv1a64(in.path);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  for (const auto& in : inputs) {
    if (!in.data.rejects.empty()) {
      err << fmt::format("warning: {} rejected {} row(s), first at line {}: {}\n", in.path,
                         in.data.rejects.size(), in.data.rejects.front().line, in.data.rejects.front().reason);
    }
  }

  std::vector<Snapshot> snapshots;
  try {
    resolve_window(o, inputs, cfg);
    auto stream_of = [&inputs](std::string_view role) {
      for (const auto& in : inputs) {
        if (in.role == role) return in.data.stream;
      }
      return EventStream();
    };
    if (o.algorithm == 1) {
      if (o.mode == "dump") {
        snapshots = run_algorithm1(filter_stationary_dumps(stream_of("dumps"), cfg.stationary_speed), cfg,
                                   Algorithm1Mode::DumpOnly);
      } else {
        snapshots = run_algorithm1(stream_of("buckets"), cfg, Algorithm1Mode::ReclaimOnly);
      }
    } else {
      const Algorithm2Streams streams{filter_stationary_dumps(stream_of("dumps"), cfg.stationary_speed),
                                      stream_of("buckets"), stream_of("diggers")};
      snapshots = run_algorithm2(streams, cfg).snapshots;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const fs::path out_dir(o.out);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
    const GeoJsonOptions geo{o.crs, std::string(cfg.model.name())};
    if (o.format == "geojson" || o.format == "both") {
      for (const auto& snap : snapshots) {
        write_file(out_dir / snapshot_filename(snap.window.index), emit_geojson(snap, geo));
      }
    }
    if ((o.format == "svg" || o.format == "both") && !snapshots.empty()) {
      write_file(out_dir / "snapshots.svg", emit_svg(snapshots));
    }
    for (const auto& in : inputs) {
      write_file(out_dir / fmt::format("rejects_{}.csv", in.role), rejects_to_csv(in.data.rejects));
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    write_file(out_dir / "manifest.txt", manifest_text(o, cfg, inputs, snapshots, ms.count()));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_synth(const SynthOptions& o, std::ostream& err) {
  scenario::Scenario s;
  auto seeded = [&o](std::uint64_t fallback) { return o.seed != 0 ? o.seed : fallback; };
  if (o.scenario == "growing") {
    s = scenario::growing_dumps(seeded(1));
  } else if (o.scenario == "dump-reclaim") {
    s = scenario::dump_reclaim_dump(seeded(2));
  } else if (o.scenario == "digger-only") {
    s = scenario::digger_only_reclaim(seeded(2));
  } else if (o.scenario == "two-sided") {
    s = scenario::two_sided_stockpile(seeded(3));
  } else {
    err << "error: unknown scenario '" << o.scenario << "'\n";
    return kExitConfig;
  }
  try {
    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    write_file(dir / "dumps.csv", to_csv(s.dumps));
    write_file(dir / "buckets.csv", to_csv(s.buckets));
    write_file(dir / "diggers.csv", to_csv(s.diggers));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stockpile footprint tracking from fleet GPS telemetry", "stockpile"};
  app.require_subcommand(1);

  TrackOptions track;
  auto* t = app.add_subcommand("track", "Build dump/reclaim polygons per time window");
  t->add_option("--algorithm", track.algorithm, "1: independent windows, 2: dump ledger with reclaim removal");
  t->add_option("--mode", track.mode, "Algorithm 1 input: dump or reclaim");
  t->add_option("--dumps", track.dumps, "Truck GPS CSV");
  t->add_option("--buckets", track.buckets, "Bucket reclaim CSV");
  t->add_option("--diggers", track.diggers, "Digger GPS CSV");
  t->add_option("--model", track.model, "convex or alpha");
  t->add_option("--alpha", track.alpha, "Longest triangle edge kept by the alpha model, metres");
  t->add_option("--eps", track.eps, "DBSCAN search distance, metres");
  t->add_option("--min-pts", track.min_pts, "DBSCAN minimum points, self included");
  t->add_option("--window-hours", track.window_hours, "Window length in hours (fractional allowed)");
  t->add_option("--start", track.start, "First window start, ISO 8601 with offset");
  t->add_option("--end", track.end, "Stop time, ISO 8601 with offset");
  t->add_option("--digger-offset", track.digger_offset, "DX,DY added to digger fixes, metres");
  t->add_option("--stationary-speed", track.stationary_speed, "Max truck speed for a dump fix, m/s");
  t->add_flag("!--no-digger-fallback", track.digger_fallback, "Never reclaim from digger GPS");
  t->add_option("--out", track.out, "Output directory");
  t->add_option("--format", track.format, "geojson, svg or both");
  t->add_option("--crs", track.crs, "Label echoed as local_crs in GeoJSON");

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic telemetry scenario as CSV");
  s->add_option("--scenario", synth.scenario, "growing, dump-reclaim, digger-only or two-sided");
  s->add_option("--seed", synth.seed, "Random seed (0 = scenario default)");
  s->add_option("--out", synth.out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  if (t->parsed()) return cmd_track(track, err);
  return cmd_synth(synth, err);
}

}  // namespace stockpile::cli
