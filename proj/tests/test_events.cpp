#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "stockpile/errors.hpp"
#include "stockpile/events.hpp"

using namespace stockpile;
using namespace std::chrono_literals;

namespace {

constexpr std::string_view kHeader = "timestamp,equipment_id,kind,x,y,speed_mps\n";

Instant at(std::string_view iso) { return parse_iso8601(iso).value(); }

TelemetryRecord truck(Instant t, std::string id, Point2 p, std::optional<double> speed) {
  TelemetryRecord r;
  r.timestamp = t;
  r.equipment_id = std::move(id);
  r.kind = EventKind::TruckGps;
  r.position = p;
  r.speed_mps = speed;
  return r;
}

}  // namespace

TEST_CASE("iso 8601 parsing normalizes offsets to UTC") {
  CHECK(at("2019-03-01T08:00:00+08:00") == at("2019-03-01T00:00:00Z"));
  CHECK(at("2019-03-01T08:00:00+0800") == at("2019-03-01T00:00:00Z"));
  CHECK(at("2019-03-01T00:00:00-02") == at("2019-03-01T02:00:00Z"));
  CHECK(at("2019-03-01T00:00:00.250Z") - at("2019-03-01T00:00:00Z") == 250ms);
  CHECK_FALSE(parse_iso8601("2019-03-01T00:00:00"));
  CHECK_FALSE(parse_iso8601("2019-02-30T00:00:00Z"));
  CHECK_FALSE(parse_iso8601("yesterday"));
  CHECK_FALSE(parse_iso8601("2019-03-01T25:00:00Z"));
}

TEST_CASE("format_iso8601 round-trips") {
  for (auto text : {"2019-03-01T00:00:00Z", "2020-02-29T23:59:59.5Z", "1999-12-31T12:00:00.000001Z"}) {
    CHECK(format_iso8601(at(text)) == text);
  }
}

TEST_CASE("event kinds round-trip through text") {
  for (auto k : {EventKind::TruckGps, EventKind::BucketReclaim, EventKind::DiggerGps}) {
    CHECK(parse_event_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_event_kind("shovel"));
}

TEST_CASE("header-only csv loads as an empty stream") {
  const auto r = parse_csv(kHeader);
  CHECK(r.stream.empty());
  CHECK(r.rejects.empty());
}

TEST_CASE("out-of-order rows come back sorted") {
  std::string text(kHeader);
  text += "2019-03-01T02:00:00Z,T2,truck_gps,1,1,0\n";
  text += "2019-03-01T00:00:00Z,T1,truck_gps,0,0,0\n";
  text += "2019-03-01T01:00:00Z,T3,truck_gps,2,2,\n";
  const auto r = parse_csv(text);
  REQUIRE(r.stream.size() == 3);
  CHECK(r.stream.records()[0].equipment_id == "T1");
  CHECK(r.stream.records()[1].equipment_id == "T3");
  CHECK(r.stream.records()[2].equipment_id == "T2");
  CHECK_FALSE(r.stream.records()[1].speed_mps);
}

TEST_CASE("ties keep file order") {
  std::string text(kHeader);
  for (int i = 0; i < 5; ++i) text += "2019-03-01T00:00:00Z,T" + std::to_string(i) + ",truck_gps,0,0,0\n";
  const auto r = parse_csv(text);
  for (int i = 0; i < 5; ++i) CHECK(r.stream.records()[i].equipment_id == "T" + std::to_string(i));
  // Re-sorting a sorted stream changes nothing.
  CHECK(EventStream(std::vector(r.stream.records().begin(), r.stream.records().end())).records().size() == 5);
}

TEST_CASE("malformed rows are rejected with their line numbers") {
  std::string text(kHeader);
  text += "2019-03-01T00:00:00Z,T1,truck_gps,0,0,0\n";       // line 2
  text += "2019-03-01T00:00:01Z,T1,truck_gps,abc,0,0\n";     // line 3
  text += "not-a-time,T1,truck_gps,0,0,0\n";                 // line 4
  text += "2019-03-01T00:00:02Z,T1,excavator,0,0,0\n";       // line 5
  text += "2019-03-01T00:00:03Z,T1,truck_gps,0,0\n";         // line 6
  text += "2019-03-01T00:00:04Z,T1,truck_gps,0,0,-1\n";      // line 7
  text += "2019-03-01T00:00:05Z,T1,truck_gps,1e400,0,0\n";   // line 8
  const auto r = parse_csv(text);
  CHECK(r.stream.size() == 1);
  REQUIRE(r.rejects.size() == 6);
  for (std::size_t i = 0; i < r.rejects.size(); ++i) {
    CHECK(r.rejects[i].line == i + 3);
    CHECK_FALSE(r.rejects[i].reason.empty());
  }
  const auto report = rejects_to_csv(r.rejects);
  CHECK(report.rfind("line,reason\n3,", 0) == 0);
}

TEST_CASE("a single non-numeric x is one reject") {
  std::string text(kHeader);
  text += "2019-03-01T00:00:00Z,T1,truck_gps,0,0,0\n";
  text += "2019-03-01T00:00:01Z,T1,truck_gps,x,0,0\n";
  const auto r = parse_csv(text);
  CHECK(r.stream.size() == 1);
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects[0].line == 3);
}

TEST_CASE("expected kind rejects rows of other kinds") {
  std::string text(kHeader);
  text += "2019-03-01T00:00:00Z,B1,bucket_reclaim,0,0,\n";
  text += "2019-03-01T00:00:01Z,T1,truck_gps,0,0,0\n";
  const auto r = parse_csv(text, EventKind::BucketReclaim);
  CHECK(r.stream.size() == 1);
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects[0].line == 3);
}

TEST_CASE("columns may come in any order, quoted, with extras") {
  const std::string text =
      "\xEF\xBB\xBF" "x,note,y,kind,equipment_id,timestamp,speed_mps\n"
      "10.5,\"a, b\",-2,digger_gps,\"D 1\",2019-03-01T00:00:00Z,\n";
  const auto r = parse_csv(text);
  REQUIRE(r.stream.size() == 1);
  const auto& rec = r.stream.records()[0];
  CHECK(rec.position == Point2{10.5, -2});
  CHECK(rec.equipment_id == "D 1");
  CHECK(rec.kind == EventKind::DiggerGps);
}

TEST_CASE("missing columns and unreadable files throw") {
  CHECK_THROWS_AS(parse_csv("timestamp,equipment_id,kind,x,y\n"), SchemaError);
  CHECK_THROWS_AS(parse_csv(""), SchemaError);
  CHECK_THROWS_AS(load_csv("/nonexistent/dir/file.csv"), IoError);
}

TEST_CASE("to_csv output loads back to the same stream") {
  std::vector<TelemetryRecord> recs{truck(at("2019-03-01T00:00:00Z"), "T,1", {1.25, -3}, 0.1),
                                    truck(at("2019-03-01T00:00:01.5Z"), "T2", {1e5, 7e6}, std::nullopt)};
  const EventStream s(recs);
  const auto path = std::filesystem::temp_directory_path() / "stockpile_events_roundtrip.csv";
  std::ofstream(path) << to_csv(s);
  const auto r = load_csv(path);
  std::filesystem::remove(path);
  CHECK(r.rejects.empty());
  CHECK(std::ranges::equal(r.stream.records(), s.records()));
}

TEST_CASE("to_csv never writes exponents") {
  const EventStream s({truck(at("2019-03-01T00:00:00Z"), "T", {500000, 1e-7}, 0.0)});
  CHECK(to_csv(s).find("500000,0.0000001,0\n") != std::string::npos);
}

TEST_CASE("stationary filter by speed") {
  const auto t = at("2019-03-01T00:00:00Z");
  const EventStream s({truck(t, "T1", {0, 0}, 0.0), truck(t + 1s, "T2", {5, 5}, 5.0),
                       truck(t + 2s, "T3", {9, 9}, 0.3)});
  const auto kept = filter_stationary_dumps(s, 0.3);
  REQUIRE(kept.size() == 2);
  CHECK(kept.records()[0].equipment_id == "T1");
  CHECK(kept.records()[1].equipment_id == "T3");
}

TEST_CASE("stationary filter infers stillness without a speed") {
  const auto t = at("2019-03-01T00:00:00Z");
  const EventStream s({truck(t, "T1", {0, 0}, std::nullopt), truck(t + 8s, "T1", {0.5, 0}, std::nullopt),
                       truck(t + 30s, "T1", {0.6, 0}, std::nullopt), truck(t + 31s, "T1", {5, 0}, std::nullopt),
                       truck(t + 32s, "T2", {5.1, 0}, std::nullopt)});
  const auto kept = filter_stationary_dumps(s);
  REQUIRE(kept.size() == 1);
  CHECK(kept.records()[0].timestamp == t + 8s);
  CHECK(kept.records()[0].stillness_inferred);
}

TEST_CASE("stationary filter is idempotent and passes other kinds") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 3);
  std::bernoulli_distribution has_speed(0.5);
  const auto t = at("2019-03-01T00:00:00Z");
  std::vector<TelemetryRecord> recs;
  for (int i = 0; i < 400; ++i) {
    auto r = truck(t + std::chrono::seconds(i * 3 / 2), "T" + std::to_string(i % 3), {u(rng), u(rng)},
                   has_speed(rng) ? std::optional(u(rng) * 0.2) : std::nullopt);
    if (i % 17 == 0) r.kind = EventKind::BucketReclaim, r.speed_mps.reset();
    recs.push_back(r);
  }
  const EventStream s(recs);
  const auto once = filter_stationary_dumps(s);
  const auto twice = filter_stationary_dumps(once);
  CHECK(std::ranges::equal(once.records(), twice.records()));
  CHECK(once.only(EventKind::BucketReclaim).size() == s.only(EventKind::BucketReclaim).size());
  CHECK(once.size() < s.size());
}

TEST_CASE("windows tile the horizon and the last one is clipped") {
  const auto t0 = at("2019-03-01T00:00:00Z");
  const auto w = make_windows({t0, 2h, t0 + 5h});
  REQUIRE(w.size() == 3);
  CHECK(w[0] == Window{0, t0, t0 + 2h});
  CHECK(w[1].start == w[0].end);
  CHECK(w[2].end == t0 + 5h);
  CHECK(make_windows({t0, 2h, t0}).empty());
  CHECK_THROWS_AS(make_windows({t0, 0h, t0 + 1h}), ConfigError);
  CHECK_THROWS_AS(make_windows({t0, 1h, t0 - 1h}), ConfigError);
}

TEST_CASE("slice_window is half-open") {
  const auto t0 = at("2019-03-01T00:00:00Z");
  const EventStream s({truck(t0, "A", {0, 0}, 0), truck(t0 + 1h, "B", {0, 0}, 0)});
  const Window w{0, t0, t0 + 1h};
  const auto inside = slice_window(s, w);
  REQUIRE(inside.size() == 1);
  CHECK(inside[0].equipment_id == "A");
}

TEST_CASE("slices over all windows partition the records") {
  std::mt19937_64 rng(4);
  const auto t0 = at("2019-03-01T00:00:00Z");
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::int64_t> offset(-3600, 30 * 3600);
    std::vector<TelemetryRecord> recs;
    for (int i = 0; i < 300; ++i) recs.push_back(truck(t0 + std::chrono::seconds(offset(rng)), "T", {0, 0}, 0));
    const EventStream s(recs);
    const WindowSpec spec{t0, std::chrono::minutes(std::uniform_int_distribution<int>(7, 300)(rng)), t0 + 24h};
    std::size_t total = 0;
    for (const auto& w : make_windows(spec)) total += slice_window(s, w).size();
    const auto expected = std::ranges::count_if(
        s.records(), [&](const TelemetryRecord& r) { return r.timestamp >= spec.t0 && r.timestamp < spec.ts; });
    CHECK(total == static_cast<std::size_t>(expected));
  }
}
