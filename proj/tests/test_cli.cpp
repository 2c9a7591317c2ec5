#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stockpile/cli.hpp"

namespace fs = std::filesystem;
using namespace stockpile;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("stockpile_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_files(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

}  // namespace

TEST_CASE("growing scenario through algorithm 1 writes 15 snapshots") {
  TempDir dir("growing");
  REQUIRE(run({"synth", "--scenario", "growing", "--out", dir.path.string()}) == cli::kExitOk);
  const auto out = dir.path / "out";
  REQUIRE(run({"track", "--algorithm", "1", "--mode", "dump", "--model", "convex", "--window-hours", "2", "--dumps",
               (dir.path / "dumps.csv").string(), "--out", out.string(), "--format", "both"}) == cli::kExitOk);
  CHECK(count_files(out, ".geojson") == 15);
  CHECK(fs::exists(out / "snapshot_00000.geojson"));
  CHECK(fs::exists(out / "snapshot_00014.geojson"));
  CHECK(fs::exists(out / "snapshots.svg"));
  const auto manifest = slurp(out / "manifest.txt");
  CHECK(manifest.find("windows: 15\n") != std::string::npos);
  CHECK(manifest.find("duration_ms: ") != std::string::npos);
}

TEST_CASE("missing input is an i/o error with no outputs") {
  TempDir dir("missing");
  const auto out = dir.path / "out";
  std::string err;
  CHECK(run({"track", "--dumps", (dir.path / "nope.csv").string(), "--out", out.string()}, &err) == cli::kExitIo);
  CHECK_FALSE(err.empty());
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("alpha of zero is a configuration error") {
  TempDir dir("alpha");
  REQUIRE(run({"synth", "--scenario", "growing", "--out", dir.path.string()}) == cli::kExitOk);
  const auto out = dir.path / "out";
  std::string err;
  CHECK(run({"track", "--dumps", (dir.path / "dumps.csv").string(), "--model", "alpha", "--alpha", "0", "--out",
             out.string()},
            &err) == cli::kExitConfig);
  CHECK(err.find("alpha > 0") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("other configuration mistakes exit 1") {
  TempDir dir("badcfg");
  REQUIRE(run({"synth", "--scenario", "growing", "--out", dir.path.string()}) == cli::kExitOk);
  const auto dumps = (dir.path / "dumps.csv").string();
  const auto out = (dir.path / "out").string();
  CHECK(run({"track", "--dumps", dumps, "--model", "alpha", "--out", out}) == cli::kExitConfig);
  CHECK(run({"track", "--dumps", dumps, "--model", "hexagon", "--out", out}) == cli::kExitConfig);
  CHECK(run({"track", "--dumps", dumps, "--eps", "-1", "--out", out}) == cli::kExitConfig);
  CHECK(run({"track", "--dumps", dumps, "--window-hours", "0", "--out", out}) == cli::kExitConfig);
  CHECK(run({"track", "--dumps", dumps, "--digger-offset", "1;2", "--out", out}) == cli::kExitConfig);
  CHECK(run({"track", "--dumps", dumps, "--start", "2019-03-01", "--out", out}) == cli::kExitConfig);
  CHECK(run({"track", "--dumps", dumps, "--format", "pdf", "--out", out}) == cli::kExitConfig);
  CHECK(run({"track", "--dumps", dumps, "--algorithm", "3", "--out", out}) == cli::kExitConfig);
  CHECK(run({"track", "--bogus"}) == cli::kExitConfig);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("track runs are byte-identical") {
  TempDir dir("determinism");
  REQUIRE(run({"synth", "--scenario", "two-sided", "--out", dir.path.string()}) == cli::kExitOk);
  auto track = [&](const std::string& name) {
    const auto out = dir.path / name;
    REQUIRE(run({"track", "--dumps", (dir.path / "dumps.csv").string(), "--buckets",
                 (dir.path / "buckets.csv").string(), "--diggers", (dir.path / "diggers.csv").string(), "--model",
                 "alpha", "--alpha", "6", "--out", out.string(), "--format", "both", "--crs", "MGA zone 50"}) ==
            cli::kExitOk);
    return out;
  };
  const auto a = track("a");
  const auto b = track("b");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename();
    REQUIRE(fs::exists(b / name));
    if (name == "manifest.txt") continue;
    CHECK(slurp(e.path()) == slurp(b / name));
    ++files;
  }
  CHECK(files > 2);
  auto strip = [](std::string m) { return m.substr(0, m.find("duration_ms:")); };
  CHECK(strip(slurp(a / "manifest.txt")) == strip(slurp(b / "manifest.txt")));
  CHECK(slurp(a / "snapshot_00000.geojson").find("\"local_crs\":\"MGA zone 50\"") != std::string::npos);
}

TEST_CASE("rejected rows are reported next to the outputs") {
  TempDir dir("rejects");
  {
    std::ofstream f(dir.path / "dumps.csv");
    f << "timestamp,equipment_id,kind,x,y,speed_mps\n"
      << "2019-03-01T00:00:00Z,T1,truck_gps,0,0,0\n"
      << "2019-03-01T00:10:00Z,T1,truck_gps,oops,0,0\n"
      << "2019-03-01T00:20:00Z,T1,truck_gps,1,0,0\n"
      << "2019-03-01T00:30:00Z,T1,truck_gps,0,1,0\n";
  }
  const auto out = dir.path / "out";
  REQUIRE(run({"track", "--dumps", (dir.path / "dumps.csv").string(), "--min-pts", "2", "--out", out.string()}) ==
          cli::kExitOk);
  CHECK(slurp(out / "rejects_dumps.csv").find("line,reason\n3,") == 0);
  CHECK(slurp(out / "manifest.txt").find("input.dumps.rejects: 1\n") != std::string::npos);
}

TEST_CASE("no-digger-fallback keeps dumps through a digger-only reclaim") {
  TempDir dir("fallback");
  REQUIRE(run({"synth", "--scenario", "digger-only", "--out", dir.path.string()}) == cli::kExitOk);
  auto track = [&](const std::string& name, bool fallback) {
    std::vector<std::string> args{"track", "--dumps", (dir.path / "dumps.csv").string(), "--diggers",
                                  (dir.path / "diggers.csv").string(), "--window-hours", "24", "--out",
                                  (dir.path / name).string()};
    if (!fallback) args.push_back("--no-digger-fallback");
    REQUIRE(run(args) == cli::kExitOk);
    return slurp(dir.path / name / "manifest.txt");
  };
  CHECK(track("on", true).find("removed=20") != std::string::npos);
  CHECK(track("off", false).find("removed=20") == std::string::npos);
}

TEST_CASE("help and unknown scenario") {
  CHECK(run({"--help"}) == cli::kExitOk);
  CHECK(run({"synth", "--scenario", "volcano", "--out", fs::temp_directory_path().string()}) == cli::kExitConfig);
}
