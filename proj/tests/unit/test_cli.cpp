#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <stdexcept>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "memthermo/cli.hpp"

using namespace memthermo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::vector<const char*> argv{"memthermo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "memthermo_test_cli" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("cycle with defaults") {
  const auto dir = scratch("cycle");
  const auto r = run({"cycle", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  CHECK(first_line(slurp(dir / "trace.csv")) == "t_s,t_set_K,t_air_K,t_dev_K,r_ohm,phase");
  const auto manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("run.experiment = cycle\n") != std::string::npos);
  CHECK(manifest.find("run.seed = 1\n") != std::string::npos);
  CHECK(manifest.find("meta.version = 0.1.0\n") != std::string::npos);
}

TEST_CASE("rerun from the manifest is byte-identical") {
  for (const std::string cmd : {"cycle", "hsr", "iv", "signature", "thermometer", "nullcline"}) {
    const auto a = scratch(cmd + "_a");
    const auto b = scratch(cmd + "_b");
    REQUIRE(run({cmd, "--out", a.string(), "--seed", "11"}).code == 0);
    REQUIRE(run({cmd, "--config", (a / "manifest.txt").string(), "--out", b.string()}).code == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      if (name == "manifest.txt") continue;
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), cmd << "/" << name.string());
    }
  }
}

TEST_CASE("flags override the config") {
  const auto dir = scratch("flags");
  REQUIRE(run({"thermometer", "--out", dir.string(), "--preset", "L2", "--seed", "5"}).code == 0);
  const auto m = slurp(dir / "manifest.txt");
  CHECK(m.find("device.level = L2\n") != std::string::npos);
  CHECK(m.find("run.seed = 5\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("errors");
  fs::create_directories(dir);

  SUBCASE("unknown key names the key") {
    std::ofstream(dir / "bad.txt") << "switching.bogus_key = 3\n";
    const auto r = run({"cycle", "--config", (dir / "bad.txt").string(), "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("switching.bogus_key") != std::string::npos);
    CHECK(r.err.rfind("memthermo: error code=1 kind=config message=", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }
  SUBCASE("usage") {
    CHECK(run({}).code == 1);
    CHECK(run({"bake"}).code == 1);
    CHECK(run({"cycle", "--seed", "minus"}).code == 1);
  }
  SUBCASE("bad value") {
    std::ofstream(dir / "v.txt") << "device.level = L9\n";
    CHECK(run({"cycle", "--config", (dir / "v.txt").string(), "--out", dir.string()}).code == 1);
  }
  SUBCASE("protocol") {
    std::ofstream(dir / "p.txt") << "cycle.hold_s = 600\n";
    const auto r = run({"cycle", "--config", (dir / "p.txt").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("kind=protocol") != std::string::npos);
  }
  SUBCASE("extraction") {
    std::ofstream(dir / "e.txt") << "iv.temperatures = 300,360\n";
    const auto r = run({"signature", "--config", (dir / "e.txt").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("kind=extraction") != std::string::npos);
  }
  SUBCASE("i/o") {
    CHECK(run({"cycle", "--config", (dir / "missing.txt").string()}).code == 3);
    CHECK(run({"cycle", "--out", "/proc/memthermo/out"}).code == 3);
    std::ofstream(dir / "s.txt") << "signature.iv_csv = " << (dir / "none.csv").string() << "\n";
    CHECK(run({"signature", "--config", (dir / "s.txt").string(), "--out", dir.string()}).code == 3);
  }
  SUBCASE("help") { CHECK(run({"--help"}).code == 0); }
}

TEST_CASE("signature reads an IV file") {
  const auto a = scratch("sig_a");
  const auto b = scratch("sig_b");
  REQUIRE(run({"iv", "--out", a.string()}).code == 0);
  fs::create_directories(b);
  std::ofstream(b / "cfg.txt") << "signature.iv_csv = " << (a / "iv.csv").string() << "\n";
  REQUIRE(run({"signature", "--config", (b / "cfg.txt").string(), "--out", b.string()}).code == 0);
  const auto ex = slurp(b / "extraction.csv");
  CHECK(ex.substr(ex.find('\n') + 1).back() == '\n');
  CHECK(ex.find(",1\n") != std::string::npos);  // thermionic_consistent
}
