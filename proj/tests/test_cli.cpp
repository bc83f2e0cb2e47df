// Drives the tdaeeg executable as a subprocess.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(TDAEEG_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("tdaeeg_cli_" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string operator/(const std::string& s) const { return (dir / s).string(); }
};

}  // namespace

TEST_CASE("help and version") {
  auto r = run("--help");
  CHECK(r.code == 0);
  for (const char* sub : {"ingest", "embed", "denoise", "persist", "filter", "vectorize", "classify", "run", "sweep",
                          "plot", "synth"})
    CHECK_MESSAGE(r.out.find(sub) != std::string::npos, sub);
  CHECK(run("ingest --help").out.find("zero phase") != std::string::npos);
  CHECK(run("--version").code == 0);
  CHECK(run("frobnicate").code != 0);
}

TEST_CASE("synth and plot") {
  Scratch s;
  CHECK(run("synth --kind circle --n 20 --out " + s / "c.csv").code == 0);
  CHECK(fs::exists(s / "c.csv"));
  auto bad = run("plot --kind pie --input " + s / "c.csv" + " --output " + s / "x.svg");
  CHECK(bad.code != 0);
  CHECK(bad.out.find("unknown artifact type") != std::string::npos);
}

TEST_CASE("end-to-end with stage commands") {
  Scratch s;
  REQUIRE(run("synth --kind two-class --subjects 3 --channels 2 --segments 1 --window 256 --out " + s / "data").code == 0);
  const std::string common = " --workdir " + s / "work" + " --set channels=Fz,F8 --set window_sec=2";
  auto ing = run("ingest --dataset " + s / "data/dataset.csv" + common);
  CHECK_MESSAGE(ing.code == 0, ing.out);
  for (const char* st : {"embed", "denoise", "persist", "filter"}) {
    auto r = run(std::string(st) + common);
    CHECK_MESSAGE(r.code == 0, st, r.out);
  }
  CHECK(run("vectorize --t1 auto --t2 auto" + common).code == 0);
  const auto features = read(s / "work/vectorize/features.csv");
  auto cls = run("classify --folds 3" + common);
  CHECK_MESSAGE(cls.code == 0, cls.out);
  CHECK(cls.out.find("acc=") != std::string::npos);

  CHECK(run("vectorize --t1 auto --t2 auto" + common).code == 0);
  CHECK(read(s / "work/vectorize/features.csv") == features);

  auto sw = run("sweep --a-values 0,1 --c-values 3 --folds 3 --t1 auto --t2 auto --table " + s / "sweep.csv" + common);
  CHECK_MESSAGE(sw.code == 0, sw.out);
  CHECK(fs::exists(s / "sweep.csv"));

  CHECK(run("plot --kind diagram --input " + s / "work/filtered/A1.csv" + " --output " + s / "a1.svg").code == 0);
  CHECK(run("plot --kind image --input " + s / "work/vectorize/A1_pi.csv" + " --output " + s / "a1.png").code == 0);

  auto big = run("denoise --keep 100000" + common);
  CHECK(big.code != 0);
  CHECK(big.out.find("denoise") != std::string::npos);
}

TEST_CASE("config errors exit nonzero with a message") {
  Scratch s;
  std::ofstream(s / "bad.cfg") << "unknown_key = 3\n";
  auto r = run("run --config " + s / "bad.cfg");
  CHECK(r.code != 0);
  CHECK(r.out.find("unknown_key") != std::string::npos);
  auto m = run("embed --workdir " + s / "nothing");
  CHECK(m.code != 0);
  CHECK(m.out.find("embed") != std::string::npos);
}
