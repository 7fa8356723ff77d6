#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#ifndef LLGSIM_BIN
#define LLGSIM_BIN "llgsim"
#endif

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(LLGSIM_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// CSV text with the wall-clock columns masked out (timing legitimately varies
// between runs; everything else must be bit-identical).
std::string numeric_payload(const std::string& csv, int seconds_col) {
  std::istringstream in(csv);
  std::string line, out;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      out += line + "\n";
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    int col = 0;
    while (std::getline(ls, field, ',')) {
      if (col != seconds_col) out += field;
      out += ";";
      ++col;
    }
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and version exit cleanly; bad input exits 2") {
    CHECK(run("--help") == 0);
    CHECK(run("--version") == 0);
    CHECK(run("") == 2);                                // missing subcommand
    CHECK(run("no-such-subcommand") == 2);
    CHECK(run("converge-time --dim 7") == 2);           // invalid value
    CHECK(run("--config /does/not/exist.cfg demag-check") == 2);
  }

  TEST_CASE("demag-check writes CSV and metadata") {
    CHECK(run("demag-check --grid 6 -o /tmp/llgtest-dc") == 0);
    const std::string csv = slurp("/tmp/llgtest-dc/demag_check.csv");
    CHECK(csv.find("grid,cell_x") == 0);
    CHECK(csv.find("-3.33") != std::string::npos);
    const std::string meta = slurp("/tmp/llgtest-dc/metadata.txt");
    CHECK(meta.find("llgsim") != std::string::npos);
    CHECK(meta.find("wall_seconds") != std::string::npos);
  }

  TEST_CASE("metadata echo re-parses to the same configuration") {
    REQUIRE(run("demag-check --grid 6 --cell 1 1 0.5 -o /tmp/llgtest-rt1") == 0);
    REQUIRE(run("--config /tmp/llgtest-rt1/metadata.txt demag-check -o /tmp/llgtest-rt2") ==
            0);
    CHECK(slurp("/tmp/llgtest-rt1/demag_check.csv") ==
          slurp("/tmp/llgtest-rt2/demag_check.csv"));
  }

  TEST_CASE("single-threaded study reruns are bit-identical") {
    const std::string args =
        "converge-time --scheme bdf2 --dim 1 --grid-n 500 --steps 8 12 --threads 1 -o ";
    REQUIRE(run(args + "/tmp/llgtest-det1") == 0);
    REQUIRE(run(args + "/tmp/llgtest-det2") == 0);
    const std::string a = slurp("/tmp/llgtest-det1/converge_time.csv");
    const std::string b = slurp("/tmp/llgtest-det2/converge_time.csv");
    CHECK(numeric_payload(a, 7) == numeric_payload(b, 7));
  }
}
