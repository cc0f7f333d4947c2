#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef MSH_CLI_PATH
#error "MSH_CLI_PATH must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("msh_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const TempDir& tmp, const std::string& args) {
  const std::string out_path = tmp.file("stdout.txt");
  const std::string err_path = tmp.file("stderr.txt");
  const std::string cmd = std::string(MSH_CLI_PATH) + " " + args + " > " + out_path +
                          " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("generate writes the advertised number of rows and is seed-stable") {
  TempDir tmp;
  const std::string data = tmp.file("lines.csv");
  const auto r1 = run(tmp, "generate --model line2d --structures 3 --inliers 100 "
                           "--outliers 400 --seed 5 --out " + data);
  REQUIRE(r1.exit_code == 0);
  const std::string first = slurp(data);
  CHECK(count_lines(first) == 701);  // header + 700 points

  const auto r2 = run(tmp, "generate --model line2d --structures 3 --inliers 100 "
                           "--outliers 400 --seed 5 --out " + data);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(data) == first);  // same seed, same bytes
}

TEST_CASE("fit produces labels and a result with the requested mode count") {
  TempDir tmp;
  const std::string data = tmp.file("star.csv");
  const std::string result = tmp.file("result.json");
  const std::string labels = tmp.file("labels.csv");
  REQUIRE(run(tmp, "generate --model line2d --structures 5 --layout star "
                   "--box-size 300 --seed 40 --out " + data).exit_code == 0);
  const auto r = run(tmp, "fit --model line2d --input " + data +
                          " --k 50 --was-fraction 0.05 --seed 41 --out " + result +
                          " --labels-out " + labels);
  REQUIRE(r.exit_code == 0);
  const std::string json = slurp(result);
  CHECK(json.find("\"modes\"") != std::string::npos);
  CHECK(count_lines(slurp(labels)) == 901);  // header + 900 labels
  CHECK(r.err.find("modes:") != std::string::npos);
}

TEST_CASE("fit output is byte-identical for equal seeds") {
  TempDir tmp;
  const std::string data = tmp.file("pair.csv");
  REQUIRE(run(tmp, "generate --model line2d --structures 2 --inliers 80 "
                   "--outliers 40 --seed 42 --out " + data).exit_code == 0);
  const std::string out_a = tmp.file("a.json");
  const std::string out_b = tmp.file("b.json");
  const std::string flags = "fit --model line2d --input " + data +
                            " --hypotheses 500 --seed 43 --out ";
  REQUIRE(run(tmp, flags + out_a).exit_code == 0);
  REQUIRE(run(tmp, flags + out_b).exit_code == 0);
  const std::string a = slurp(out_a);
  const std::string b = slurp(out_b);
  // Timings differ run to run; everything before them is the pinned surface.
  const auto cut_a = a.substr(0, a.find("timings_ms"));
  const auto cut_b = b.substr(0, b.find("timings_ms"));
  CHECK(cut_a == cut_b);
  CHECK(!cut_a.empty());
}

TEST_CASE("model-data width mismatch fails with a diagnostic") {
  TempDir tmp;
  const std::string data = tmp.file("pairs4.csv");
  REQUIRE(run(tmp, "generate --model homography --structures 2 --inliers 30 "
                   "--outliers 10 --seed 44 --out " + data).exit_code == 0);
  const auto r = run(tmp, "fit --model circle --input " + data);
  CHECK(r.exit_code == 1);
  CHECK(r.out.empty());
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("eval reports two-decimal percentages") {
  TempDir tmp;
  const std::string a = tmp.file("a.csv");
  const std::string b = tmp.file("b.csv");
  {
    std::ofstream fa(a), fb(b);
    fa << "label\n1\n1\n1\n2\n0\n";
    fb << "label\n1\n1\n2\n2\n0\n";
  }
  const auto same = run(tmp, "eval --pred " + a + " --ref " + a);
  REQUIRE(same.exit_code == 0);
  CHECK(same.out == "0.00\n");
  const auto diff = run(tmp, "eval --pred " + a + " --ref " + b);
  REQUIRE(diff.exit_code == 0);
  CHECK(diff.out == "20.00\n");
}

TEST_CASE("eval is invariant under relabeling") {
  TempDir tmp;
  const std::string a = tmp.file("a.csv");
  const std::string b = tmp.file("b.csv");
  {
    std::ofstream fa(a), fb(b);
    fa << "label\n1\n1\n2\n2\n";
    fb << "label\n2\n2\n1\n1\n";  // same partition, swapped names
  }
  const auto r = run(tmp, "eval --pred " + a + " --ref " + b);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "0.00\n");
}

TEST_CASE("missing input and unknown names exit nonzero") {
  TempDir tmp;
  CHECK(run(tmp, "fit --model line2d --input /nonexistent/x.csv").exit_code == 1);
  CHECK(run(tmp, "generate --model dodecahedron --out " + tmp.file("x.csv")).exit_code == 1);
  CHECK(run(tmp, "bench --table unknown").exit_code == 1);
  CHECK(run(tmp, "").exit_code != 0);  // a subcommand is required
}

TEST_CASE("bench custom table prints a summary row") {
  TempDir tmp;
  const auto r = run(tmp, "bench --table custom --model line2d --structures 2 "
                          "--inliers 60 --outliers 30 --hypotheses 400 "
                          "--repeats 2 --seed 48");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("custom:line2d") != std::string::npos);
  CHECK(r.out.find("avg") != std::string::npos);
}

TEST_CASE("bench writes machine-readable reports when asked") {
  TempDir tmp;
  const std::string prefix = tmp.file("report");
  const auto r = run(tmp, "bench --table custom --model line2d --structures 2 "
                          "--inliers 60 --outliers 30 --hypotheses 400 "
                          "--repeats 2 --seed 48 --out-prefix " + prefix);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(prefix + ".json"));
  CHECK(fs::exists(prefix + ".csv"));
  const std::string json = slurp(prefix + ".json");
  CHECK(json.find("\"errors\"") != std::string::npos);
}

TEST_CASE("plots are valid svg documents") {
  TempDir tmp;
  const std::string data = tmp.file("c.csv");
  const std::string svg = tmp.file("c.svg");
  REQUIRE(run(tmp, "generate --model circle --structures 2 --inliers 50 "
                   "--outliers 20 --seed 49 --out " + data + " --plot " + svg)
              .exit_code == 0);
  const std::string body = slurp(svg);
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.rfind("</svg>") != std::string::npos);
}
