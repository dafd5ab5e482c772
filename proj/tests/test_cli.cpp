#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBin = THREADSUMM_BIN;
const std::string kData = THREADSUMM_DATA_DIR;
const std::string kEnv = "THREADSUMM_FAKE_TIME=1700000000 ";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ts-cli-" + std::to_string(std::chrono::steady_clock::now()
                                           .time_since_epoch()
                                           .count()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  std::string cmd = kEnv + kBin + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string thread_arg() { return "--input " + kData + "/thread5.json --format tree"; }
std::string config_arg() { return "--config " + kData + "/mock_config.json"; }

// One shared golden run reused by the evaluate/compare cases.
fs::path golden_run_dir(const TempDir& tmp) {
  fs::path out = tmp.path / "golden";
  int code = run("summarize " + thread_arg() + " " + config_arg() + " --out " +
                 out.string());
  REQUIRE(code == 0);
  fs::directory_iterator it(out);
  REQUIRE(it != fs::directory_iterator());
  return it->path();
}

}  // namespace

TEST_CASE("summarize produces a complete run directory and exits 0") {
  TempDir tmp;
  fs::path run_dir = golden_run_dir(tmp);
  CHECK(fs::exists(run_dir / "manifest.json"));
  CHECK(fs::exists(run_dir / "summary.txt"));
  CHECK(fs::exists(run_dir / "trace.json"));
  CHECK(fs::exists(run_dir / "reports"));
  CHECK(!slurp(run_dir / "summary.txt").empty());

  json manifest = json::parse(slurp(run_dir / "manifest.json"));
  CHECK(manifest["run_id"] == run_dir.filename().string());
  CHECK(manifest["created_at"] == "2023-11-14T22:13:20Z");
  CHECK(!manifest["ledger"].empty());
}

TEST_CASE("two identical runs under a pinned clock are byte-identical") {
  TempDir tmp;
  for (const char* sub : {"a", "b"}) {
    int code = run("summarize " + thread_arg() + " " + config_arg() + " --out " +
                   (tmp.path / sub).string());
    REQUIRE(code == 0);
  }
  fs::path run_a = *fs::directory_iterator(tmp.path / "a");
  fs::path run_b = *fs::directory_iterator(tmp.path / "b");
  CHECK(run_a.filename() == run_b.filename());
  for (const char* f : {"manifest.json", "summary.txt", "trace.json"})
    CHECK(slurp(run_a / f) == slurp(run_b / f));
}

TEST_CASE("--replay reproduces the run byte-identically without a config") {
  TempDir tmp;
  fs::path original = golden_run_dir(tmp);
  int code = run("summarize --replay " + (original / "manifest.json").string() +
                 " --out " + (tmp.path / "replayed").string());
  REQUIRE(code == 0);
  fs::path replayed = *fs::directory_iterator(tmp.path / "replayed");
  CHECK(replayed.filename() == original.filename());
  for (const char* f : {"manifest.json", "summary.txt", "trace.json"})
    CHECK(slurp(replayed / f) == slurp(original / f));
}

TEST_CASE("--baseline vanilla also writes vanilla_summary.txt") {
  TempDir tmp;
  int code = run("summarize " + thread_arg() + " " + config_arg() +
                 " --baseline vanilla --out " + (tmp.path / "base").string());
  REQUIRE(code == 0);
  fs::path run_dir = *fs::directory_iterator(tmp.path / "base");
  CHECK(fs::exists(run_dir / "vanilla_summary.txt"));
  CHECK(!slurp(run_dir / "vanilla_summary.txt").empty());
}

TEST_CASE("evaluate writes report.json, report.csv, and SVGs") {
  TempDir tmp;
  fs::path run_dir = golden_run_dir(tmp);
  fs::path out = run_dir / "reports";
  int code = run("evaluate --summary " + (run_dir / "summary.txt").string() +
                 " --source " + kData + "/thread5.json --format tree " + config_arg() +
                 " --out " + out.string());
  CHECK(code == 0);
  json report = json::parse(slurp(out / "report.json"));
  CHECK(report["metrics"].contains("aspect_overlap"));
  CHECK(report["metrics"].contains("opinion_coverage"));
  CHECK(report["metrics"].contains("word_count"));
  // Default metric set drops rouge1 silently when no reference is given.
  CHECK_FALSE(report["metrics"].contains("rouge1_recall"));
  CHECK(report["metrics"]["qags"].is_null());
  CHECK(fs::exists(out / "report.csv"));
  CHECK(fs::exists(out / "aspects.svg"));
  CHECK(fs::exists(out / "position.svg"));
}

TEST_CASE("evaluate --docasref computes rouge1 against the source") {
  TempDir tmp;
  fs::path run_dir = golden_run_dir(tmp);
  fs::path out = tmp.path / "docasref";
  int code = run("evaluate --summary " + (run_dir / "summary.txt").string() +
                 " --source " + kData + "/thread5.json --format tree " + config_arg() +
                 " --metrics rouge1 --docasref --out " + out.string());
  CHECK(code == 0);
  json report = json::parse(slurp(out / "report.json"));
  double score = report["metrics"]["rouge1_recall"].get<double>();
  CHECK(score > 0.0);
  CHECK(score <= 1.0);
  CHECK(report["details"]["rouge1_mode"] == "docasref");
}

TEST_CASE("compare tabulates reports across runs") {
  TempDir tmp;
  fs::path run_dir = golden_run_dir(tmp);
  fs::path reports = run_dir / "reports";
  int code = run("evaluate --summary " + (run_dir / "summary.txt").string() +
                 " --source " + kData + "/thread5.json --format tree " + config_arg() +
                 " --out " + reports.string());
  REQUIRE(code == 0);

  fs::path csv_path = tmp.path / "compare.csv";
  code = run("compare " + run_dir.string() + " " + run_dir.string() + " --out " +
             csv_path.string());
  CHECK(code == 0);
  std::string csv = slurp(csv_path);
  CHECK(csv.rfind("run,", 0) == 0);
  CHECK(csv.find("aspect_overlap") != std::string::npos);
  // Header plus one row per compared run.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("usage and config problems exit 2, pipeline failures exit 1") {
  TempDir tmp;
  // Missing input file.
  CHECK(run("summarize --input /nonexistent.json " + config_arg() + " --out " +
            (tmp.path / "x").string()) == 2);
  // Missing config.
  CHECK(run("summarize " + thread_arg() + " --config /nonexistent-config.json --out " +
            (tmp.path / "y").string()) == 2);
  // Unknown subcommand / missing required option.
  CHECK(run("frobnicate") == 2);
  CHECK(run("summarize " + thread_arg()) == 2);
  // Explicit rouge1 without any reference.
  fs::path summary = tmp.path / "s.txt";
  std::ofstream(summary) << "A summary.\n";
  CHECK(run("evaluate --summary " + summary.string() + " --source " + kData +
            "/thread5.json --format tree --metrics rouge1 --out " +
            (tmp.path / "r").string()) == 2);
  // compare needs at least two directories.
  CHECK(run("compare " + tmp.path.string()) == 2);
}

TEST_CASE("a scripted gap aborts the run with exit 1 and a partial manifest") {
  TempDir tmp;
  // A provider with an empty script answers nothing; the first pipeline call
  // fails mid-run.
  fs::path cfg = tmp.path / "empty_config.json";
  std::ofstream(cfg) << R"({
    "providers": [
      {"id": "mute", "kind": "mock-chat", "model_id": "m", "script": []},
      {"id": "emb", "kind": "mock-embedding", "seed": 1, "dim": 8}
    ],
    "generator": "mute",
    "embedder": "emb"
  })";
  int code = run("summarize " + thread_arg() + " --config " + cfg.string() +
                 " --out " + (tmp.path / "fail").string());
  CHECK(code == 1);
  fs::path run_dir = *fs::directory_iterator(tmp.path / "fail");
  json manifest = json::parse(slurp(run_dir / "manifest.json"));
  bool aborted = false;
  for (const auto& w : manifest["warnings"])
    if (w.get<std::string>().find("run aborted") != std::string::npos) aborted = true;
  CHECK(aborted);
  CHECK_FALSE(fs::exists(run_dir / "summary.txt"));
}
