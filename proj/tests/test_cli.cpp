#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qrc/cli.hpp"
#include "qrc/config.hpp"

using namespace qrc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "qrc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// {table, summary}
std::vector<fs::path> files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    const auto summary = [](const fs::path& p) { return p.filename().string().ends_with("-summary.json"); };
    return std::pair(summary(a), a) < std::pair(summary(b), b);
  });
  return out;
}

const std::vector<std::string> kSmallPopulations{"--set", "task.population_steps=4", "physical.n_fock=20"};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("unknown subcommand is an error") {
  std::string err;
  CHECK(run({"bogus"}, nullptr, &err) != 0);
  CHECK(err.find("bogus") != std::string::npos);
  CHECK(run({}) != 0);
}

TEST_CASE("selftest passes") {
  std::string out;
  CHECK(run({"selftest"}, &out) == 0);
  CHECK(out.find("FAIL") == std::string::npos);
  CHECK(out.find("PASS") != std::string::npos);
}

TEST_CASE("populations writes a table and a summary") {
  TempDir dir("qrc_cli_populations");
  auto args = std::vector<std::string>{"populations", "--out", dir.path.string()};
  args.insert(args.end(), kSmallPopulations.begin(), kSmallPopulations.end());
  REQUIRE(run(args) == 0);
  const auto files = files_in(dir.path);
  REQUIRE(files.size() == 2);
  const auto csv = files[0];
  CHECK(csv.extension() == ".csv");
  CHECK(files[1].filename().string() == csv.stem().string() + "-summary.json");

  const auto doc = nlohmann::json::parse(slurp(files[1]));
  const auto cfg = parse_config_text(doc["config"].get<std::string>());
  CHECK(config_hash_hex(cfg) == doc["config_hash"].get<std::string>());
  CHECK(csv.stem().string() == "populations-" + config_hash_hex(cfg).substr(0, 8));
  CHECK(slurp(csv).find("# config_hash: " + config_hash_hex(cfg)) != std::string::npos);
  CHECK(doc["invariants"]["snapshots"].get<int>() > 0);
}

TEST_CASE("reruns are byte-identical") {
  TempDir a("qrc_cli_rerun_a"), b("qrc_cli_rerun_b");
  for (const auto* d : {&a, &b}) {
    auto args = std::vector<std::string>{"sinesquare", "--out", d->path.string(), "--seed", "5", "--set",
                                         "task.n_periods=40", "task.select_k=2"};
    REQUIRE(run(args) == 0);
  }
  const auto fa = files_in(a.path), fb = files_in(b.path);
  REQUIRE(fa.size() == 2);
  CHECK(slurp(fa[0]) == slurp(fb[0]));
}

TEST_CASE("json table format") {
  TempDir dir("qrc_cli_json");
  auto args = std::vector<std::string>{"populations", "--format", "json", "--out", dir.path.string()};
  args.insert(args.end(), kSmallPopulations.begin(), kSmallPopulations.end());
  REQUIRE(run(args) == 0);
  const auto files = files_in(dir.path);
  REQUIRE(files.size() == 2);
  CHECK(nlohmann::json::parse(slurp(files[0]))["rows"].size() == 4);
  CHECK(run({"populations", "--format", "xml", "--out", dir.path.string()}) != 0);
}

TEST_CASE("unwritable output directory") {
  TempDir dir("qrc_cli_unwritable");
  const auto blocker = dir.path / "file";
  std::ofstream(blocker) << "x";
  std::string err;
  auto args = std::vector<std::string>{"populations", "--out", (blocker / "sub").string()};
  args.insert(args.end(), kSmallPopulations.begin(), kSmallPopulations.end());
  CHECK(run(args, nullptr, &err) != 0);
  CHECK(err.find("output directory") != std::string::npos);
}

TEST_CASE("config errors are reported") {
  TempDir dir("qrc_cli_config");
  const auto ini = dir.path / "bad.ini";
  std::ofstream(ini) << "[physical]\nn_fock = 1\n";
  std::string err;
  CHECK(run({"populations", "--config", ini.string(), "--out", dir.path.string()}, nullptr, &err) != 0);
  CHECK(err.find("n_fock >= 2") != std::string::npos);
  CHECK(run({"populations", "--set", "physical.nfock=3", "--out", dir.path.string()}, nullptr, &err) != 0);
  CHECK(err.find("did you mean") != std::string::npos);
  CHECK(run({"populations", "--config", (dir.path / "missing.ini").string()}) != 0);
}

TEST_CASE("sinesquare headline accuracy on a short run") {
  TempDir dir("qrc_cli_sinesquare");
  std::string out;
  REQUIRE(run({"sinesquare", "--out", dir.path.string(), "--set", "task.n_periods=80", "task.select_k=4"}, &out) ==
          0);
  const auto doc = nlohmann::json::parse(out);
  CHECK(doc["metrics"]["accuracy"].get<double>() >= 0.95);
}

}  // TEST_SUITE
