#include <doctest.h>

#include <cmath>
#include <fstream>

#include "qrc/config.hpp"

using namespace qrc;

TEST_SUITE("config") {

TEST_CASE("empty text gives the defaults") {
  const auto cfg = parse_config_text("");
  const ExperimentConfig def;
  CHECK(to_config_text(cfg) == to_config_text(def));
  CHECK(config_hash(cfg) == config_hash(def));
  CHECK(cfg.seed == 1);
  CHECK(parse_config("").seed == 1);
}

TEST_CASE("rates are read in MHz") {
  const auto cfg = parse_config_text("[physical]\nk_cc = -0.3\nkappa_phi = 0.05\n");
  CHECK(cfg.physical.k_cc == doctest::Approx(-2 * M_PI * 0.3));
  CHECK(cfg.physical.kappa_phi == doctest::Approx(2 * M_PI * 0.05));
}

TEST_CASE("overrides apply after the file") {
  const auto cfg = parse_config_text("[physical]\nk_cc = -0.3\n", {"physical.k_cc=-1", "run.seed=7"});
  CHECK(cfg.physical.k_cc == doctest::Approx(-2 * M_PI));
  CHECK(cfg.seed == 7);
  CHECK_THROWS_AS(parse_config_text("", {"physical.k_cc"}), ConfigError);
}

TEST_CASE("comments, blank lines and list values") {
  const auto cfg = parse_config_text(
      "# leading comment\n\n[sweep]\nshots = 100, 1000 ; trailing\nranges = 0.5:8, 1:10.4\n"
      "[task]\nsample_times_ns = 50, 100\n");
  CHECK(cfg.sweep.shots == std::vector<int>{100, 1000});
  REQUIRE(cfg.sweep.ranges.size() == 2);
  CHECK(cfg.sweep.ranges[1].second == doctest::Approx(10.4));
  CHECK(cfg.task.sample_offsets.size() == 2);
  CHECK(cfg.task.sample_offsets[0] == doctest::Approx(0.05));
}

TEST_CASE("invariant violations name the key") {
  CHECK_THROWS_WITH_AS(parse_config_text("[physical]\nn_fock = 1\n"), doctest::Contains("n_fock >= 2"),
                       ConfigError);
  CHECK_THROWS_AS(parse_config_text("[task]\ntrain_fraction = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[measurement]\nshots = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[sweep]\nranges = 3:1\n"), ConfigError);
}

TEST_CASE("unknown keys get a suggestion and a line number") {
  try {
    parse_config_text("[physical]\nk_cc = 0\nkapa_ext = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("kappa_ext") != std::string::npos);
  }
}

TEST_CASE("bad values carry the line number") {
  try {
    parse_config_text("[physical]\n\nchi = fast\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_config_text("[physical\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("chi = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[physical]\nchi\n"), ConfigError);
}

TEST_CASE("resolved text round-trips") {
  const auto cfg = parse_config_text("[physical]\nk_cc = -0.3\ninclude_qubit = true\n[sweep]\nshots = 100\n");
  const auto again = parse_config_text(to_config_text(cfg));
  CHECK(to_config_text(again) == to_config_text(cfg));
  CHECK(config_hash(again) == config_hash(cfg));
  CHECK(config_hash_hex(cfg).size() == 16);
}

TEST_CASE("every field participates in the hash") {
  const auto base = config_hash(ExperimentConfig{});
  CHECK(config_hash(parse_config_text("", {"run.seed=2"})) != base);
  CHECK(config_hash(parse_config_text("", {"run.dt_ns=0.5"})) != base);
  CHECK(config_hash(parse_config_text("", {"sweep.mg_taus=30"})) != base);
}

TEST_CASE("every recognised key appears in the resolved text") {
  const auto text = to_config_text(ExperimentConfig{});
  for (const auto& key : config_keys()) {
    const auto dot = key.find('.');
    CHECK_MESSAGE(text.find("\n" + key.substr(dot + 1) + " =") != std::string::npos, key);
  }
}

TEST_CASE("files") {
  CHECK_THROWS_AS(parse_config("/nonexistent/qrc.ini"), ConfigError);
  const std::string path = "test_config_tmp.ini";
  {
    std::ofstream f(path);
    f << "[run]\nseed = 11\n";
  }
  CHECK(parse_config(path).seed == 11);
  std::remove(path.c_str());
}

}  // TEST_SUITE
