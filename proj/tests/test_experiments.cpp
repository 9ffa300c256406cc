#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrc/experiments.hpp"
#include "qrc/oracles.hpp"

using namespace qrc;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.task.n_periods = 40;
  cfg.task.population_steps = 5;
  return cfg;
}

std::string csv_of(const ResultTable& t) {
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("result table CSV layout") {
  ResultTable t("demo", {"a", "b"}, "0123456789abcdef");
  t.add_row({1.0, 0.1});
  t.add_row({-2.5, 1e-20});
  CHECK(csv_of(t) == "# experiment: demo\n# config_hash: 0123456789abcdef\n# version: qrc 0.3.1\n"
                     "a,b\n1,0.1\n-2.5,1e-20\n");
  CHECK(t.file_stem() == "demo-01234567");
  CHECK(t.column("b") == std::vector<double>{0.1, 1e-20});
  CHECK_THROWS_AS(t.column("c"), InvalidArgument);
  CHECK_THROWS_AS(t.add_row({1.0}), InvalidArgument);
  const auto j = t.to_json();
  CHECK(j["rows"].size() == 2);
}

TEST_CASE("result table merge refuses mismatched provenance") {
  ResultTable a("demo", {"a"}, "1111");
  ResultTable b("demo", {"a"}, "1111");
  b.add_row({3.0});
  a.merge(b);
  CHECK(a.rows().size() == 1);
  CHECK_THROWS_AS(a.merge(ResultTable("demo", {"a"}, "2222")), InvalidArgument);
  CHECK_THROWS_AS(a.merge(ResultTable("demo", {"b"}, "1111")), InvalidArgument);
}

TEST_CASE("population curves") {
  auto cfg = small_config();
  const auto t = run_population_curves(cfg);
  REQUIRE(t.rows().size() == 5);
  CHECK(t.columns() == std::vector<std::string>{"alpha_in", "P0", "P1", "P2", "P3", "P4", "mean_n"});
  const auto& r0 = t.rows().front();
  CHECK(r0[0] == 0.0);
  CHECK(r0[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r0[6] == doctest::Approx(0.0).epsilon(1e-12));
  const auto mean_n = t.column("mean_n");
  CHECK(std::is_sorted(mean_n.begin(), mean_n.end()));
}

TEST_CASE("population curves without Kerr are Poissonian") {
  auto cfg = small_config();
  cfg.physical.include_qubit = false;
  cfg.physical.k_cc = 0.0;
  cfg.physical.n_fock = 40;
  cfg.task.population_amp_max = 4.0;
  const auto t = run_population_curves(cfg);
  for (const auto& row : t.rows()) {
    const double m = std::norm(oracle::linear_cavity_alpha(cfg.task.pulse_duration, row[0], cfg.physical.delta_c,
                                                           cfg.physical.kappa_ext, cfg.physical.kappa_total()));
    CHECK(row[6] == doctest::Approx(m).epsilon(1e-6));
    for (int n = 0; n < 5; ++n) CHECK(std::abs(row[1 + n] - oracle::poisson(n, m)) < 1e-6);
  }
}

TEST_CASE("simulate_schedules grows the truncation on overflow") {
  PhysicalConfig p;
  p.include_qubit = false;
  p.n_fock = 6;
  std::vector<int> used;
  const PulseSchedule s{{{0.4, 6.0}}, {0.4}};
  const auto snaps = simulate_schedules(p, {s, PulseSchedule{{{0.1, 0.0}}, {0.1}}}, 1e-3, 160, &used);
  REQUIRE(used.size() == 2);
  CHECK(used[0] > 6);
  CHECK(used[1] == 6);
  CHECK(snaps[0][0].dim() == used[0]);
  CHECK_THROWS_AS(simulate_schedules(p, {s}, 1e-3, 8), TruncationOverflow);
}

TEST_CASE("invariant summary accumulates over runs") {
  reset_invariant_summary();
  CHECK(invariant_summary().snapshots == 0);
  PhysicalConfig p;
  simulate_schedules(p, {PulseSchedule{{{0.1, 1.0}}, {0.05, 0.1}}}, 1e-3, 160);
  const auto s = invariant_summary();
  CHECK(s.snapshots == 2);
  CHECK(s.worst.trace_error < 1e-10);
}

TEST_CASE("threshold baseline") {
  CHECK(threshold_baseline_accuracy({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
  CHECK(threshold_baseline_accuracy({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0}) == 1.0);
  CHECK(threshold_baseline_accuracy({0.5, 0.5}, {0, 1}) == 0.5);

  // one full sine period and one full square period
  std::vector<double> x = sine_period();
  const auto sq = square_period();
  x.insert(x.end(), sq.begin(), sq.end());
  std::vector<int> y(8, 0);
  y.resize(16, 1);
  CHECK(threshold_baseline_accuracy(x, y) == oracle::best_threshold_accuracy(x, y));
  CHECK(threshold_baseline_accuracy(x, y) == 0.6875);
}

TEST_CASE("classifier evaluation on separable features") {
  RealMatrix f(40, 1);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) {
    labels[i] = (i * 7) % 3 == 0;
    f(i, 0) = labels[i] ? 2.0 : -1.0;
  }
  const auto s = evaluate_classifier(f, labels, 20);
  CHECK(s.accuracy == 1.0);
  CHECK(s.beta == 1.0);  // every beta separates the classes; ties go to the largest
  const auto r = evaluate_classifier(f, labels, 20, Metric::Nrmse);
  CHECK(r.accuracy == 1.0);
  CHECK(r.nrmse < 1e-3);
}

TEST_CASE("sine/square run on a short dataset") {
  auto cfg = small_config();
  cfg.task.n_periods = 60;
  cfg.task.select_k = 4;
  cfg.sweep.shots = {0, 100};
  SineSquareSummary sum;
  const auto t = run_sine_square(cfg, &sum);
  CHECK(sum.accuracy >= 0.9);
  CHECK(sum.selected.size() == 4);
  CHECK(sum.model.feature_labels.back() == "bias");
  const auto variants = t.column("variant");
  CHECK(std::count(variants.begin(), variants.end(), 5.0) == 2);
  CHECK(csv_of(t) == csv_of(run_sine_square(cfg)));
}

TEST_CASE("find_alpha0 matches the linear-cavity inversion at K = 0") {
  auto cfg = small_config();
  cfg.physical.n_fock = 30;
  std::vector<double> amps;
  for (int i = 0; i <= 12; ++i) amps.push_back(0.5 * i);
  const auto sols = find_alpha0(cfg, 0.0, 2, {0.0}, amps);
  REQUIRE(sols.size() == 1);
  const double expect = oracle::linear_cavity_drive_for(2.0, cfg.task.kerr_drive, 0.0, cfg.physical.kappa_ext,
                                                        cfg.physical.kappa_total());
  CHECK(sols[0].alpha0 == doctest::Approx(expect).epsilon(0.01));
  CHECK(find_alpha0(cfg, 0.0, 3, {0.0}, {0.0, 0.5}).empty());
  CHECK_THROWS_AS(find_alpha0(cfg, 0.0, 4, {0.0}, amps), InvalidArgument);
}

TEST_CASE("Kerr photon map at K = 0 follows the coherent state") {
  auto cfg = small_config();
  cfg.physical.n_fock = 30;
  const double d = mhz_to_rad_per_us(1.0);
  const auto t = run_kerr_photon_map(cfg, {0.0}, {d}, {0.0, 1.0, 3.0});
  REQUIRE(t.rows().size() == 3);
  for (const auto& row : t.rows()) {
    CHECK(row[1] == doctest::Approx(1.0));
    const double m = std::norm(oracle::linear_cavity_alpha(cfg.task.kerr_drive, row[2], d, cfg.physical.kappa_ext,
                                                           cfg.physical.kappa_total()));
    CHECK(row[3] == doctest::Approx(m).epsilon(1e-6));
  }
  CHECK_THROWS_AS(run_kerr_photon_map(cfg, {}, {0.0}, {1.0}), InvalidArgument);
}

TEST_CASE("strong Kerr blocks the resonant drive") {
  auto cfg = small_config();
  const auto t = run_kerr_photon_map(cfg, {mhz_to_rad_per_us(-3.0)}, {0.0}, {2.0, 6.0, 12.0});
  for (double n : t.column("mean_n")) CHECK(n < 2.0);
}

TEST_CASE("spearman") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {5, 5, 5}) == 0.0);
  CHECK(spearman({1, 1, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(0.9486832980505138));
  CHECK_THROWS_AS(spearman({1}, {1}), InvalidArgument);
}

TEST_CASE("Mackey-Glass recall is easiest at zero delay") {
  auto cfg = small_config();
  cfg.task.mg_points = 300;
  cfg.task.mg_history = 5;
  std::vector<int> delays;
  for (int d = 0; d <= 10; ++d) delays.push_back(d);
  const auto t = run_mackey_glass(cfg, delays);
  const auto e = t.column("nrmse");
  REQUIRE(e.size() == 11);
  CHECK(*std::min_element(e.begin() + 1, e.end()) > e[0]);
  CHECK_THROWS_AS(run_mackey_glass(cfg, {}), InvalidArgument);
}

}  // TEST_SUITE
