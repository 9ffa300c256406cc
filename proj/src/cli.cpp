#include "qrc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "qrc/experiments.hpp"
#include "qrc/oracles.hpp"

namespace qrc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json invariants_json() {
  const auto s = invariant_summary();
  return {{"snapshots", s.snapshots},
          {"max_trace_error", s.worst.trace_error},
          {"max_hermiticity_error", s.worst.hermiticity_error},
          {"min_eigenvalue", s.snapshots ? s.worst.min_eigenvalue : 0.0}};
}

/// Minimum of `value` per distinct `key`, keys ascending.
std::map<double, double> min_by(const ResultTable& t, const std::string& key, const std::string& value) {
  std::map<double, double> out;
  const auto k = t.column(key);
  const auto v = t.column(value);
  for (std::size_t i = 0; i < k.size(); ++i) {
    auto [it, inserted] = out.try_emplace(k[i], v[i]);
    if (!inserted) it->second = std::min(it->second, v[i]);
  }
  return out;
}

json headline(const std::string& sub, const ExperimentConfig& cfg, ResultTable& table) {
  if (sub == "populations") {
    table = run_population_curves(cfg);
    const auto n = table.column("mean_n");
    return {{"points", n.size()}, {"max_mean_n", *std::max_element(n.begin(), n.end())}};
  }
  if (sub == "sinesquare") {
    SineSquareSummary s;
    table = run_sine_square(cfg, &s);
    return {{"accuracy", s.accuracy},
            {"nrmse", s.nrmse},
            {"beta", s.beta},
            {"accuracy_selected", s.accuracy_selected},
            {"selected_features", s.selected_labels},
            {"linear_baseline_accuracy", s.linear_baseline_accuracy},
            {"threshold_baseline_accuracy", s.threshold_baseline_accuracy},
            {"model", s.model}};
  }
  if (sub == "mackeyglass") {
    table = run_mackey_glass(cfg, cfg.sweep.delays);
    json per_tau = json::array();
    const auto tau = table.column("tau");
    const auto d = table.column("d");
    const auto e = table.column("nrmse");
    for (double t : cfg.sweep.mg_taus) {
      double best = INFINITY, best_d = 0;
      for (std::size_t i = 0; i < tau.size(); ++i)
        if (tau[i] == t && d[i] > 0 && e[i] < best) best = e[i], best_d = d[i];
      per_tau.push_back({{"tau", t}, {"min_nrmse", best}, {"argmin_d", best_d}});
    }
    return {{"per_tau", per_tau}};
  }
  if (sub == "kerr-map") {
    table = run_kerr_photon_map(cfg, cfg.sweep.k_cc, cfg.sweep.detuning_grid(), cfg.sweep.amplitude_grid());
    json per_k = json::array();
    const auto k = table.column("k_cc_mhz");
    const auto n = table.column("mean_n");
    std::map<double, double> max_n;
    for (std::size_t i = 0; i < k.size(); ++i) max_n[k[i]] = std::max(max_n[k[i]], n[i]);
    for (auto [kk, m] : max_n) per_k.push_back({{"k_cc_mhz", kk}, {"max_mean_n", m}});
    return {{"per_kerr", per_k}};
  }
  if (sub == "kerr-sweep") {
    auto ranges = cfg.sweep.ranges;
    if (ranges.empty()) ranges.emplace_back(cfg.encoding.alpha_min, cfg.encoding.alpha_max);
    table = run_kerr_task_sweep(cfg, cfg.sweep.k_cc, cfg.sweep.detuning_grid(), ranges);
    json per_k = json::array();
    for (auto [k, m] : min_by(table, "k_cc_mhz", "nrmse")) per_k.push_back({{"k_cc_mhz", k}, {"min_nrmse", m}});
    return {{"per_kerr", per_k}};
  }
  if (sub == "kerr-isolation") {
    table = run_kerr_isolation(cfg, cfg.sweep.k_cc, cfg.sweep.n_targets);
    json per_k = json::array();
    std::vector<double> ks, mins;
    for (auto [k, m] : min_by(table, "k_cc_mhz", "nrmse")) {
      per_k.push_back({{"k_cc_mhz", k}, {"min_nrmse", m}});
      ks.push_back(std::abs(k));
      mins.push_back(m);
    }
    json j{{"per_kerr", per_k}, {"solutions", table.rows().size()}};
    if (ks.size() >= 2) j["spearman_abs_kerr_vs_min_nrmse"] = spearman(ks, mins);
    return j;
  }
  throw InvalidArgument("unknown subcommand '" + sub + "'");
}

int run_selftest_command(std::ostream& out) {
  const auto checks = run_selftest();
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
    ok = ok && c.passed;
  }
  out << (ok ? "selftest: all checks passed" : "selftest: FAILED") << '\n';
  return ok ? 0 : 1;
}

std::string fmt_err(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), inv.subcommand) == kSubcommands.end()) {
    err << "error: unknown subcommand '" << inv.subcommand << "'\n";
    return 2;
  }
  if (inv.format != "csv" && inv.format != "json") {
    err << "error: --format must be csv or json\n";
    return 2;
  }
  if (inv.workers > 0) omp_set_num_threads(inv.workers);
  if (inv.subcommand == "selftest") return run_selftest_command(out);

  try {
    ExperimentConfig cfg = parse_config(inv.config_path, inv.overrides);
    if (inv.seed) cfg.seed = *inv.seed;
    cfg.validate();

    std::error_code ec;
    fs::create_directories(inv.out_dir, ec);
    if (ec || !fs::is_directory(inv.out_dir)) {
      err << "error: cannot create output directory '" << inv.out_dir << "'\n";
      return 1;
    }

    reset_invariant_summary();
    ResultTable table("", {}, "");
    json summary = headline(inv.subcommand, cfg, table);

    const fs::path table_path = fs::path(inv.out_dir) / (table.file_stem() + "." + inv.format);
    const fs::path summary_path = fs::path(inv.out_dir) / (table.file_stem() + "-summary.json");
    {
      std::ofstream f(table_path, std::ios::binary);
      if (inv.format == "csv")
        table.write_csv(f);
      else
        f << table.to_json().dump(2) << '\n';
      if (!f) {
        err << "error: cannot write " << table_path << '\n';
        return 1;
      }
    }
    json doc{{"experiment", table.experiment()},
             {"version", kVersion},
             {"config_hash", table.config_hash()},
             {"timestamp", utc_timestamp()},
             {"table", table_path.filename().string()},
             {"metrics", summary},
             {"invariants", invariants_json()},
             {"config", to_config_text(cfg)}};
    std::ofstream f(summary_path, std::ios::binary);
    f << doc.dump(2) << '\n';
    if (!f) {
      err << "error: cannot write " << summary_path << '\n';
      return 1;
    }
    out << doc.dump(2) << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const TruncationOverflow& e) {
    err << "error in " << inv.subcommand << ": " << e.what()
        << " (raise run.max_fock or physical.n_fock)\n";
  } catch (const std::exception& e) {
    err << "error in " << inv.subcommand << ": " << e.what() << '\n';
  }
  return 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum reservoir computing simulator for a driven nonlinear cavity", "qrc"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CliInvocation inv;
  std::uint64_t seed = 0;
  const std::vector<std::pair<std::string, std::string>> help{
      {"populations", "Fock populations after one pulse versus drive amplitude"},
      {"sinesquare", "sine/square waveform classification with optional sweeps"},
      {"mackeyglass", "Mackey-Glass delayed-target regression versus delay"},
      {"kerr-map", "mean photon number after a constant drive over Kerr, detuning and amplitude"},
      {"kerr-sweep", "sine/square NRMSE over Kerr, detuning and encoding range"},
      {"kerr-isolation", "sine/square NRMSE at equal mean photon number across Kerr values"},
      {"selftest", "analytic-oracle checks"}};
  for (const auto& [name, text] : help) {
    auto* sub = app.add_subcommand(name, text);
    if (name == "selftest") continue;
    sub->add_option("--config", inv.config_path, "INI config file (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    sub->add_option("--set", inv.overrides, "override, section.key=value (repeatable)")->take_all();
    sub->add_option("--seed", seed, "run seed (overrides run.seed)");
    sub->add_option("--format", inv.format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  }
  app.add_option("--workers", inv.workers, "OpenMP threads (0: default)");

  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.empty() || arg[0] == '-') continue;
    if (std::find(kSubcommands.begin(), kSubcommands.end(), arg) == kSubcommands.end()) {
      err << "error: unknown subcommand '" << arg << "'\n\n" << app.help();
      return 2;
    }
    break;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  const auto* chosen = app.get_subcommands().front();
  inv.subcommand = chosen->get_name();
  if (const auto* opt = chosen->get_option_no_throw("--seed"); opt && opt->count() > 0) inv.seed = seed;
  return dispatch(inv, out, err);
}

// ---------------------------------------------------------------------------
// Selftest

std::vector<SelftestCheck> run_selftest() {
  std::vector<SelftestCheck> checks;
  auto add = [&](std::string name, double error, double tol) {
    checks.push_back({std::move(name), error < tol, "error " + fmt_err(error) + " < " + fmt_err(tol)});
  };

  {  // [a, a^dag] = I - n |n-1><n-1|
    const int n = 6;
    const ComplexMatrix a = annihilation(n);
    ComplexMatrix expected = ComplexMatrix::Identity(n, n);
    expected(n - 1, n - 1) = 1.0 - n;
    add("ladder commutator", (a * a.adjoint() - a.adjoint() * a - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
  {
    PhysicalConfig cfg;
    cfg.include_qubit = true;
    cfg.n_fock = 8;
    cfg.k_cq = mhz_to_rad_per_us(-0.44);
    const ComplexMatrix h = build_hamiltonian(cfg, Complex(2.0, -1.0));
    add("hamiltonian hermitian", (h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
  {  // linear cavity vs coherent-state populations
    PhysicalConfig cfg;
    cfg.k_cc = 0.0;
    cfg.n_fock = 30;
    const double amp = 4.0, t = 0.4;
    const auto snaps = evolve(DensityMatrix::vacuum(cfg), cfg, PulseSchedule{{{t, amp}}, {0.1, 0.2, t}});
    double worst = 0.0;
    const double times[] = {0.1, 0.2, t};
    for (int s = 0; s < 3; ++s) {
      const double m = std::norm(oracle::linear_cavity_alpha(times[s], amp, 0.0, cfg.kappa_ext, cfg.kappa_total()));
      for (int n = 0; n < 12; ++n)
        worst = std::max(worst, std::abs(snaps[s].data(n, n).real() - oracle::poisson(n, m)));
    }
    add("linear cavity Poisson populations", worst, 1e-6);
  }
  {  // Kerr cavity with detuning vs Liouvillian exponential
    PhysicalConfig cfg;
    cfg.n_fock = 6;
    cfg.k_cc = mhz_to_rad_per_us(-3.0);
    cfg.delta_c = mhz_to_rad_per_us(1.0);
    const double amp = 1.5, t = 0.2;
    const auto snaps = evolve(DensityMatrix::vacuum(cfg), cfg, PulseSchedule{{{t, amp}}, {t}});
    std::vector<std::pair<double, Eigen::MatrixXcd>> ops;
    for (const auto& c : lindblad_ops(cfg)) ops.emplace_back(c.rate, c.op);
    const auto exact = oracle::lindblad_exact(DensityMatrix::vacuum(cfg).data, build_hamiltonian(cfg, amp), ops, t);
    add("Kerr cavity vs Liouvillian exponential", (snaps[0].data - exact).cwiseAbs().maxCoeff(), 1e-8);
  }
  {  // dissipator on |1><1|
    const double kappa = 3.0;
    const auto rho = DensityMatrix::fock(1, 3).data;
    ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
    expected(0, 0) = kappa;
    expected(1, 1) = -kappa;
    const auto d = lindblad_rhs(rho, ComplexMatrix::Zero(3, 3), {{kappa, annihilation(3), "a"}});
    add("dissipator on one photon", (d - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
  {
    MackeyGlassParams p;
    p.beta = 0.0;
    p.burn_in = 0.0;
    const auto s = gen_mackey_glass(50, 17.0, 1, p);
    double worst = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k)
      worst = std::max(worst, std::abs(s.values[k] - oracle::pure_decay(k * p.sample_stride, p.initial_value, p.gamma)));
    add("Mackey-Glass pure decay", worst, 1e-6);
  }
  {  // one sine and one square period: best threshold is 11/16
    std::vector<double> x = sine_period();
    const auto sq = square_period();
    x.insert(x.end(), sq.begin(), sq.end());
    std::vector<int> labels(8, 0);
    labels.resize(16, 1);
    add("single-threshold ceiling", std::abs(threshold_baseline_accuracy(x, labels) - 0.6875), 1e-15);
    add("single-threshold oracle agreement",
        std::abs(threshold_baseline_accuracy(x, labels) - oracle::best_threshold_accuracy(x, labels)), 1e-15);
  }
  {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    RealMatrix f(50, 6);
    RealMatrix y(50, 2);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = g(rng);
    const auto m = ridge_fit(f, y, 0.1);
    add("ridge vs normal equations", (m.weights - oracle::ridge_normal(f, y, 0.1)).cwiseAbs().maxCoeff(), 1e-10);
  }
  {  // linear-cavity inversion through the alpha0 search
    ExperimentConfig cfg;
    cfg.physical.n_fock = 20;
    std::vector<double> amps;
    for (int i = 0; i <= 12; ++i) amps.push_back(0.5 * i);
    const auto sols = find_alpha0(cfg, 0.0, 1, {0.0}, amps);
    const double expect = oracle::linear_cavity_drive_for(1.0, cfg.task.kerr_drive, 0.0, cfg.physical.kappa_ext,
                                                          cfg.physical.kappa_total());
    const double rel = sols.size() == 1 ? std::abs(sols[0].alpha0 - expect) / expect : INFINITY;
    add("alpha0 linear inversion (relative)", rel, 1e-2);
  }
  {
    MeasurementModel m;
    m.shots = 4000;
    std::mt19937_64 rng(11);
    double sum = 0.0;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) sum += sample_shots(0.5, m, rng);
    add("shot sampling mean", std::abs(sum / draws - 0.5), 0.002);
  }
  return checks;
}

}  // namespace qrc
