#include "qrc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qrc {

// ---------------------------------------------------------------------------
// ResultTable

ResultTable::ResultTable(std::string experiment, std::vector<std::string> columns,
                         std::string config_hash)
    : experiment_(std::move(experiment)), columns_(std::move(columns)), hash_(std::move(config_hash)) {}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns_.size())
    throw InvalidArgument("ResultTable: row width does not match the column count");
  rows_.push_back(std::move(row));
}

void ResultTable::merge(const ResultTable& other) {
  if (other.hash_ != hash_)
    throw InvalidArgument("ResultTable: refusing to merge tables from different configs (" + hash_ +
                          " vs " + other.hash_ + ")");
  if (other.columns_ != columns_ || other.experiment_ != experiment_)
    throw InvalidArgument("ResultTable: refusing to merge tables with different layouts");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::size_t ResultTable::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw InvalidArgument("ResultTable: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> ResultTable::column(const std::string& name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[idx]);
  return out;
}

namespace {

std::string fmt_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

void ResultTable::write_csv(std::ostream& os) const {
  os << "# experiment: " << experiment_ << '\n';
  os << "# config_hash: " << hash_ << '\n';
  os << "# version: " << kVersion << '\n';
  for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
  os << '\n';
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << fmt_real(r[c]);
    os << '\n';
  }
}

nlohmann::json ResultTable::to_json() const {
  return {{"experiment", experiment_},
          {"config_hash", hash_},
          {"version", kVersion},
          {"columns", columns_},
          {"rows", rows_}};
}

std::string ResultTable::file_stem() const { return experiment_ + "-" + hash_.substr(0, 8); }

// ---------------------------------------------------------------------------
// Simulation helpers

namespace {

struct InvariantMonitor {
  std::mutex mu;
  InvariantSummary summary;

  void record(const std::vector<DensityMatrix>& snaps) {
    InvariantReport worst;
    worst.min_eigenvalue = 1.0;
    for (const auto& s : snaps) {
      const auto r = check_invariants(s);
      worst.trace_error = std::max(worst.trace_error, r.trace_error);
      worst.hermiticity_error = std::max(worst.hermiticity_error, r.hermiticity_error);
      worst.min_eigenvalue = std::min(worst.min_eigenvalue, r.min_eigenvalue);
    }
    std::lock_guard lock(mu);
    if (summary.snapshots == 0) summary.worst.min_eigenvalue = 1.0;
    summary.worst.trace_error = std::max(summary.worst.trace_error, worst.trace_error);
    summary.worst.hermiticity_error = std::max(summary.worst.hermiticity_error, worst.hermiticity_error);
    summary.worst.min_eigenvalue = std::min(summary.worst.min_eigenvalue, worst.min_eigenvalue);
    summary.snapshots += snaps.size();
  }
};

InvariantMonitor& monitor() {
  static InvariantMonitor m;
  return m;
}

}  // namespace

InvariantSummary invariant_summary() {
  std::lock_guard lock(monitor().mu);
  return monitor().summary;
}

void reset_invariant_summary() {
  std::lock_guard lock(monitor().mu);
  monitor().summary = InvariantSummary{};
}

std::vector<std::vector<DensityMatrix>> simulate_schedules(const PhysicalConfig& cfg,
                                                           const std::vector<PulseSchedule>& schedules,
                                                           double dt, int max_fock,
                                                           std::vector<int>* used_fock) {
  const auto n = static_cast<std::ptrdiff_t>(schedules.size());
  std::vector<std::vector<DensityMatrix>> out(schedules.size());
  std::vector<int> fock(schedules.size(), cfg.n_fock);
  std::vector<std::exception_ptr> errors(schedules.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      PhysicalConfig local = cfg;
      while (true) {
        try {
          out[i] = evolve(DensityMatrix::vacuum(local), local, schedules[i], dt);
          break;
        } catch (const TruncationOverflow&) {
          if (local.n_fock >= max_fock) throw;
          local.n_fock = std::min(max_fock, local.n_fock * 3 / 2 + 2);
        }
      }
      fock[i] = local.n_fock;
      monitor().record(out[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (used_fock) *used_fock = std::move(fock);
  return out;
}

double driven_mean_photon(const ExperimentConfig& cfg, const PhysicalConfig& physical, double amp,
                          double duration) {
  PulseSchedule s{{{duration, amp}}, {duration}};
  const auto snaps = simulate_schedules(physical, {s}, cfg.dt, cfg.max_fock);
  return mean_photon(snaps[0][0], physical);
}

// ---------------------------------------------------------------------------
// Sine / square

WaveformFeatures simulate_waveform_features(const ExperimentConfig& cfg, const PhysicalConfig& physical,
                                            const EncodingMap& encoding, const WaveformDataset& ds) {
  WaveformFeatures wf;
  const std::size_t n = ds.points.size();
  wf.train_rows = ds.train_size();
  wf.labels.resize(n);
  wf.amplitudes.resize(n);
  wf.pair_of_point.resize(n);

  std::map<std::pair<double, double>, std::size_t> pair_index;
  std::vector<PulseSchedule> schedules;
  const double T = cfg.task.pulse_duration;
  std::vector<double> sample_times;
  for (double off : cfg.task.sample_offsets) sample_times.push_back(T + off);

  for (std::size_t i = 0; i < n; ++i) {
    const double cur = encode(ds.points[i], encoding);
    const double prev = i > 0 ? encode(ds.points[i - 1], encoding) : cur;
    wf.labels[i] = static_cast<int>(ds.labels[i]);
    wf.amplitudes[i] = cur;
    auto [it, inserted] = pair_index.try_emplace({prev, cur}, schedules.size());
    if (inserted) schedules.push_back(PulseSchedule{{{T, prev}, {T, cur}}, sample_times});
    wf.pair_of_point[i] = it->second;
  }
  wf.snapshots = simulate_schedules(physical, schedules, cfg.dt, cfg.max_fock);
  return wf;
}

RealMatrix measure_waveform_features(const WaveformFeatures& wf, const MeasurementModel& model,
                                     const PhysicalConfig& physical, int n_times) {
  const auto rows = static_cast<Eigen::Index>(wf.pair_of_point.size());
  RealMatrix f(rows, model.n_states * n_times);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& all = wf.snapshots[wf.pair_of_point[static_cast<std::size_t>(i)]];
    const std::vector<DensityMatrix> snaps(all.begin(), all.begin() + n_times);
    MeasurementModel m = model;
    m.rng_seed = derive_seed(model.rng_seed, static_cast<std::uint64_t>(i));
    const auto fv = extract_features(snaps, m, physical);
    for (std::size_t c = 0; c < fv.values.size(); ++c) f(i, static_cast<Eigen::Index>(c)) = fv.values[c];
  }
  return f;
}

ClassifierScore evaluate_classifier(const RealMatrix& features, const std::vector<int>& labels,
                                    std::size_t train_rows, Metric metric) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto tr = static_cast<Eigen::Index>(train_rows);
  if (features.rows() != n || tr < 2 || tr >= n)
    throw InvalidArgument("evaluate_classifier: invalid train split");
  const RealMatrix f = add_bias(features);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];

  ClassifierScore s;
  s.beta = select_beta(f.topRows(tr), y.head(tr), metric);
  const auto model = ridge_fit(f.topRows(tr), y.head(tr), s.beta);
  const Eigen::VectorXd scores = predict(model, f.bottomRows(n - tr));
  const std::vector<int> test_labels(labels.begin() + tr, labels.end());
  s.accuracy = classify_accuracy(scores, test_labels);
  s.nrmse = nrmse(scores, y.tail(n - tr));
  return s;
}

double threshold_baseline_accuracy(const std::vector<double>& values, const std::vector<int>& labels) {
  if (values.size() != labels.size() || values.empty())
    throw InvalidArgument("threshold_baseline_accuracy: invalid input");
  std::vector<double> cuts(values);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(std::numeric_limits<double>::infinity());  // constant classifier
  const double n = static_cast<double>(values.size());
  double best = 0.0;
  for (double t : cuts) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < values.size(); ++i) hits += (values[i] >= t ? 1 : 0) == labels[i];
    best = std::max({best, hits / n, (n - hits) / n});
  }
  return best;
}

namespace {

std::vector<std::string> feature_names(int n_states, const std::vector<double>& offsets, int n_times) {
  std::vector<std::string> out;
  for (int s = 0; s < n_states; ++s)
    for (int t = 0; t < n_times; ++t)
      out.push_back("P" + std::to_string(s) + "@" + fmt_real(std::round(offsets[t] * 1e6) / 1e3) + "ns");
  return out;
}

PhysicalConfig joint_variant(const PhysicalConfig& base, double kappa_phi) {
  PhysicalConfig p = base;
  if (!base.include_qubit) {
    p.include_qubit = true;
    p.n_fock = std::min(base.n_fock, kJointFockDefault);
    p.delta_c = ground_resonant_delta_c(p) + base.delta_c;
  }
  p.kappa_phi = kappa_phi;
  return p;
}

}  // namespace

ResultTable run_sine_square(const ExperimentConfig& cfg, SineSquareSummary* summary) {
  cfg.validate();
  ResultTable table("sinesquare",
                    {"variant", "seed", "n_states", "n_times", "shots", "alpha_min", "alpha_max",
                     "kappa_phi_mhz", "accuracy", "nrmse", "beta"},
                    config_hash_hex(cfg));
  const int n_times = static_cast<int>(cfg.task.sample_offsets.size());
  const PhysicalConfig& physical = cfg.physical;

  for (int r = 0; r < cfg.sweep.seeds; ++r) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
    const auto ds = gen_sine_square(cfg.task.n_periods, seed, cfg.task.train_fraction);
    const std::vector<double> train_points(ds.points.begin(), ds.points.begin() + ds.train_size());
    const auto encoding = fit_encoding(train_points, cfg.encoding.alpha_min, cfg.encoding.alpha_max);
    const auto wf = simulate_waveform_features(cfg, physical, encoding, ds);
    MeasurementModel model = cfg.measurement;
    model.rng_seed = seed;

    auto row = [&](int variant, const MeasurementModel& m, int times, const EncodingMap& enc,
                   double kappa_phi, const ClassifierScore& s) {
      table.add_row({static_cast<double>(variant), static_cast<double>(seed),
                     static_cast<double>(m.n_states), static_cast<double>(times),
                     static_cast<double>(m.shots), enc.alpha_min, enc.alpha_max,
                     rad_per_us_to_mhz(kappa_phi), s.accuracy, s.nrmse, s.beta});
    };

    const RealMatrix features = measure_waveform_features(wf, model, physical, n_times);
    const auto base = evaluate_classifier(features, wf.labels, wf.train_rows);
    row(0, model, n_times, encoding, physical.kappa_phi, base);

    const int k = std::min<int>(cfg.task.select_k, static_cast<int>(features.cols()));
    const std::vector<int> train_labels(wf.labels.begin(), wf.labels.begin() + wf.train_rows);
    const auto selected = greedy_select(features.topRows(static_cast<Eigen::Index>(wf.train_rows)),
                                        train_labels, k);
    const auto sel_score = evaluate_classifier(select_columns(features, selected), wf.labels, wf.train_rows);
    row(1, model, n_times, encoding, physical.kappa_phi, sel_score);

    RealMatrix raw(static_cast<Eigen::Index>(wf.amplitudes.size()), 1);
    for (std::size_t i = 0; i < wf.amplitudes.size(); ++i) raw(static_cast<Eigen::Index>(i), 0) = wf.amplitudes[i];
    const auto linear = evaluate_classifier(raw, wf.labels, wf.train_rows);
    row(2, model, 1, encoding, physical.kappa_phi, linear);

    if (summary && r == 0) {
      summary->accuracy = base.accuracy;
      summary->nrmse = base.nrmse;
      summary->beta = base.beta;
      summary->accuracy_selected = sel_score.accuracy;
      summary->selected = selected;
      const auto names = feature_names(model.n_states, cfg.task.sample_offsets, n_times);
      summary->selected_labels.clear();
      for (int j : selected) summary->selected_labels.push_back(names[static_cast<std::size_t>(j)]);
      summary->linear_baseline_accuracy = linear.accuracy;
      std::vector<double> test_points(ds.points.begin() + ds.train_size(), ds.points.end());
      std::vector<int> test_labels(wf.labels.begin() + wf.train_rows, wf.labels.end());
      summary->threshold_baseline_accuracy = threshold_baseline_accuracy(test_points, test_labels);
      const auto tr = static_cast<Eigen::Index>(wf.train_rows);
      Eigen::VectorXd y(tr);
      for (Eigen::Index i = 0; i < tr; ++i) y(i) = wf.labels[static_cast<std::size_t>(i)];
      summary->model = ridge_fit(add_bias(features).topRows(tr), y, base.beta);
      summary->model.feature_labels = names;
      summary->model.feature_labels.push_back("bias");
      summary->model.target_names = {"square"};
    }

    for (int ns : cfg.sweep.n_states) {
      MeasurementModel m = model;
      m.n_states = ns;
      const auto s = evaluate_classifier(measure_waveform_features(wf, m, physical, n_times), wf.labels, wf.train_rows);
      row(3, m, n_times, encoding, physical.kappa_phi, s);
    }
    for (int nt : cfg.sweep.time_counts) {
      const auto s = evaluate_classifier(measure_waveform_features(wf, model, physical, nt), wf.labels, wf.train_rows);
      row(4, model, nt, encoding, physical.kappa_phi, s);
    }
    for (int shots : cfg.sweep.shots) {
      MeasurementModel m = model;
      m.shots = shots;
      const auto s = evaluate_classifier(measure_waveform_features(wf, m, physical, n_times), wf.labels, wf.train_rows);
      row(5, m, n_times, encoding, physical.kappa_phi, s);
    }
    for (auto [lo, hi] : cfg.sweep.ranges) {
      const auto enc = fit_encoding(train_points, lo, hi);
      const auto w = simulate_waveform_features(cfg, physical, enc, ds);
      const auto s = evaluate_classifier(measure_waveform_features(w, model, physical, n_times), w.labels, w.train_rows);
      row(6, model, n_times, enc, physical.kappa_phi, s);
    }
    for (double kphi : cfg.sweep.kappa_phi) {
      const PhysicalConfig joint = joint_variant(physical, kphi);
      const auto w = simulate_waveform_features(cfg, joint, encoding, ds);
      const auto s = evaluate_classifier(measure_waveform_features(w, model, joint, n_times), w.labels, w.train_rows);
      row(7, model, n_times, encoding, kphi, s);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Population curves

ResultTable run_population_curves(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table("populations", {"alpha_in", "P0", "P1", "P2", "P3", "P4", "mean_n"},
                    config_hash_hex(cfg));
  const int steps = cfg.task.population_steps;
  const double T = cfg.task.pulse_duration;
  std::vector<double> amps;
  std::vector<PulseSchedule> schedules;
  for (int i = 0; i < steps; ++i) {
    const double a = cfg.task.population_amp_max * i / (steps - 1);
    amps.push_back(a);
    schedules.push_back(PulseSchedule{{{T, a}}, {T}});
  }
  const auto snaps = simulate_schedules(cfg.physical, schedules, cfg.dt, cfg.max_fock);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto p = fock_probabilities(snaps[i][0], 5, cfg.physical);
    table.add_row({amps[i], p[0], p[1], p[2], p[3], p[4], mean_photon(snaps[i][0], cfg.physical)});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Mackey-Glass

ResultTable run_mackey_glass(const ExperimentConfig& cfg, const std::vector<int>& delays) {
  cfg.validate();
  if (delays.empty()) throw InvalidArgument("run_mackey_glass: no delays");
  ResultTable table("mackeyglass", {"tau", "d", "nrmse", "beta"}, config_hash_hex(cfg));
  const int H = cfg.task.mg_history;
  const int N = cfg.task.mg_points;

  for (double tau : cfg.sweep.mg_taus) {
    const auto series = gen_mackey_glass(N, tau, cfg.seed, cfg.task.mg);
    const auto& x = series.values;
    const std::vector<double> train_values(x.begin(), x.begin() + N / 2);
    const auto encoding = fit_encoding(train_values, cfg.encoding.alpha_min, cfg.encoding.alpha_max);

    std::vector<PulseSchedule> schedules;
    for (int k = H - 1; k < N; ++k) {
      PulseSchedule s;
      for (int j = k - H + 1; j <= k; ++j) s.segments.push_back({cfg.task.mg_pulse, encode(x[j], encoding)});
      s.sample_times = {s.total_duration()};
      schedules.push_back(std::move(s));
    }
    const auto snaps = simulate_schedules(cfg.physical, schedules, cfg.dt, cfg.max_fock);

    const int n_states = cfg.measurement.n_states;
    RealMatrix features(static_cast<Eigen::Index>(snaps.size()), n_states);
    for (std::size_t r = 0; r < snaps.size(); ++r) {
      MeasurementModel m = cfg.measurement;
      m.rng_seed = derive_seed(cfg.seed, r);
      const auto fv = extract_features(snaps[r], m, cfg.physical);
      for (int c = 0; c < n_states; ++c) features(static_cast<Eigen::Index>(r), c) = fv.values[static_cast<std::size_t>(c)];
    }
    const RealMatrix fb = add_bias(features);

    for (int d : delays) {
      // rows r <-> k = r + H - 1; target x[k + d]
      const int usable = N - (H - 1) - d;
      if (usable < 8) throw InvalidArgument("run_mackey_glass: delay too large for the series");
      const Eigen::Index tr = usable / 2;
      Eigen::VectorXd y(usable);
      for (int r = 0; r < usable; ++r) y(r) = x[static_cast<std::size_t>(r + H - 1 + d)];
      const RealMatrix f = fb.topRows(usable);
      const double beta = select_beta(f.topRows(tr), y.head(tr), Metric::Nrmse);
      const auto model = ridge_fit(f.topRows(tr), y.head(tr), beta);
      const Eigen::VectorXd pred = predict(model, f.bottomRows(usable - tr));
      table.add_row({tau, static_cast<double>(d), nrmse(pred, y.tail(usable - tr)), beta});
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Kerr studies

namespace {

PhysicalConfig kerr_cavity(const PhysicalConfig& base, double k_cc, double delta) {
  PhysicalConfig p = base;
  p.include_qubit = false;
  p.k_cc = k_cc;
  p.delta_c = delta;
  return p;
}

/// mean_n after the Kerr drive for each amplitude at fixed (K, delta).
std::vector<double> photon_row(const ExperimentConfig& cfg, const PhysicalConfig& p,
                               const std::vector<double>& amps) {
  std::vector<PulseSchedule> schedules;
  for (double a : amps) schedules.push_back(PulseSchedule{{{cfg.task.kerr_drive, a}}, {cfg.task.kerr_drive}});
  const auto snaps = simulate_schedules(p, schedules, cfg.dt, cfg.max_fock);
  std::vector<double> out;
  for (const auto& s : snaps) out.push_back(mean_photon(s[0], p));
  return out;
}

std::vector<Alpha0> crossings(const ExperimentConfig& cfg, double k_cc, int n_target,
                              const std::vector<double>& detunings, const std::vector<double>& amps,
                              const std::vector<std::vector<double>>& map) {
  constexpr double kTol = 0.01;
  std::vector<Alpha0> out;
  const double target = n_target;
  for (std::size_t di = 0; di < detunings.size(); ++di) {
    const auto& row = map[di];
    const auto p = kerr_cavity(cfg.physical, k_cc, detunings[di]);
    for (std::size_t j = 0; j + 1 < amps.size(); ++j) {
      if (!(row[j] < target && row[j + 1] >= target)) continue;
      double lo = amps[j], hi = amps[j + 1];
      double mid = hi;
      double m = row[j + 1];
      for (int it = 0; it < 60 && std::abs(m - target) >= kTol; ++it) {
        mid = 0.5 * (lo + hi);
        m = driven_mean_photon(cfg, p, mid, cfg.task.kerr_drive);
        (m < target ? lo : hi) = mid;
      }
      out.push_back({detunings[di], mid});
    }
  }
  return out;
}

double waveform_nrmse(const ExperimentConfig& cfg, const PhysicalConfig& p, const WaveformDataset& ds,
                      double alpha_min, double alpha_max) {
  const std::vector<double> train_points(ds.points.begin(), ds.points.begin() + ds.train_size());
  const auto enc = fit_encoding(train_points, alpha_min, alpha_max);
  const auto wf = simulate_waveform_features(cfg, p, enc, ds);
  MeasurementModel model = cfg.measurement;
  model.rng_seed = cfg.seed;
  const auto f = measure_waveform_features(wf, model, p, static_cast<int>(cfg.task.sample_offsets.size()));
  return evaluate_classifier(f, wf.labels, wf.train_rows, Metric::Nrmse).nrmse;
}

}  // namespace

ResultTable run_kerr_photon_map(const ExperimentConfig& cfg, const std::vector<double>& kerr_list,
                                const std::vector<double>& detunings, const std::vector<double>& amps) {
  cfg.validate();
  if (kerr_list.empty() || detunings.empty() || amps.empty())
    throw InvalidArgument("run_kerr_photon_map: empty grid");
  ResultTable table("kerr-map", {"k_cc_mhz", "delta_mhz", "alpha_in", "mean_n"}, config_hash_hex(cfg));
  for (double k : kerr_list) {
    for (double d : detunings) {
      const auto row = photon_row(cfg, kerr_cavity(cfg.physical, k, d), amps);
      for (std::size_t j = 0; j < amps.size(); ++j)
        table.add_row({rad_per_us_to_mhz(k), rad_per_us_to_mhz(d), amps[j], row[j]});
    }
  }
  return table;
}

ResultTable run_kerr_task_sweep(const ExperimentConfig& cfg, const std::vector<double>& kerr_list,
                                const std::vector<double>& detunings,
                                const std::vector<std::pair<double, double>>& ranges) {
  cfg.validate();
  if (kerr_list.empty() || detunings.empty() || ranges.empty())
    throw InvalidArgument("run_kerr_task_sweep: empty grid");
  ResultTable table("kerr-sweep", {"k_cc_mhz", "delta_mhz", "alpha_min", "alpha_max", "nrmse", "accuracy"},
                    config_hash_hex(cfg));
  const auto ds = gen_sine_square(cfg.task.n_periods, cfg.seed, cfg.task.train_fraction);
  const std::vector<double> train_points(ds.points.begin(), ds.points.begin() + ds.train_size());
  MeasurementModel model = cfg.measurement;
  model.rng_seed = cfg.seed;
  const int n_times = static_cast<int>(cfg.task.sample_offsets.size());
  for (double k : kerr_list) {
    for (double d : detunings) {
      const auto p = kerr_cavity(cfg.physical, k, d);
      for (auto [lo, hi] : ranges) {
        const auto enc = fit_encoding(train_points, lo, hi);
        const auto wf = simulate_waveform_features(cfg, p, enc, ds);
        const auto f = measure_waveform_features(wf, model, p, n_times);
        const auto s = evaluate_classifier(f, wf.labels, wf.train_rows, Metric::Nrmse);
        table.add_row({rad_per_us_to_mhz(k), rad_per_us_to_mhz(d), lo, hi, s.nrmse, s.accuracy});
      }
    }
  }
  return table;
}

std::vector<Alpha0> find_alpha0(const ExperimentConfig& cfg, double k_cc, int n_target,
                                const std::vector<double>& detunings, const std::vector<double>& amps) {
  if (n_target < 1 || n_target > 3) throw InvalidArgument("find_alpha0: n_target must be 1, 2 or 3");
  if (detunings.empty() || amps.size() < 2) throw InvalidArgument("find_alpha0: empty grid");
  std::vector<std::vector<double>> map;
  for (double d : detunings) map.push_back(photon_row(cfg, kerr_cavity(cfg.physical, k_cc, d), amps));
  return crossings(cfg, k_cc, n_target, detunings, amps, map);
}

ResultTable run_kerr_isolation(const ExperimentConfig& cfg, const std::vector<double>& kerr_list,
                               const std::vector<int>& n_targets) {
  cfg.validate();
  if (kerr_list.empty() || n_targets.empty()) throw InvalidArgument("run_kerr_isolation: empty grid");
  ResultTable table("kerr-isolation", {"k_cc_mhz", "n_target", "delta_mhz", "alpha0", "nrmse"},
                    config_hash_hex(cfg));
  const auto detunings = cfg.sweep.detuning_grid();
  const auto amps = cfg.sweep.amplitude_grid();
  const auto ds = gen_sine_square(cfg.task.n_periods, cfg.seed, cfg.task.train_fraction);
  for (double k : kerr_list) {
    std::vector<std::vector<double>> map;
    for (double d : detunings) map.push_back(photon_row(cfg, kerr_cavity(cfg.physical, k, d), amps));
    for (int nt : n_targets) {
      for (const auto& sol : crossings(cfg, k, nt, detunings, amps, map)) {
        const auto p = kerr_cavity(cfg.physical, k, sol.delta);
        const double e = waveform_nrmse(cfg, p, ds, 0.7 * sol.alpha0, 1.3 * sol.alpha0);
        table.add_row({rad_per_us_to_mhz(k), static_cast<double>(nt), rad_per_us_to_mhz(sol.delta), sol.alpha0, e});
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("spearman: need two equal-length samples");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace qrc
