#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qrc/config.hpp"
#include "qrc/readout.hpp"

namespace qrc {

/// Rectangular table of reals with provenance. Rows are kept in axis order.
class ResultTable {
 public:
  ResultTable(std::string experiment, std::vector<std::string> columns, std::string config_hash);

  void add_row(std::vector<double> row);
  /// Appends the rows of `other`; refuses tables from a different config or
  /// with different columns.
  void merge(const ResultTable& other);

  const std::string& experiment() const { return experiment_; }
  const std::string& config_hash() const { return hash_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::vector<double> column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;

  /// '#' provenance lines, a header row, then one line per row (LF endings,
  /// shortest round-trip decimal formatting).
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
  /// <experiment>-<first 8 hex digits of the config hash>
  std::string file_stem() const;

 private:
  std::string experiment_;
  std::vector<std::string> columns_;
  std::string hash_;
  std::vector<std::vector<double>> rows_;
};

/// Evolves each schedule from the vacuum of `cfg`. A schedule that overflows
/// the Fock truncation is retried with a larger n_fock, up to `max_fock`.
/// Runs in parallel over schedules. `used_fock`, when given, receives the
/// truncation used per schedule.
std::vector<std::vector<DensityMatrix>> simulate_schedules(const PhysicalConfig& cfg,
                                                           const std::vector<PulseSchedule>& schedules,
                                                           double dt, int max_fock,
                                                           std::vector<int>* used_fock = nullptr);

/// Worst invariant values seen over every snapshot produced by
/// simulate_schedules since the last reset. Diagnostic only; guarded by a mutex.
struct InvariantSummary {
  InvariantReport worst;
  std::size_t snapshots = 0;
};
InvariantSummary invariant_summary();
void reset_invariant_summary();

/// Ancilla-model truncation used when a sweep switches the cavity-only
/// configuration to the joint model.
inline constexpr int kJointFockDefault = 20;

/// Reservoir features for the sine/square task.
struct WaveformFeatures {
  RealMatrix features;  // rows: points; cols: state-major (state, time)
  std::vector<int> labels;  // 0 = sine, 1 = square
  std::vector<double> amplitudes;  // encoded current input per point
  std::size_t train_rows = 0;
  std::vector<std::vector<DensityMatrix>> snapshots;  // per distinct input pair
  std::vector<std::size_t> pair_of_point;
};

/// Simulates the two-pulse protocol for every point of `ds` (the point before
/// the first one is taken equal to it). Distinct (previous, current) input
/// pairs are simulated once.
WaveformFeatures simulate_waveform_features(const ExperimentConfig& cfg, const PhysicalConfig& physical,
                                            const EncodingMap& encoding, const WaveformDataset& ds);

/// Re-measures stored snapshots with `model`, restricted to the first
/// `n_times` sample times. Shot noise uses one derived seed per point.
RealMatrix measure_waveform_features(const WaveformFeatures& wf, const MeasurementModel& model,
                                     const PhysicalConfig& physical, int n_times);

struct ClassifierScore {
  double accuracy = 0.0;
  double nrmse = 0.0;
  double beta = 0.0;
};

/// Trains on the leading train_rows (beta by validation on `metric`) and
/// scores the remaining rows against {0, 1} labels.
ClassifierScore evaluate_classifier(const RealMatrix& features, const std::vector<int>& labels,
                                    std::size_t train_rows, Metric metric = Metric::Accuracy);

/// Best single-threshold classifier over the waveform values: the threshold
/// is swept over every distinct amplitude with both polarities.
double threshold_baseline_accuracy(const std::vector<double>& values, const std::vector<int>& labels);

struct SineSquareSummary {
  double accuracy = 0.0;
  double nrmse = 0.0;
  double beta = 0.0;
  double accuracy_selected = 0.0;
  std::vector<int> selected;
  std::vector<std::string> selected_labels;
  double linear_baseline_accuracy = 0.0;
  double threshold_baseline_accuracy = 0.0;
  ReadoutModel model;
};

/// Rows: variant, seed, n_states, n_times, shots, alpha_min, alpha_max,
/// kappa_phi_mhz, accuracy, nrmse, beta. Variant codes are listed in
/// kSineSquareVariants.
ResultTable run_sine_square(const ExperimentConfig& cfg, SineSquareSummary* summary = nullptr);

inline const std::map<int, std::string> kSineSquareVariants{
    {0, "base"},          {1, "selected_k"}, {2, "linear_baseline"}, {3, "n_states"},
    {4, "time_count"},    {5, "shots"},      {6, "encoding_range"},  {7, "kappa_phi"}};

/// Columns: alpha_in, P0..P4, mean_n.
ResultTable run_population_curves(const ExperimentConfig& cfg);

/// Columns: tau, d, nrmse, beta.
ResultTable run_mackey_glass(const ExperimentConfig& cfg, const std::vector<int>& delays);

/// Cavity-only constant drive from vacuum for task.kerr_drive; columns
/// k_cc_mhz, delta_mhz, alpha_in, mean_n.
ResultTable run_kerr_photon_map(const ExperimentConfig& cfg, const std::vector<double>& kerr_list,
                                const std::vector<double>& detunings, const std::vector<double>& amps);

/// Columns: k_cc_mhz, delta_mhz, alpha_min, alpha_max, nrmse, accuracy.
ResultTable run_kerr_task_sweep(const ExperimentConfig& cfg, const std::vector<double>& kerr_list,
                                const std::vector<double>& detunings,
                                const std::vector<std::pair<double, double>>& ranges);

struct Alpha0 {
  double delta;
  double alpha0;
};

/// Every upward crossing of mean_n through n_target along the amplitude grid,
/// refined by bisection to |mean_n - n_target| < 0.01. Detunings without a
/// crossing are omitted.
std::vector<Alpha0> find_alpha0(const ExperimentConfig& cfg, double k_cc, int n_target,
                                const std::vector<double>& detunings, const std::vector<double>& amps);

/// Columns: k_cc_mhz, n_target, delta_mhz, alpha0, nrmse.
ResultTable run_kerr_isolation(const ExperimentConfig& cfg, const std::vector<double>& kerr_list,
                               const std::vector<int>& n_targets);

/// Mean photon number after a constant drive of `duration` from vacuum.
double driven_mean_photon(const ExperimentConfig& cfg, const PhysicalConfig& physical, double amp,
                          double duration);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qrc
