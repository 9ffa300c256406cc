#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrc/dynamics.hpp"
#include "qrc/measurement.hpp"
#include "qrc/tasks.hpp"

namespace qrc {

inline constexpr const char* kVersion = "qrc 0.3.1";

/// Per-study parameters. Times in us unless noted.
struct TaskParams {
  int n_periods = 400;
  double train_fraction = 0.5;
  double pulse_duration = 0.2;
  std::vector<double> sample_offsets{0.05, 0.10, 0.15, 0.20};
  int select_k = 8;
  double population_amp_max = 10.4;
  int population_steps = 53;
  int mg_points = 2000;
  MackeyGlassParams mg;
  int mg_history = 20;
  double mg_pulse = 0.1;
  double kerr_drive = 0.4;
};

/// Sweep axes. Rates in rad/us, amplitudes in sqrt(MHz). Empty lists disable
/// the corresponding optional sweep.
struct SweepAxes {
  std::vector<int> n_states;
  std::vector<int> time_counts;
  std::vector<int> shots;
  std::vector<std::pair<double, double>> ranges;
  std::vector<double> kappa_phi;
  std::vector<double> k_cc;
  double delta_min = mhz_to_rad_per_us(-3.0);
  double delta_max = mhz_to_rad_per_us(3.0);
  int delta_steps = 25;
  double amp_min = 0.0;
  double amp_max = 12.0;
  int amp_steps = 49;
  std::vector<int> n_targets{1, 2, 3};
  std::vector<int> delays;
  std::vector<double> mg_taus{17.0};
  int seeds = 1;

  std::vector<double> detuning_grid() const;
  std::vector<double> amplitude_grid() const;
};

struct ExperimentConfig {
  PhysicalConfig physical;
  MeasurementModel measurement;
  EncodingMap encoding;
  TaskParams task;
  SweepAxes sweep;
  std::uint64_t seed = 1;
  double dt = kDefaultDt;
  /// Upper bound for automatic growth of n_fock on truncation overflow.
  int max_fock = 160;

  ExperimentConfig();
  void validate() const;
};

/// Parse failure, unknown key or invariant violation. `line` is 0 when the
/// problem is not tied to a file line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

/// Loads the INI-style config at `path` (empty path: defaults only), then
/// applies `overrides` ("section.key=value"). Rates are read in MHz and
/// converted to rad/us.
ExperimentConfig parse_config(const std::string& path,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});

/// Resolved config as re-parseable text, one key per line in a fixed order.
std::string to_config_text(const ExperimentConfig& cfg);

/// FNV-1a 64 of to_config_text(cfg).
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

/// All recognised "section.key" names.
std::vector<std::string> config_keys();

}  // namespace qrc
