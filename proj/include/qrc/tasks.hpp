#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qrc {

enum class Waveform : int { Sine = 0, Square = 1 };

inline constexpr int kPointsPerPeriod = 8;

/// Random concatenation of one-period sine and square waveforms.
struct WaveformDataset {
  std::vector<double> points;
  std::vector<Waveform> labels;
  int n_periods = 0;
  double train_fraction = 0.5;

  /// Number of leading points in the training split; always a whole number
  /// of periods.
  std::size_t train_size() const;
};

/// One period of each waveform, k = 0..7.
std::vector<double> sine_period();
std::vector<double> square_period();

WaveformDataset gen_sine_square(int n_periods, std::uint64_t seed, double train_fraction = 0.5);

struct MackeyGlassParams {
  double beta = 0.2;
  double gamma = 0.1;
  double tau = 17.0;
  double exponent = 10.0;
  double initial_value = 1.2;
  double dt_internal = 0.1;
  double sample_stride = 1.0;
  double burn_in = 1000.0;
};

struct MackeyGlassSeries {
  std::vector<double> values;
  MackeyGlassParams params;
  std::uint64_t seed = 0;
};

/// Integrates dx/dt = beta x(t-tau) / (1 + x(t-tau)^p) - gamma x(t) with RK4
/// from the constant history x = initial_value. The delayed term at half steps
/// comes from cubic Hermite interpolation of the stored solution and slopes,
/// which keeps the scheme fourth order. Values are sampled every sample_stride after the
/// burn-in. The constant history makes the series independent of `seed`,
/// which is recorded for provenance only.
MackeyGlassSeries gen_mackey_glass(int n_points, double tau, std::uint64_t seed,
                                   MackeyGlassParams params = {});

/// Affine map from data values to drive amplitudes (sqrt(MHz)).
struct EncodingMap {
  double alpha_min = 1.0;
  double alpha_max = 10.4;
  double data_min = -1.0;
  double data_max = 1.0;

  void validate() const;
};

/// Data outside [data_min, data_max] is clamped.
double encode(double x, const EncodingMap& map);

/// EncodingMap spanning [min, max] of `train_values`.
EncodingMap fit_encoding(const std::vector<double>& train_values, double alpha_min,
                         double alpha_max);

/// CSV with header `index,value,label`; label is blank for unlabeled series.
void write_dataset_csv(std::ostream& os, const WaveformDataset& ds);
void write_dataset_csv(std::ostream& os, const MackeyGlassSeries& series);

}  // namespace qrc
