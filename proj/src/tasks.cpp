#include "qrc/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "qrc/quantum_core.hpp"

namespace qrc {

std::size_t WaveformDataset::train_size() const {
  const auto periods = static_cast<std::size_t>(std::floor(n_periods * train_fraction));
  return periods * kPointsPerPeriod;
}

std::vector<double> sine_period() {
  std::vector<double> v(kPointsPerPeriod);
  for (int k = 0; k < kPointsPerPeriod; ++k) {
    // exact zeros at k = 0, 4 instead of sin(pi) ~ 1e-16
    v[k] = (k % 4 == 0) ? 0.0 : std::sin(2.0 * std::numbers::pi * k / kPointsPerPeriod);
  }
  return v;
}

std::vector<double> square_period() {
  std::vector<double> v(kPointsPerPeriod, 1.0);
  std::fill(v.begin() + kPointsPerPeriod / 2, v.end(), -1.0);
  return v;
}

WaveformDataset gen_sine_square(int n_periods, std::uint64_t seed, double train_fraction) {
  if (n_periods < 2) throw InvalidArgument("gen_sine_square: requires n_periods >= 2");
  if (!(train_fraction > 0 && train_fraction < 1))
    throw InvalidArgument("gen_sine_square: train fraction must lie in (0, 1)");
  const double train_periods = std::floor(n_periods * train_fraction);
  if (train_periods < 1 || train_periods >= n_periods)
    throw InvalidArgument("gen_sine_square: train fraction must leave at least one period in each split");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  const auto sine = sine_period();
  const auto square = square_period();

  WaveformDataset ds;
  ds.n_periods = n_periods;
  ds.train_fraction = train_fraction;
  ds.points.reserve(static_cast<std::size_t>(n_periods) * kPointsPerPeriod);
  for (int p = 0; p < n_periods; ++p) {
    const Waveform w = coin(rng) ? Waveform::Square : Waveform::Sine;
    const auto& block = w == Waveform::Sine ? sine : square;
    ds.points.insert(ds.points.end(), block.begin(), block.end());
    ds.labels.insert(ds.labels.end(), kPointsPerPeriod, w);
  }
  return ds;
}

namespace {

bool is_multiple(double value, double step) {
  const double q = value / step;
  return std::abs(q - std::round(q)) < 1e-9 * std::max(1.0, std::abs(q));
}

}  // namespace

MackeyGlassSeries gen_mackey_glass(int n_points, double tau, std::uint64_t seed,
                                   MackeyGlassParams params) {
  if (n_points < 1) throw InvalidArgument("gen_mackey_glass: requires n_points >= 1");
  if (!(tau > 0)) throw InvalidArgument("gen_mackey_glass: requires tau > 0");
  params.tau = tau;
  const double h = params.dt_internal;
  if (!(h > 0)) throw InvalidArgument("gen_mackey_glass: dt_internal must be > 0");
  if (!is_multiple(tau, h) || !is_multiple(params.sample_stride, h) ||
      !is_multiple(params.burn_in, h))
    throw InvalidArgument(
        "gen_mackey_glass: dt_internal must divide tau, sample_stride and burn_in");

  const auto lag = static_cast<std::size_t>(std::llround(tau / h));
  const auto stride = static_cast<std::size_t>(std::llround(params.sample_stride / h));
  const auto burn = static_cast<std::size_t>(std::llround(params.burn_in / h));
  const std::size_t total_steps = burn + stride * static_cast<std::size_t>(n_points - 1);

  // x[j] holds x((j - lag) h); the first lag + 1 entries are the history.
  // dx[j] is the right-hand slope at j; the history is flat, so slopes left of
  // t = 0 (and the left slope at t = 0) are zero.
  std::vector<double> x(lag + total_steps + 1, params.initial_value);
  std::vector<double> dx(x.size(), 0.0);
  auto rhs = [&](double xt, double xd) {
    return params.beta * xd / (1.0 + std::pow(xd, params.exponent)) - params.gamma * xt;
  };
  for (std::size_t j = lag; j < lag + total_steps; ++j) {
    const std::size_t i = j - lag;
    const double d0 = x[i];
    const double d1 = x[i + 1];
    const double m0 = dx[i];
    const double m1 = i + 1 == lag ? 0.0 : dx[i + 1];
    const double dm = 0.5 * (d0 + d1) + h / 8.0 * (m0 - m1);
    const double xj = x[j];
    const double k1 = rhs(xj, d0);
    dx[j] = k1;
    const double k2 = rhs(xj + 0.5 * h * k1, dm);
    const double k3 = rhs(xj + 0.5 * h * k2, dm);
    const double k4 = rhs(xj + h * k3, d1);
    x[j + 1] = xj + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }

  MackeyGlassSeries s;
  s.params = params;
  s.seed = seed;
  s.values.reserve(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) s.values.push_back(x[lag + burn + stride * k]);
  return s;
}

void EncodingMap::validate() const {
  if (!(data_max > data_min)) throw InvalidArgument("encoding: degenerate data range");
  if (!(alpha_max > alpha_min) || alpha_min < 0)
    throw InvalidArgument("encoding: requires alpha_max > alpha_min >= 0");
}

double encode(double x, const EncodingMap& map) {
  map.validate();
  const double u = std::clamp((x - map.data_min) / (map.data_max - map.data_min), 0.0, 1.0);
  return map.alpha_min + u * (map.alpha_max - map.alpha_min);
}

EncodingMap fit_encoding(const std::vector<double>& train_values, double alpha_min,
                         double alpha_max) {
  if (train_values.empty()) throw InvalidArgument("fit_encoding: empty training data");
  const auto [lo, hi] = std::minmax_element(train_values.begin(), train_values.end());
  EncodingMap m{alpha_min, alpha_max, *lo, *hi};
  m.validate();
  return m;
}

void write_dataset_csv(std::ostream& os, const WaveformDataset& ds) {
  os << "index,value,label\n";
  os.precision(17);
  for (std::size_t i = 0; i < ds.points.size(); ++i)
    os << i << ',' << ds.points[i] << ',' << (ds.labels[i] == Waveform::Sine ? "sine" : "square")
       << '\n';
}

void write_dataset_csv(std::ostream& os, const MackeyGlassSeries& series) {
  os << "index,value,label\n";
  os.precision(17);
  for (std::size_t i = 0; i < series.values.size(); ++i)
    os << i << ',' << series.values[i] << ",\n";
}

}  // namespace qrc
