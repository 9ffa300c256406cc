#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "qrc/dynamics.hpp"

namespace qrc {

/// Readout model turning Fock populations into reservoir features.
/// p_measured = clamp(a * p + b), then optionally estimated from `shots`
/// Bernoulli trials (shots == 0 is the infinite-shot limit).
struct MeasurementModel {
  int n_states = 5;
  int shots = 0;
  double distortion_a = 1.0;
  double distortion_b = 0.0;
  std::uint64_t rng_seed = 1;

  void validate(int n_fock) const;
};

struct FeatureLabel {
  int state;
  double time;  // us
};

/// Features ordered state-major, sample-time minor.
struct FeatureVector {
  std::vector<double> values;
  std::vector<FeatureLabel> labels;
};

/// Diagonal of the cavity reduced state, clamped to [0, 1].
std::vector<double> fock_probabilities(const DensityMatrix& rho, int n_states,
                                       const PhysicalConfig& cfg);

double apply_distortion(double p, const MeasurementModel& model);

/// Draws Binomial(shots, p) / shots from `rng`; returns p when shots == 0.
double sample_shots(double p, const MeasurementModel& model, std::mt19937_64& rng);

/// Convenience overload seeding a generator from model.rng_seed.
double sample_shots(double p, const MeasurementModel& model);

/// Well-mixed per-item seed derived from a base seed and an item index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Probabilities -> distortion -> shot sampling for every (state, snapshot).
/// `sample_times` labels the snapshots and may be empty.
FeatureVector extract_features(const std::vector<DensityMatrix>& snapshots,
                               const MeasurementModel& model, const PhysicalConfig& cfg,
                               const std::vector<double>& sample_times = {});

}  // namespace qrc
