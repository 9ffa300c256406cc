#include "qrc/measurement.hpp"

#include <algorithm>
#include <cmath>

namespace qrc {

void MeasurementModel::validate(int n_fock) const {
  if (n_states < 1) throw InvalidArgument("measurement.n_states: requires n_states >= 1");
  if (n_states > n_fock) throw InvalidArgument("measurement.n_states: requires n_states <= n_fock");
  if (shots < 0) throw InvalidArgument("measurement.shots: requires shots >= 0");
  if (!std::isfinite(distortion_a) || !std::isfinite(distortion_b))
    throw InvalidArgument("measurement.distortion_a/b: must be finite");
  if (distortion_b < 0) throw InvalidArgument("measurement.distortion_b: requires b >= 0");
  const double lo = std::min(distortion_b, distortion_a + distortion_b);
  const double hi = std::max(distortion_b, distortion_a + distortion_b);
  if (lo < 0 || hi > 1)
    throw InvalidArgument("measurement.distortion_a: a * p + b must stay in [0, 1] for p in [0, 1]");
}

std::vector<double> fock_probabilities(const DensityMatrix& rho, int n_states,
                                       const PhysicalConfig& cfg) {
  const DensityMatrix cav = cavity_state(rho, cfg);
  if (n_states < 0 || n_states > cav.dim())
    throw InvalidArgument("fock_probabilities: n_states exceeds the cavity dimension");
  std::vector<double> p(static_cast<std::size_t>(n_states));
  for (int n = 0; n < n_states; ++n) p[n] = std::clamp(cav.data(n, n).real(), 0.0, 1.0);
  return p;
}

double apply_distortion(double p, const MeasurementModel& model) {
  return std::clamp(model.distortion_a * p + model.distortion_b, 0.0, 1.0);
}

double sample_shots(double p, const MeasurementModel& model, std::mt19937_64& rng) {
  if (model.shots == 0) return p;
  std::binomial_distribution<int> dist(model.shots, std::clamp(p, 0.0, 1.0));
  return static_cast<double>(dist(rng)) / model.shots;
}

double sample_shots(double p, const MeasurementModel& model) {
  std::mt19937_64 rng(model.rng_seed);
  return sample_shots(p, model, rng);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over seed ^ index
  std::uint64_t z = (seed ^ index) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FeatureVector extract_features(const std::vector<DensityMatrix>& snapshots,
                               const MeasurementModel& model, const PhysicalConfig& cfg,
                               const std::vector<double>& sample_times) {
  if (snapshots.empty()) throw InvalidArgument("extract_features: no snapshots");
  if (!sample_times.empty() && sample_times.size() != snapshots.size())
    throw InvalidArgument("extract_features: sample_times and snapshots differ in length");

  std::vector<std::vector<double>> probs;
  probs.reserve(snapshots.size());
  for (const auto& s : snapshots) probs.push_back(fock_probabilities(s, model.n_states, cfg));

  std::mt19937_64 rng(model.rng_seed);
  FeatureVector fv;
  fv.values.reserve(static_cast<std::size_t>(model.n_states) * snapshots.size());
  for (int n = 0; n < model.n_states; ++n) {
    for (std::size_t t = 0; t < snapshots.size(); ++t) {
      fv.values.push_back(sample_shots(apply_distortion(probs[t][n], model), model, rng));
      fv.labels.push_back({n, sample_times.empty() ? static_cast<double>(t) : sample_times[t]});
    }
  }
  return fv;
}

}  // namespace qrc
