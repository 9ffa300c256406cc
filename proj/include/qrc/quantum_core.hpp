#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Converts a linear frequency in MHz into an angular rate in rad/us.
constexpr double mhz_to_rad_per_us(double mhz) { return kTwoPi * mhz; }
constexpr double rad_per_us_to_mhz(double rate) { return rate / kTwoPi; }

/// Raised when a configuration or argument violates a documented invariant.
/// The message names the offending field.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Device constants of the measured circuit. Absolute frequencies are kept for
/// reference only; the simulator works in the drive frame.
namespace device {
inline constexpr double kCavityFrequencyGHz = 7.617;
inline constexpr double kQubitFrequencyGHz = 6.21031;
inline constexpr double kChiMHz = 22.29;
inline constexpr double kSelfKerrMHz = -0.300;
inline constexpr double kCrossKerrCorrectionMHz = -0.44;
inline constexpr double kKappaTotalMHz = 0.560;
inline constexpr double kQubitT1us = 8.01;
/// Cavity decay time from the circuit table. Inconsistent with kKappaTotalMHz
/// (1/kappa_tot is about 0.284 us); dynamics use kKappaTotalMHz.
inline constexpr double kCavityT1us = 0.93;
}  // namespace device

/// Circuit rates in the frame rotating with the cavity drive.
/// Rates are angular (rad/us), times in us.
struct PhysicalConfig {
  int n_fock = 25;
  bool include_qubit = false;
  double delta_c = 0.0;
  double delta_q = 0.0;
  double chi = mhz_to_rad_per_us(device::kChiMHz);
  double k_cc = mhz_to_rad_per_us(device::kSelfKerrMHz);
  double k_cq = 0.0;
  double kappa_ext = mhz_to_rad_per_us(device::kKappaTotalMHz);
  double kappa_int = 0.0;
  double t1_qubit = device::kQubitT1us;
  double kappa_phi = 0.0;

  double kappa_total() const { return kappa_ext + kappa_int; }
  /// Hilbert-space dimension: n_fock, or 2 * n_fock with the ancilla.
  int dim() const { return include_qubit ? 2 * n_fock : n_fock; }

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;
};

/// Detuning delta_c that puts the drive on the cavity resonance dressed by the
/// ancilla ground state (sigma_z = -1 sector).
double ground_resonant_delta_c(const PhysicalConfig& cfg);

/// Truncated ladder operator on span{|0>, ..., |n_fock-1>}.
ComplexMatrix annihilation(int n_fock);

/// Ancilla operators in the basis (|g>, |e>).
ComplexMatrix sigma_z();
ComplexMatrix sigma_minus();

/// Cavity-space operator lifted to the full (cavity major, qubit minor) space.
ComplexMatrix lift_cavity(const ComplexMatrix& op, const PhysicalConfig& cfg);
ComplexMatrix lift_qubit(const ComplexMatrix& op, const PhysicalConfig& cfg);

/// Drive-frame Hamiltonian divided by hbar for a constant drive amplitude
/// (sqrt(MHz)).
ComplexMatrix build_hamiltonian(const PhysicalConfig& cfg, Complex drive_amp);

/// Diagonal of the drift part of the Hamiltonian (everything except the drive).
RealVector drift_diagonal(const PhysicalConfig& cfg);

struct CollapseOperator {
  double rate;
  ComplexMatrix op;
  std::string name;
};

/// Jump operators with their rates: cavity loss, then (with the ancilla)
/// qubit decay and pure dephasing.
std::vector<CollapseOperator> lindblad_ops(const PhysicalConfig& cfg);

}  // namespace qrc
