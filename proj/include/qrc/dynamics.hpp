#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>

#include "qrc/quantum_core.hpp"

namespace qrc {

/// Density matrix over the cavity (or cavity x qubit) space.
struct DensityMatrix {
  ComplexMatrix data;

  Eigen::Index dim() const { return data.rows(); }
  Complex trace() const { return data.trace(); }

  /// |0><0| on the cavity, tensored with |g><g| when the ancilla is present.
  static DensityMatrix vacuum(const PhysicalConfig& cfg);
  static DensityMatrix from_ket(const Eigen::VectorXcd& ket);
  static DensityMatrix fock(int n, int n_fock);
};

struct InvariantReport {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;

  static constexpr double kTraceTol = 1e-6;
  static constexpr double kHermitianTol = 1e-9;
  static constexpr double kPositivityTol = -1e-7;

  bool ok() const {
    return trace_error < kTraceTol && hermiticity_error < kHermitianTol &&
           min_eigenvalue >= kPositivityTol;
  }
};

InvariantReport check_invariants(const DensityMatrix& rho);

struct PulseSegment {
  double duration;  // us
  Complex amplitude;  // sqrt(MHz)
};

/// Piecewise-constant drive plus the absolute times (us) at which snapshots
/// are recorded.
struct PulseSchedule {
  std::vector<PulseSegment> segments;
  std::vector<double> sample_times;

  double total_duration() const;
  void validate() const;
};

/// Raised when the top two Fock levels carry more than kTruncationTolerance
/// population, i.e. n_fock is too small for the drive.
class TruncationOverflow : public std::runtime_error {
 public:
  TruncationOverflow(double tail, int n_fock);
  double tail() const { return tail_; }
  int n_fock() const { return n_fock_; }

 private:
  double tail_;
  int n_fock_;
};

inline constexpr double kTruncationTolerance = 1e-4;
inline constexpr double kDefaultDt = 1e-3;  // 1 ns

/// Dense Lindblad right-hand side
///   -i[H, rho] + sum_k g_k (L_k rho L_k^+ - {L_k^+ L_k, rho}/2).
ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& h,
                           const std::vector<CollapseOperator>& ops);

/// Lindblad generator split into an elementwise-diagonal part (drift energies
/// and decay of the effective non-Hermitian Hamiltonian) and a sparse remainder
/// (drive, jumps). The split lets the integrator propagate the diagonal part
/// exactly, which keeps fixed-step integration stable for large Kerr shifts.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const PhysicalConfig& cfg);

  void set_drive(Complex amplitude);
  Complex drive() const { return drive_; }

  /// lambda(m, n): rho_mn' = lambda_mn rho_mn for the diagonal part.
  const ComplexMatrix& diagonal_rates() const { return lambda_; }

  /// Remainder of the generator applied to a Hermitian rho.
  void apply_remainder(const ComplexMatrix& rho, ComplexMatrix& out) const;

  /// Full generator (diagonal part + remainder); used by tests.
  ComplexMatrix apply(const ComplexMatrix& rho) const;

  int dim() const { return dim_; }
  const PhysicalConfig& config() const { return cfg_; }

 private:
  using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

  PhysicalConfig cfg_;
  int dim_;
  Complex drive_{};
  ComplexMatrix lambda_;
  Sparse ladder_;          // a on the full space
  Sparse ladder_dag_;      // a^+ on the full space
  Sparse static_offdiag_;  // off-diagonal part of H0 - i/2 sum g L^+L
  Sparse coupling_;        // static_offdiag_ + drive terms
  std::vector<std::pair<double, Sparse>> jumps_;
  mutable ComplexMatrix scratch_a_, scratch_b_;
};

/// Fixed-step integrator of the master equation over a pulse schedule. Step
/// boundaries are placed exactly at every segment boundary and sample time.
/// The diagonal part of the generator is integrated exactly (integrating
/// factor) and the remainder by classical fourth-order Runge-Kutta. `dt` is
/// an upper bound: intervals with a strong drive or a large truncation are
/// split further so that the Runge-Kutta part stays accurate.
std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const PhysicalConfig& cfg,
                                  const PulseSchedule& schedule, double dt = kDefaultDt);

/// Plain RK4 on the dense right-hand side; serial reference for tests.
std::vector<DensityMatrix> evolve_reference(const DensityMatrix& rho0,
                                            const PhysicalConfig& cfg,
                                            const PulseSchedule& schedule,
                                            double dt = kDefaultDt);

/// Evolves every schedule from rho0. The OpenMP version distributes schedules
/// across threads; output order and values are independent of scheduling.
std::vector<std::vector<DensityMatrix>> evolve_batch(const DensityMatrix& rho0,
                                                     const PhysicalConfig& cfg,
                                                     const std::vector<PulseSchedule>& schedules,
                                                     double dt = kDefaultDt);
std::vector<std::vector<DensityMatrix>> evolve_batch_serial(
    const DensityMatrix& rho0, const PhysicalConfig& cfg,
    const std::vector<PulseSchedule>& schedules, double dt = kDefaultDt);

/// Population in the top two Fock levels of the cavity.
double truncation_tail(const DensityMatrix& rho, const PhysicalConfig& cfg);

DensityMatrix partial_trace_qubit(const DensityMatrix& rho);

/// Cavity reduced state (identity for the cavity-only model).
DensityMatrix cavity_state(const DensityMatrix& rho, const PhysicalConfig& cfg);

double mean_photon(const DensityMatrix& rho, const PhysicalConfig& cfg);

}  // namespace qrc
