#include "qrc/quantum_core.hpp"

#include <cmath>
#include <sstream>

namespace qrc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace

void PhysicalConfig::validate() const {
  require(n_fock >= 2, "physical.n_fock: requires n_fock >= 2");
  for (auto [name, v] : {std::pair{"delta_c", delta_c}, {"delta_q", delta_q}, {"chi", chi},
                         {"k_cc", k_cc}, {"k_cq", k_cq}, {"kappa_ext", kappa_ext},
                         {"kappa_int", kappa_int}, {"t1_qubit", t1_qubit},
                         {"kappa_phi", kappa_phi}}) {
    require(std::isfinite(v), std::string("physical.") + name + ": must be finite");
  }
  require(kappa_ext >= 0, "physical.kappa_ext: requires kappa_ext >= 0");
  require(kappa_int >= 0, "physical.kappa_int: requires kappa_int >= 0");
  require(kappa_phi >= 0, "physical.kappa_phi: requires kappa_phi >= 0");
  require(t1_qubit > 0, "physical.t1_qubit: requires t1_qubit > 0");
}

double ground_resonant_delta_c(const PhysicalConfig& cfg) {
  // Ground-sector level n: (delta_c + chi/2) n + (k_cc - k_cq/2) n^2, so the
  // dressed cavity matches the cavity-only model with zero detuning.
  return -cfg.chi / 2.0 + cfg.k_cq / 2.0;
}

ComplexMatrix annihilation(int n_fock) {
  if (n_fock < 2) throw InvalidArgument("annihilation: requires n_fock >= 2");
  ComplexMatrix a = ComplexMatrix::Zero(n_fock, n_fock);
  for (int m = 0; m + 1 < n_fock; ++m) a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
  return a;
}

ComplexMatrix sigma_z() {
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  z(0, 0) = -1.0;
  z(1, 1) = 1.0;
  return z;
}

ComplexMatrix sigma_minus() {
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

ComplexMatrix lift_cavity(const ComplexMatrix& op, const PhysicalConfig& cfg) {
  if (!cfg.include_qubit) return op;
  return kron(op, ComplexMatrix::Identity(2, 2));
}

ComplexMatrix lift_qubit(const ComplexMatrix& op, const PhysicalConfig& cfg) {
  if (!cfg.include_qubit) throw InvalidArgument("lift_qubit: configuration has no qubit");
  return kron(ComplexMatrix::Identity(cfg.n_fock, cfg.n_fock), op);
}

RealVector drift_diagonal(const PhysicalConfig& cfg) {
  cfg.validate();
  const int qubit_levels = cfg.include_qubit ? 2 : 1;
  RealVector diag(cfg.dim());
  for (int n = 0; n < cfg.n_fock; ++n) {
    const double nd = n;
    for (int q = 0; q < qubit_levels; ++q) {
      double e = cfg.delta_c * nd + cfg.k_cc * nd * nd;
      if (cfg.include_qubit) {
        const double z = q == 0 ? -1.0 : 1.0;
        e += cfg.delta_q * z / 2.0 - cfg.chi / 2.0 * nd * z + cfg.k_cq * nd * nd * z / 2.0;
      }
      diag(n * qubit_levels + q) = e;
    }
  }
  return diag;
}

ComplexMatrix build_hamiltonian(const PhysicalConfig& cfg, Complex drive_amp) {
  if (!std::isfinite(drive_amp.real()) || !std::isfinite(drive_amp.imag()))
    throw InvalidArgument("build_hamiltonian: drive amplitude must be finite");
  ComplexMatrix h = drift_diagonal(cfg).cast<Complex>().asDiagonal();
  if (drive_amp != Complex{}) {
    const ComplexMatrix a = lift_cavity(annihilation(cfg.n_fock), cfg);
    const Complex c = std::sqrt(cfg.kappa_ext) * drive_amp;
    h += c * a.adjoint() + std::conj(c) * a;
  }
  return h;
}

std::vector<CollapseOperator> lindblad_ops(const PhysicalConfig& cfg) {
  cfg.validate();
  std::vector<CollapseOperator> ops;
  ops.push_back({cfg.kappa_total(), lift_cavity(annihilation(cfg.n_fock), cfg), "cavity_loss"});
  if (cfg.include_qubit) {
    ops.push_back({1.0 / cfg.t1_qubit, lift_qubit(sigma_minus(), cfg), "qubit_decay"});
    ops.push_back({cfg.kappa_phi / 2.0, lift_qubit(sigma_z(), cfg), "qubit_dephasing"});
  }
  return ops;
}

}  // namespace qrc
