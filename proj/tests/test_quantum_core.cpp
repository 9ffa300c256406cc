#include <doctest.h>

#include <cmath>
#include <random>

#include "qrc/quantum_core.hpp"

using namespace qrc;

TEST_SUITE("quantum-core") {

TEST_CASE("annihilation at the smallest size") {
  const ComplexMatrix a = annihilation(2);
  CHECK(a(0, 1) == Complex(1.0, 0.0));
  CHECK(a(0, 0) == Complex(0.0, 0.0));
  CHECK(a(1, 0) == Complex(0.0, 0.0));
  CHECK(a(1, 1) == Complex(0.0, 0.0));
}

TEST_CASE("annihilation entries follow sqrt(m+1)") {
  const ComplexMatrix a = annihilation(3);
  CHECK(a(1, 2).real() == doctest::Approx(1.41421).epsilon(1e-5));
  CHECK(a(0, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("number operator diagonal") {
  const int n = 7;
  const ComplexMatrix num = annihilation(n).adjoint() * annihilation(n);
  for (int k = 0; k < n; ++k) CHECK(num(k, k).real() == doctest::Approx(k));
  CHECK((num - ComplexMatrix(num.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncated commutator identity holds elementwise") {
  for (int n : {2, 5, 12}) {
    const ComplexMatrix a = annihilation(n);
    ComplexMatrix expected = ComplexMatrix::Identity(n, n);
    expected(n - 1, n - 1) -= static_cast<double>(n);
    CHECK((a * a.adjoint() - a.adjoint() * a - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("annihilation rejects n_fock < 2") {
  CHECK_THROWS_AS(annihilation(1), InvalidArgument);
  CHECK_THROWS_AS(annihilation(0), InvalidArgument);
}

TEST_CASE("hamiltonian without detuning, Kerr or drive vanishes") {
  PhysicalConfig cfg;
  cfg.k_cc = 0.0;
  CHECK(build_hamiltonian(cfg, 0.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hamiltonian detuning term scales the number operator") {
  PhysicalConfig cfg;
  cfg.n_fock = 3;
  cfg.k_cc = 0.0;
  cfg.delta_c = kTwoPi;
  const ComplexMatrix h = build_hamiltonian(cfg, 0.0);
  CHECK(h(0, 0).real() == doctest::Approx(0.0));
  CHECK(h(1, 1).real() == doctest::Approx(kTwoPi));
  CHECK(h(2, 2).real() == doctest::Approx(2 * kTwoPi));
  CHECK(h(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("hamiltonian Kerr diagonal") {
  PhysicalConfig cfg;
  cfg.n_fock = 3;
  cfg.k_cc = mhz_to_rad_per_us(-0.3);
  const ComplexMatrix h = build_hamiltonian(cfg, 0.0);
  CHECK(h(0, 0).real() == doctest::Approx(0.0));
  CHECK(h(1, 1).real() == doctest::Approx(-kTwoPi * 0.3));
  CHECK(h(2, 2).real() == doctest::Approx(-kTwoPi * 1.2));
}

TEST_CASE("drive couples neighbouring Fock levels with sqrt(kappa_ext) alpha") {
  PhysicalConfig cfg;
  cfg.n_fock = 4;
  const Complex alpha(1.5, -0.5);
  const ComplexMatrix h = build_hamiltonian(cfg, alpha);
  const double s = std::sqrt(cfg.kappa_ext);
  CHECK(std::abs(h(1, 0) - s * alpha) < 1e-12);
  CHECK(std::abs(h(3, 2) - s * alpha * std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(h(0, 1) - s * std::conj(alpha)) < 1e-12);
}

TEST_CASE("joint hamiltonian diagonal with cavity-major ordering") {
  PhysicalConfig cfg;
  cfg.include_qubit = true;
  cfg.n_fock = 4;
  cfg.delta_c = 0.3;
  cfg.delta_q = 0.7;
  cfg.k_cq = mhz_to_rad_per_us(-0.44);
  const ComplexMatrix h = build_hamiltonian(cfg, 0.0);
  REQUIRE(h.rows() == 8);
  for (int n = 0; n < 4; ++n) {
    for (int q = 0; q < 2; ++q) {
      const double sz = q == 0 ? -1.0 : 1.0;  // index 0 = ground
      const double expect = cfg.delta_c * n + cfg.delta_q * sz / 2 - cfg.chi / 2 * n * sz +
                            cfg.k_cc * n * n + cfg.k_cq * n * n * sz / 2;
      CHECK(h(2 * n + q, 2 * n + q).real() == doctest::Approx(expect));
    }
  }
}

TEST_CASE("hamiltonian is Hermitian for random valid configs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    PhysicalConfig cfg;
    cfg.include_qubit = trial % 2 == 0;
    cfg.n_fock = 2 + trial % 9;
    cfg.delta_c = u(rng);
    cfg.delta_q = u(rng);
    cfg.chi = u(rng);
    cfg.k_cc = u(rng);
    cfg.k_cq = u(rng);
    const ComplexMatrix h = build_hamiltonian(cfg, Complex(u(rng), u(rng)));
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(h.rows() == cfg.dim());
    CHECK(h.allFinite());
  }
}

TEST_CASE("hamiltonian rejects a non-finite drive") {
  PhysicalConfig cfg;
  CHECK_THROWS_AS(build_hamiltonian(cfg, Complex(NAN, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(build_hamiltonian(cfg, Complex(0.0, INFINITY)), InvalidArgument);
}

TEST_CASE("dimension is n_fock or 2 n_fock") {
  PhysicalConfig cfg;
  cfg.n_fock = 9;
  CHECK(cfg.dim() == 9);
  cfg.include_qubit = true;
  CHECK(cfg.dim() == 18);
}

TEST_CASE("cavity-only collapse operators") {
  PhysicalConfig cfg;
  const auto ops = lindblad_ops(cfg);
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].rate == doctest::Approx(kTwoPi * 0.56));
  CHECK((ops[0].op - annihilation(cfg.n_fock)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("joint-model collapse operators") {
  PhysicalConfig cfg;
  cfg.include_qubit = true;
  cfg.n_fock = 4;
  const auto ops = lindblad_ops(cfg);
  REQUIRE(ops.size() == 3);
  CHECK(ops[1].rate == doctest::Approx(0.12484).epsilon(1e-4));
  CHECK(ops[2].rate == 0.0);
  CHECK(ops[0].op.rows() == 8);
  // sigma_minus lowers e -> g on every cavity level
  CHECK(ops[1].op(0, 1) == Complex(1.0, 0.0));
  CHECK(ops[1].op(6, 7) == Complex(1.0, 0.0));
  cfg.kappa_phi = 2.0;
  CHECK(lindblad_ops(cfg)[2].rate == doctest::Approx(1.0));
}

TEST_CASE("defaults carry the device parameters") {
  PhysicalConfig cfg;
  CHECK(cfg.chi == doctest::Approx(kTwoPi * 22.29));
  CHECK(cfg.k_cc == doctest::Approx(-kTwoPi * 0.300));
  CHECK(cfg.kappa_total() == doctest::Approx(kTwoPi * 0.560));
  CHECK(cfg.t1_qubit == doctest::Approx(8.01));
  CHECK(cfg.kappa_int == 0.0);
  CHECK(cfg.k_cq == 0.0);
  CHECK(device::kCrossKerrCorrectionMHz == doctest::Approx(-0.44));
  CHECK(device::kCavityT1us == doctest::Approx(0.93));
}

TEST_CASE("config validation names the failing field") {
  PhysicalConfig cfg;
  cfg.n_fock = 1;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("n_fock >= 2"), InvalidArgument);
  cfg = {};
  cfg.kappa_ext = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.t1_qubit = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.kappa_phi = -0.1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("ground-resonant detuning matches the bare cavity in the ancilla ground sector") {
  PhysicalConfig joint;
  joint.include_qubit = true;
  joint.n_fock = 6;
  PhysicalConfig bare;
  bare.n_fock = 6;
  SUBCASE("without cross-Kerr correction the whole ladder matches") {
    joint.delta_c = ground_resonant_delta_c(joint);
    const ComplexMatrix hj = build_hamiltonian(joint, 0.0);
    const ComplexMatrix hb = build_hamiltonian(bare, 0.0);
    for (int n = 0; n < 6; ++n) CHECK(hj(2 * n, 2 * n).real() == doctest::Approx(hb(n, n).real()).epsilon(1e-12));
  }
  SUBCASE("with the correction the 0-1 transition matches and the ladder picks up k_cq/2 curvature") {
    joint.k_cq = mhz_to_rad_per_us(-0.44);
    joint.delta_c = ground_resonant_delta_c(joint);
    const ComplexMatrix hj = build_hamiltonian(joint, 0.0);
    const ComplexMatrix hb = build_hamiltonian(bare, 0.0);
    CHECK((hj(2, 2) - hj(0, 0)).real() == doctest::Approx((hb(1, 1) - hb(0, 0)).real()).epsilon(1e-12));
    for (int n = 0; n < 6; ++n) {
      const double expect = hb(n, n).real() - joint.k_cq / 2.0 * n * (n - 1);
      CHECK((hj(2 * n, 2 * n) - hj(0, 0)).real() == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
