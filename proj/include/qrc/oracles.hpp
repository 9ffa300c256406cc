#pragma once

// Closed-form and brute-force reference results. Nothing here calls into the
// simulation code; tests and the selftest command compare against these.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qrc::oracle {

/// e^{-m} m^n / n!
double poisson(int n, double mean);

/// Coherent amplitude of a linear cavity driven from vacuum by a constant
/// alpha_in for time t: da/dt = -(i delta + kappa_tot/2) a - i sqrt(kappa_ext) alpha_in.
std::complex<double> linear_cavity_alpha(double t, double alpha_in, double delta, double kappa_ext,
                                         double kappa_tot);

/// Drive amplitude giving mean photon number n_mean after time t (inverse of
/// the above).
double linear_cavity_drive_for(double n_mean, double t, double delta, double kappa_ext,
                               double kappa_tot);

/// Mackey-Glass with beta = 0 from a constant history x0.
double pure_decay(double t, double x0, double gamma);

/// Density matrix after time t under a constant Hamiltonian and collapse set,
/// by exponentiating the column-stacked Liouvillian. Dense; small dims only.
Eigen::MatrixXcd lindblad_exact(const Eigen::MatrixXcd& rho0, const Eigen::MatrixXcd& h,
                                const std::vector<std::pair<double, Eigen::MatrixXcd>>& ops, double t);

/// Best accuracy of any rule "label = [x >= c]" or its negation, by testing
/// every midpoint between sorted distinct values plus both constant rules.
double best_threshold_accuracy(const std::vector<double>& x, const std::vector<int>& labels);

/// Dense normal-equation ridge solution (F^T F + beta I)^{-1} F^T Y.
Eigen::MatrixXd ridge_normal(const Eigen::MatrixXd& f, const Eigen::MatrixXd& y, double beta);

}  // namespace qrc::oracle
