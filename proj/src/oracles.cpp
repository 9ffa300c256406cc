#include "qrc/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace qrc::oracle {

double poisson(int n, double mean) {
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

std::complex<double> linear_cavity_alpha(double t, double alpha_in, double delta, double kappa_ext,
                                         double kappa_tot) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> g = i * delta + kappa_tot / 2.0;
  return -i * std::sqrt(kappa_ext) * alpha_in * (1.0 - std::exp(-g * t)) / g;
}

double linear_cavity_drive_for(double n_mean, double t, double delta, double kappa_ext,
                               double kappa_tot) {
  const double per_unit = std::abs(linear_cavity_alpha(t, 1.0, delta, kappa_ext, kappa_tot));
  return std::sqrt(n_mean) / per_unit;
}

double pure_decay(double t, double x0, double gamma) { return x0 * std::exp(-gamma * t); }

Eigen::MatrixXcd lindblad_exact(const Eigen::MatrixXcd& rho0, const Eigen::MatrixXcd& h,
                                const std::vector<std::pair<double, Eigen::MatrixXcd>>& ops, double t) {
  using M = Eigen::MatrixXcd;
  const auto d = h.rows();
  const M id = M::Identity(d, d);
  // vec(A X B) = (B^T kron A) vec(X)
  auto kron = [](const M& a, const M& b) {
    M out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  const std::complex<double> i(0.0, 1.0);
  M liou = -i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& [rate, l] : ops) {
    const M ldl = l.adjoint() * l;
    liou += rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
  }
  const M prop = (liou * t).exp();
  const Eigen::VectorXcd v = prop * Eigen::Map<const Eigen::VectorXcd>(rho0.data(), d * d);
  return Eigen::Map<const M>(v.data(), d, d);
}

double best_threshold_accuracy(const std::vector<double>& x, const std::vector<int>& labels) {
  std::vector<double> v(x);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<double> cuts{v.front() - 1.0, v.back() + 1.0};
  for (std::size_t k = 0; k + 1 < v.size(); ++k) cuts.push_back(0.5 * (v[k] + v[k + 1]));
  double best = 0.0;
  for (double c : cuts) {
    int agree = 0;
    for (std::size_t k = 0; k < x.size(); ++k) agree += (x[k] >= c) == (labels[k] == 1);
    const double n = static_cast<double>(x.size());
    best = std::max({best, agree / n, 1.0 - agree / n});
  }
  return best;
}

Eigen::MatrixXd ridge_normal(const Eigen::MatrixXd& f, const Eigen::MatrixXd& y, double beta) {
  const Eigen::MatrixXd a = f.transpose() * f + beta * Eigen::MatrixXd::Identity(f.cols(), f.cols());
  return a.fullPivLu().solve(f.transpose() * y);
}

}  // namespace qrc::oracle
