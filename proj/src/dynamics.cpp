#include "qrc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qrc {

DensityMatrix DensityMatrix::vacuum(const PhysicalConfig& cfg) {
  DensityMatrix rho{ComplexMatrix::Zero(cfg.dim(), cfg.dim())};
  rho.data(0, 0) = 1.0;
  return rho;
}

DensityMatrix DensityMatrix::from_ket(const Eigen::VectorXcd& ket) {
  return DensityMatrix{ket * ket.adjoint()};
}

DensityMatrix DensityMatrix::fock(int n, int n_fock) {
  if (n < 0 || n >= n_fock) throw InvalidArgument("DensityMatrix::fock: level out of range");
  DensityMatrix rho{ComplexMatrix::Zero(n_fock, n_fock)};
  rho.data(n, n) = 1.0;
  return rho;
}

InvariantReport check_invariants(const DensityMatrix& rho) {
  InvariantReport r;
  r.trace_error = std::abs(rho.trace() - Complex{1.0, 0.0});
  r.hermiticity_error = (rho.data - rho.data.adjoint()).cwiseAbs().maxCoeff();
  const ComplexMatrix herm = (rho.data + rho.data.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

void PulseSchedule::validate() const {
  if (segments.empty()) throw InvalidArgument("PulseSchedule: no segments");
  for (const auto& s : segments) {
    if (!(s.duration > 0) || !std::isfinite(s.duration))
      throw InvalidArgument("PulseSchedule: segment durations must be > 0");
    if (!std::isfinite(s.amplitude.real()) || !std::isfinite(s.amplitude.imag()))
      throw InvalidArgument("PulseSchedule: amplitudes must be finite");
  }
  const double total = total_duration();
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const double t = sample_times[i];
    if (!(t >= 0.0) || t > total * (1 + 1e-12))
      throw InvalidArgument("PulseSchedule: sample time outside [0, total duration]");
    if (i > 0 && t < sample_times[i - 1])
      throw InvalidArgument("PulseSchedule: sample times must be sorted");
  }
}

TruncationOverflow::TruncationOverflow(double tail, int n_fock)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "truncation overflow: population " << tail << " in the top two of " << n_fock
           << " Fock levels exceeds " << kTruncationTolerance << "; increase physical.n_fock";
        return os.str();
      }()),
      tail_(tail),
      n_fock_(n_fock) {}

ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& h,
                           const std::vector<CollapseOperator>& ops) {
  if (rho.rows() != rho.cols() || h.rows() != rho.rows() || h.cols() != rho.cols())
    throw InvalidArgument("lindblad_rhs: dimension mismatch between rho and H");
  const Complex i{0.0, 1.0};
  ComplexMatrix out = -i * (h * rho - rho * h);
  for (const auto& c : ops) {
    if (c.op.rows() != rho.rows() || c.op.cols() != rho.cols())
      throw InvalidArgument("lindblad_rhs: dimension mismatch for operator " + c.name);
    if (c.rate == 0.0) continue;
    const ComplexMatrix ldl = c.op.adjoint() * c.op;
    out += c.rate * (c.op * rho * c.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using SparseRow = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

SparseRow to_sparse(const ComplexMatrix& m) {
  SparseRow s = m.sparseView(Complex{0.0, 0.0}, 0.0);
  s.makeCompressed();
  return s;
}

}  // namespace

LindbladGenerator::LindbladGenerator(const PhysicalConfig& cfg) : cfg_(cfg), dim_(cfg.dim()) {
  cfg.validate();
  const RealVector energies = drift_diagonal(cfg);
  const auto ops = lindblad_ops(cfg);

  ComplexMatrix loss = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& c : ops) {
    if (c.rate == 0.0) continue;
    loss += c.rate * (c.op.adjoint() * c.op);
    jumps_.emplace_back(c.rate, to_sparse(c.op));
  }
  // H_eff = H0 - i/2 * loss; its diagonal becomes the exact part.
  Eigen::VectorXcd d(dim_);
  for (int m = 0; m < dim_; ++m) d(m) = Complex{energies(m), -0.5 * loss(m, m).real()};
  lambda_.resize(dim_, dim_);
  const Complex i{0.0, 1.0};
  for (int n = 0; n < dim_; ++n)
    for (int m = 0; m < dim_; ++m) lambda_(m, n) = -i * (d(m) - std::conj(d(n)));

  ComplexMatrix offdiag = -0.5 * i * loss;
  offdiag.diagonal().setZero();
  static_offdiag_ = to_sparse(offdiag);

  const ComplexMatrix a = lift_cavity(annihilation(cfg.n_fock), cfg);
  ladder_ = to_sparse(a);
  ladder_dag_ = to_sparse(a.adjoint());
  coupling_ = static_offdiag_;
  scratch_a_.resize(dim_, dim_);
  scratch_b_.resize(dim_, dim_);
}

void LindbladGenerator::set_drive(Complex amplitude) {
  if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
    throw InvalidArgument("LindbladGenerator: drive amplitude must be finite");
  drive_ = amplitude;
  const Complex c = std::sqrt(cfg_.kappa_ext) * amplitude;
  coupling_ = static_offdiag_ + c * ladder_dag_ + std::conj(c) * ladder_;
  coupling_.prune(Complex{0.0, 0.0});
  coupling_.makeCompressed();
}

void LindbladGenerator::apply_remainder(const ComplexMatrix& rho, ComplexMatrix& out) const {
  const Complex i{0.0, 1.0};
  // -i (K rho - rho K^+) with rho Hermitian: X - X^+ where X = -i K rho.
  scratch_a_.noalias() = coupling_ * rho;
  scratch_a_ *= -i;
  out = scratch_a_ + scratch_a_.adjoint();
  for (const auto& [rate, op] : jumps_) {
    scratch_a_.noalias() = op * rho;
    scratch_b_ = scratch_a_.adjoint();
    scratch_a_.noalias() = op * scratch_b_;
    out += rate * scratch_a_;
  }
}

ComplexMatrix LindbladGenerator::apply(const ComplexMatrix& rho) const {
  ComplexMatrix out(dim_, dim_);
  apply_remainder(rho, out);
  out += lambda_.cwiseProduct(rho);
  return out;
}

// ---------------------------------------------------------------------------

double truncation_tail(const DensityMatrix& rho, const PhysicalConfig& cfg) {
  const int q = cfg.include_qubit ? 2 : 1;
  double tail = 0.0;
  for (int n = std::max(0, cfg.n_fock - 2); n < cfg.n_fock; ++n)
    for (int s = 0; s < q; ++s) tail += rho.data(n * q + s, n * q + s).real();
  return tail;
}

namespace {

/// Boundaries of the integration grid: every segment edge and sample time.
struct Interval {
  double start;
  double end;
  std::size_t segment;
};

struct Grid {
  std::vector<Interval> intervals;
  // samples_after[k]: sample indices recorded at the end of interval k.
  std::vector<std::vector<std::size_t>> samples_after;
  std::vector<std::size_t> samples_at_start;
};

Grid build_grid(const PulseSchedule& schedule) {
  constexpr double kMergeTol = 1e-12;
  std::vector<double> seg_ends;
  double t = 0.0;
  for (const auto& s : schedule.segments) seg_ends.push_back(t += s.duration);

  std::vector<double> cuts = seg_ends;
  for (double ts : schedule.sample_times)
    if (ts > kMergeTol) cuts.push_back(std::min(ts, seg_ends.back()));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> bounds;
  for (double c : cuts)
    if (bounds.empty() || c - bounds.back() > kMergeTol) bounds.push_back(c);

  Grid g;
  double start = 0.0;
  std::size_t seg = 0;
  for (double end : bounds) {
    while (seg + 1 < seg_ends.size() && seg_ends[seg] < start + kMergeTol + (end - start) / 2) ++seg;
    g.intervals.push_back({start, end, seg});
    start = end;
  }
  g.samples_after.resize(g.intervals.size());
  for (std::size_t i = 0; i < schedule.sample_times.size(); ++i) {
    const double ts = schedule.sample_times[i];
    if (ts <= kMergeTol) {
      g.samples_at_start.push_back(i);
      continue;
    }
    auto it = std::lower_bound(bounds.begin(), bounds.end(), ts - kMergeTol);
    if (it == bounds.end()) --it;
    g.samples_after[static_cast<std::size_t>(it - bounds.begin())].push_back(i);
  }
  return g;
}

int step_count(double span, double dt) {
  return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

/// Exact propagation factors of the diagonal part, cached per step size.
class DiagonalPropagators {
 public:
  explicit DiagonalPropagators(const ComplexMatrix& lambda) : lambda_(lambda) {}

  struct Factors {
    ComplexMatrix full;
    ComplexMatrix half;
  };

  const Factors& get(double h) {
    auto it = cache_.find(h);
    if (it != cache_.end()) return it->second;
    Factors f{(lambda_ * h).array().exp().matrix(), (lambda_ * (h / 2)).array().exp().matrix()};
    return cache_.emplace(h, std::move(f)).first->second;
  }

 private:
  const ComplexMatrix& lambda_;
  std::map<double, Factors> cache_;
};

template <typename Stepper>
std::vector<DensityMatrix> integrate(const DensityMatrix& rho0, const PhysicalConfig& cfg,
                                     const PulseSchedule& schedule, double dt,
                                     Stepper&& stepper) {
  cfg.validate();
  schedule.validate();
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidArgument("evolve: dt must be > 0");
  if (rho0.dim() != cfg.dim())
    throw InvalidArgument("evolve: initial state dimension does not match configuration");

  const Grid grid = build_grid(schedule);
  std::vector<DensityMatrix> snapshots(schedule.sample_times.size());
  ComplexMatrix rho = rho0.data;
  for (auto idx : grid.samples_at_start) snapshots[idx] = DensityMatrix{rho};

  for (std::size_t k = 0; k < grid.intervals.size(); ++k) {
    const auto& iv = grid.intervals[k];
    const double span = iv.end - iv.start;
    stepper.set_segment(schedule.segments[iv.segment].amplitude);
    const int n = step_count(span, std::min(dt, stepper.max_step()));
    const double h = span / n;
    for (int s = 0; s < n; ++s) stepper.step(rho, h);
    const double tail = truncation_tail(DensityMatrix{rho}, cfg);
    if (tail > kTruncationTolerance) throw TruncationOverflow(tail, cfg.n_fock);
    for (auto idx : grid.samples_after[k]) snapshots[idx] = DensityMatrix{rho};
  }
  return snapshots;
}

/// Integrating-factor RK4: diagonal generator part exact, remainder by RK4.
// Chosen so that every snapshot of the Kerr maps (up to 12 sqrt(MHz) at K = 0)
// keeps |tr - 1| < 1e-6 and eigenvalues above -1e-7.
constexpr double kMaxRemainderPhase = 0.15;

class LawsonStepper {
 public:
  explicit LawsonStepper(const PhysicalConfig& cfg)
      : gen_(cfg), props_(gen_.diagonal_rates()) {
    const int d = gen_.dim();
    for (auto* m : {&k1_, &k2_, &k3_, &k4_, &u_, &stage_}) m->resize(d, d);
  }

  void set_segment(Complex amp) {
    if (amp != gen_.drive()) gen_.set_drive(amp);
  }

  /// Largest step keeping h times a norm bound of the RK4 part (drive
  /// commutator plus jump terms) under kMaxRemainderPhase. Strong drives and
  /// large truncations get shorter steps; the step stays fixed per interval.
  double max_step() const {
    const auto& c = gen_.config();
    const double top = c.n_fock - 1;
    const double nu = 2.0 * std::sqrt(c.kappa_ext) * std::abs(gen_.drive()) * std::sqrt(top) + c.kappa_total() * top;
    return nu > 0 ? kMaxRemainderPhase / nu : INFINITY;
  }

  void step(ComplexMatrix& rho, double h) {
    const auto& f = props_.get(h);
    gen_.apply_remainder(rho, k1_);
    stage_ = f.half.cwiseProduct(rho + (h / 2) * k1_);
    gen_.apply_remainder(stage_, k2_);
    u_ = f.half.cwiseProduct(rho);
    stage_ = u_ + (h / 2) * k2_;
    gen_.apply_remainder(stage_, k3_);
    stage_ = f.full.cwiseProduct(rho) + h * f.half.cwiseProduct(k3_);
    gen_.apply_remainder(stage_, k4_);
    rho = f.full.cwiseProduct(rho + (h / 6) * k1_) + (h / 3) * f.half.cwiseProduct(k2_ + k3_) +
          (h / 6) * k4_;
  }

 private:
  LindbladGenerator gen_;
  DiagonalPropagators props_;
  ComplexMatrix k1_, k2_, k3_, k4_, u_, stage_;
};

class ReferenceStepper {
 public:
  explicit ReferenceStepper(const PhysicalConfig& cfg) : cfg_(cfg), ops_(lindblad_ops(cfg)) {}

  void set_segment(Complex amp) { h_ = build_hamiltonian(cfg_, amp); }
  double max_step() const { return INFINITY; }

  void step(ComplexMatrix& rho, double h) {
    const ComplexMatrix k1 = lindblad_rhs(rho, h_, ops_);
    const ComplexMatrix k2 = lindblad_rhs(rho + (h / 2) * k1, h_, ops_);
    const ComplexMatrix k3 = lindblad_rhs(rho + (h / 2) * k2, h_, ops_);
    const ComplexMatrix k4 = lindblad_rhs(rho + h * k3, h_, ops_);
    rho += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

 private:
  PhysicalConfig cfg_;
  std::vector<CollapseOperator> ops_;
  ComplexMatrix h_;
};

}  // namespace

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const PhysicalConfig& cfg,
                                  const PulseSchedule& schedule, double dt) {
  LawsonStepper stepper(cfg);
  return integrate(rho0, cfg, schedule, dt, stepper);
}

std::vector<DensityMatrix> evolve_reference(const DensityMatrix& rho0,
                                            const PhysicalConfig& cfg,
                                            const PulseSchedule& schedule, double dt) {
  ReferenceStepper stepper(cfg);
  return integrate(rho0, cfg, schedule, dt, stepper);
}

std::vector<std::vector<DensityMatrix>> evolve_batch(const DensityMatrix& rho0,
                                                     const PhysicalConfig& cfg,
                                                     const std::vector<PulseSchedule>& schedules,
                                                     double dt) {
  const auto n = static_cast<std::ptrdiff_t>(schedules.size());
  std::vector<std::vector<DensityMatrix>> out(schedules.size());
  std::vector<std::exception_ptr> errors(schedules.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = evolve(rho0, cfg, schedules[i], dt);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<std::vector<DensityMatrix>> evolve_batch_serial(
    const DensityMatrix& rho0, const PhysicalConfig& cfg,
    const std::vector<PulseSchedule>& schedules, double dt) {
  std::vector<std::vector<DensityMatrix>> out;
  out.reserve(schedules.size());
  for (const auto& s : schedules) out.push_back(evolve(rho0, cfg, s, dt));
  return out;
}

// ---------------------------------------------------------------------------

DensityMatrix partial_trace_qubit(const DensityMatrix& rho) {
  const auto d = rho.dim();
  if (d % 2 != 0 || rho.data.cols() != d)
    throw InvalidArgument("partial_trace_qubit: dimension must be even (cavity x qubit)");
  const auto n = d / 2;
  DensityMatrix out{ComplexMatrix::Zero(n, n)};
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      out.data(r, c) = rho.data(2 * r, 2 * c) + rho.data(2 * r + 1, 2 * c + 1);
  return out;
}

DensityMatrix cavity_state(const DensityMatrix& rho, const PhysicalConfig& cfg) {
  return cfg.include_qubit ? partial_trace_qubit(rho) : rho;
}

double mean_photon(const DensityMatrix& rho, const PhysicalConfig& cfg) {
  const DensityMatrix cav = cavity_state(rho, cfg);
  double n = 0.0;
  for (Eigen::Index k = 0; k < cav.dim(); ++k) n += static_cast<double>(k) * cav.data(k, k).real();
  return std::max(0.0, n);
}

}  // namespace qrc
