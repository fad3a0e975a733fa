#include "holobus/dynamics.hpp"

#include "holobus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace holobus {

namespace {

using cd = std::complex<double>;

constexpr double kHermitianTol = 1e-12;
constexpr double kNormTol = 1e-10;

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Sector {
  std::vector<Eigen::Index> indices;
  std::vector<Matrix> parts;
  bool real = true;
};

// The schedule-independent pieces of H(t), split into decoupled sectors.
class SectoredHamiltonian {
 public:
  SectoredHamiltonian(const ScheduledHamiltonian& h, std::size_t site_cap) {
    std::vector<Matrix> dense;
    for (const auto& part : h.parts()) {
      dense.push_back(build_dense(part.op, site_cap));
      coefficients_.push_back(part.coefficient);
    }
    dim_ = static_cast<Eigen::Index>(h.system().dimension());
    for (const auto& members : coupled_sectors(dense)) {
      Sector sector;
      sector.indices.assign(members.begin(), members.end());
      const auto n = static_cast<Eigen::Index>(members.size());
      for (const auto& full : dense) {
        Matrix sub(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
          for (Eigen::Index c = 0; c < n; ++c) sub(r, c) = full(sector.indices[r], sector.indices[c]);
        }
        if (sub.imag().cwiseAbs().maxCoeff() != 0.0) sector.real = false;
        sector.parts.push_back(std::move(sub));
      }
      sectors_.push_back(std::move(sector));
    }
  }

  const std::vector<Sector>& sectors() const { return sectors_; }

  Matrix assemble(const Sector& sector, double ramp) const {
    const auto n = static_cast<Eigen::Index>(sector.indices.size());
    Matrix h = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < sector.parts.size(); ++k) {
      h += coefficient_value(coefficients_[k], ramp) * sector.parts[k];
    }
    return h;
  }

  Eigen::VectorXd spectrum(double ramp) const {
    Eigen::VectorXd all(dim_);
    Eigen::Index at = 0;
    for (const auto& sector : sectors_) {
      const Matrix h = assemble(sector, ramp);
      Eigen::VectorXd w;
      if (sector.real) {
        w = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.real(), Eigen::EigenvaluesOnly)
                .eigenvalues();
      } else {
        w = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
      }
      all.segment(at, w.size()) = w;
      at += w.size();
    }
    std::sort(all.data(), all.data() + all.size());
    return all;
  }

  // psi <- exp(-i H(ramp) tau) psi, sector by sector.
  void propagate(Amplitudes& psi, double ramp, double tau) const {
    for (const auto& sector : sectors_) {
      const auto n = static_cast<Eigen::Index>(sector.indices.size());
      Amplitudes local(n);
      for (Eigen::Index r = 0; r < n; ++r) local(r) = psi(sector.indices[r]);
      if (local.cwiseAbs2().sum() == 0.0) continue;

      const Matrix h = assemble(sector, ramp);
      if (sector.real) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
        const Eigen::MatrixXd& v = es.eigenvectors();
        Amplitudes c = v.transpose().cast<cd>() * local;
        for (Eigen::Index k = 0; k < n; ++k) c(k) *= std::polar(1.0, -es.eigenvalues()(k) * tau);
        local = v.cast<cd>() * c;
      } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const Matrix& v = es.eigenvectors();
        Amplitudes c = v.adjoint() * local;
        for (Eigen::Index k = 0; k < n; ++k) c(k) *= std::polar(1.0, -es.eigenvalues()(k) * tau);
        local = v * c;
      }
      for (Eigen::Index r = 0; r < n; ++r) psi(sector.indices[r]) = local(r);
    }
  }

 private:
  Eigen::Index dim_ = 0;
  std::vector<Coefficient> coefficients_;
  std::vector<Sector> sectors_;
};

}  // namespace

Schedule::Schedule(double t_fin, ScheduleKind kind) : t_fin_(t_fin), kind_(kind) {
  if (!(t_fin > 0.0) || !std::isfinite(t_fin)) {
    throw ValidationError("t_fin must be a positive finite time");
  }
}

double Schedule::ramp_up(double t) const {
  switch (kind_) {
    case ScheduleKind::linear: return std::clamp(t / t_fin_, 0.0, 1.0);
  }
  return 0.0;
}

double coefficient_value(Coefficient c, double ramp) {
  switch (c) {
    case Coefficient::constant: return 1.0;
    case Coefficient::ramp_up: return ramp;
    case Coefficient::ramp_down: return 1.0 - ramp;
  }
  return 0.0;
}

ScheduledHamiltonian::ScheduledHamiltonian(SpinSystem system, Schedule schedule)
    : system_(std::move(system)), schedule_(schedule) {}

ScheduledHamiltonian& ScheduledHamiltonian::add(Coefficient coefficient, OperatorSum op) {
  if (!(op.system() == system_)) throw ValidationError("scheduled part is on a different system");
  parts_.push_back({coefficient, std::move(op)});
  return *this;
}

OperatorSum ScheduledHamiltonian::at_fraction(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("schedule fraction must lie in [0, 1]");
  const double ramp = schedule_.ramp_up(s * schedule_.t_fin());
  OperatorSum op(system_);
  for (const auto& part : parts_) {
    const double c = coefficient_value(part.coefficient, ramp);
    if (c != 0.0) op += part.op.scaled(c);
  }
  return op;
}

void EvolutionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (gap_samples < 2) throw ValidationError("gap_samples must be at least 2");
  if (min_steps < 1) throw ValidationError("min_steps must be at least 1");
  if (!(degeneracy_tol > 0.0)) throw ValidationError("degeneracy_tol must be positive");
  if (!(convergence_tol > 0.0)) throw ValidationError("convergence_tol must be positive");
}

std::size_t EvolutionConfig::steps_for(double t_fin) const {
  const double by_dt = std::ceil(t_fin / dt - 1e-9);
  return std::max(min_steps, static_cast<std::size_t>(std::max(1.0, by_dt)));
}

double GroundManifold::gap() const {
  return degeneracy < static_cast<std::size_t>(energies.size())
             ? energies(static_cast<Eigen::Index>(degeneracy)) - energies(0)
             : 0.0;
}

std::size_t ground_degeneracy(const Eigen::VectorXd& w, double tol) {
  if (w.size() == 0) return 0;
  const double width = w(w.size() - 1) - w(0);
  std::size_t d = 1;
  while (d < static_cast<std::size_t>(w.size()) &&
         w(static_cast<Eigen::Index>(d)) - w(0) <= tol * width) {
    ++d;
  }
  return d;
}

GroundManifold ground_manifold(const Matrix& h, double tol) {
  if (h.rows() != h.cols() || h.rows() == 0) throw ValidationError("Hamiltonian must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
    throw ValidationError("Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  GroundManifold gm;
  gm.energies = es.eigenvalues();
  gm.degeneracy = ground_degeneracy(gm.energies, tol);
  gm.basis = es.eigenvectors().leftCols(static_cast<Eigen::Index>(gm.degeneracy));
  return gm;
}

std::vector<std::vector<std::size_t>> coupled_sectors(const std::vector<Matrix>& parts) {
  if (parts.empty()) return {};
  const auto dim = static_cast<std::size_t>(parts.front().rows());
  DisjointSets sets(dim);
  for (const auto& m : parts) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = c + 1; r < m.rows(); ++r) {
        if (m(r, c) != cd(0.0) || m(c, r) != cd(0.0)) {
          sets.unite(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
      }
    }
  }
  std::vector<std::vector<std::size_t>> sectors;
  std::vector<long> slot(dim, -1);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(sectors.size());
      sectors.emplace_back();
    }
    sectors[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return sectors;
}

StateVector evolve(const ScheduledHamiltonian& hamiltonian, const StateVector& initial,
                   const EvolutionConfig& config) {
  config.validate();
  if (initial.n_sites() != hamiltonian.system().n_sites()) {
    throw ValidationError("initial state does not match the Hamiltonian's system");
  }
  if (std::abs(initial.norm() - 1.0) > kNormTol) {
    throw ValidationError("initial state must be normalized");
  }
  const SectoredHamiltonian sectored(hamiltonian, config.site_cap);
  const Schedule& schedule = hamiltonian.schedule();
  const double t_fin = schedule.t_fin();
  const std::size_t steps = config.steps_for(t_fin);
  const double tau = t_fin / static_cast<double>(steps);

  Amplitudes psi = initial.amplitudes();
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * tau;
    sectored.propagate(psi, schedule.ramp_up(t_mid), tau);
    const double drift = std::abs(psi.norm() - 1.0);
    if (drift > kNormTol) {
      throw AccuracyError("norm drifted by " + std::to_string(drift) + " at step " +
                              std::to_string(k),
                          drift);
    }
  }
  return StateVector(initial.n_sites(), std::move(psi));
}

HalvingCheck evolve_with_halving(const ScheduledHamiltonian& hamiltonian,
                                 const StateVector& initial, const EvolutionConfig& config) {
  EvolutionConfig fine_config = config;
  fine_config.dt = config.dt / 2.0;
  fine_config.min_steps = 2 * config.min_steps;
  StateVector coarse = evolve(hamiltonian, initial, config);
  StateVector fine = evolve(hamiltonian, initial, fine_config);
  const double deviation = std::max(0.0, 1.0 - std::norm(coarse.inner(fine)));
  if (deviation > config.convergence_tol) {
    throw AccuracyError("halving dt changed the final state by " + std::to_string(deviation) +
                            " (tolerance " + std::to_string(config.convergence_tol) + ")",
                        deviation);
  }
  return {std::move(coarse), std::move(fine), deviation};
}

double GapTrace::min_gap() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::min(m, s.gap);
  return m;
}

bool GapTrace::has_degeneracy_jumps() const {
  return std::any_of(samples.begin(), samples.end(),
                     [](const GapSample& s) { return s.degeneracy_changed; });
}

GapTrace gap_trace(const ScheduledHamiltonian& hamiltonian, const EvolutionConfig& config) {
  config.validate();
  const SectoredHamiltonian sectored(hamiltonian, config.site_cap);
  const Schedule& schedule = hamiltonian.schedule();
  GapTrace trace;
  for (std::size_t k = 0; k < config.gap_samples; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(config.gap_samples - 1);
    const Eigen::VectorXd w = sectored.spectrum(schedule.ramp_up(s * schedule.t_fin()));
    const std::size_t d = ground_degeneracy(w, config.degeneracy_tol);
    const double gap = d < static_cast<std::size_t>(w.size())
                           ? w(static_cast<Eigen::Index>(d)) - w(0)
                           : 0.0;
    const bool changed = !trace.samples.empty() && trace.samples.back().degeneracy != d;
    trace.samples.push_back({s, w(0), d, gap, changed});
  }
  return trace;
}

}  // namespace holobus
