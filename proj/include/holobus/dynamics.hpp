#pragma once

#include "holobus/spin_algebra.hpp"
#include "holobus/state.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace holobus {

enum class ScheduleKind { linear };

/// Clamped linear annealing: A(t) = lambda(t) = clamp(t / t_fin, 0, 1),
/// B(t) = 1 - A(t).
class Schedule {
 public:
  /// Throws ValidationError unless t_fin > 0.
  explicit Schedule(double t_fin, ScheduleKind kind = ScheduleKind::linear);

  double t_fin() const { return t_fin_; }
  ScheduleKind kind() const { return kind_; }

  double ramp_up(double t) const;  // A, lambda
  double ramp_down(double t) const { return 1.0 - ramp_up(t); }  // B, 1 - lambda

 private:
  double t_fin_;
  ScheduleKind kind_;
};

enum class Coefficient { constant, ramp_up, ramp_down };

double coefficient_value(Coefficient c, double ramp);

struct ScheduledPart {
  Coefficient coefficient;
  OperatorSum op;
};

/// H(t) = sum_k c_k(A(t)) * op_k.
class ScheduledHamiltonian {
 public:
  ScheduledHamiltonian(SpinSystem system, Schedule schedule);

  ScheduledHamiltonian& add(Coefficient coefficient, OperatorSum op);

  const SpinSystem& system() const { return system_; }
  const Schedule& schedule() const { return schedule_; }
  const std::vector<ScheduledPart>& parts() const { return parts_; }

  /// Hamiltonian at schedule fraction s = t / t_fin in [0, 1].
  OperatorSum at_fraction(double s) const;

 private:
  SpinSystem system_;
  Schedule schedule_;
  std::vector<ScheduledPart> parts_;
};

struct EvolutionConfig {
  double dt = 0.01;
  /// Lower bound on the step count, so short ramps are resolved as finely
  /// as long ones: the step used is min(dt, t_fin / min_steps).
  std::size_t min_steps = 500;
  std::size_t gap_samples = 21;
  double degeneracy_tol = 1e-8;  // relative to the spectral width
  bool check_convergence = false;
  double convergence_tol = 1e-6;
  std::size_t site_cap = kDefaultSiteCap;

  /// Throws ValidationError on a nonpositive dt or fewer than two gap samples.
  void validate() const;

  std::size_t steps_for(double t_fin) const;
};

struct GroundManifold {
  Eigen::VectorXd energies;  // ascending, full spectrum
  Matrix basis;              // orthonormal columns spanning the ground eigenspace
  std::size_t degeneracy = 0;

  double ground_energy() const { return energies(0); }
  /// E_d - E_0, or 0 when the whole spectrum is degenerate.
  double gap() const;
};

/// Throws ValidationError if `h` is not Hermitian to 1e-12 (relative).
GroundManifold ground_manifold(const Matrix& h, double tol = 1e-8);

/// Number of eigenvalues within tol * (spectral width) of the lowest.
std::size_t ground_degeneracy(const Eigen::VectorXd& ascending, double tol);

/// Partition of the basis into sets never coupled by any of `parts`.
std::vector<std::vector<std::size_t>> coupled_sectors(const std::vector<Matrix>& parts);

/// Exponential-midpoint propagation over [0, t_fin]: each step applies
/// exp(-i H(t_mid) dt) through an exact eigendecomposition of every
/// decoupled sector. Throws AccuracyError if the norm drifts by >1e-10.
StateVector evolve(const ScheduledHamiltonian& hamiltonian, const StateVector& initial,
                   const EvolutionConfig& config);

struct HalvingCheck {
  StateVector coarse;  // at config.dt
  StateVector fine;    // at config.dt / 2
  double overlap_deviation;  // 1 - |<coarse|fine>|^2
};

/// Runs `evolve` at dt and dt/2. Throws AccuracyError (carrying the measured
/// deviation) when it exceeds config.convergence_tol.
HalvingCheck evolve_with_halving(const ScheduledHamiltonian& hamiltonian,
                                 const StateVector& initial, const EvolutionConfig& config);

struct GapSample {
  double s;
  double ground_energy;
  std::size_t degeneracy;
  double gap;
  bool degeneracy_changed;  // differs from the previous sample
};

struct GapTrace {
  std::vector<GapSample> samples;

  double min_gap() const;
  bool has_degeneracy_jumps() const;
};

/// Gap above the degenerate ground manifold at config.gap_samples equally
/// spaced schedule fractions.
GapTrace gap_trace(const ScheduledHamiltonian& hamiltonian, const EvolutionConfig& config);

}  // namespace holobus
