#pragma once

#include "holobus/dynamics.hpp"
#include "holobus/frames.hpp"
#include "holobus/spin_algebra.hpp"
#include "holobus/state.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace holobus {

using DensityMatrix = Eigen::MatrixXcd;

/// Reduced density matrix on `keep`; the first listed site is the most
/// significant index of the result. Throws ValidationError on an empty,
/// repeated or out-of-range site list.
DensityMatrix partial_trace(const StateVector& psi, const std::vector<std::size_t>& keep);

/// <expected| rho |expected>, clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const Eigen::VectorXcd& expected);

struct BusConfig {
  std::size_t n_sites = 3;  // odd, >= 3
  Qubit input = Qubit::spin_up();
  double t_fin = 10.0;
  EvolutionConfig evolution{};

  void validate() const;
};

struct GateConfig {
  BusConfig bus{};
  Frame twist{};
  /// Number of leading untwisted sites; the frame is applied to the rest
  /// (1 <= twist_start <= n_sites - 1).
  std::size_t twist_start = 1;

  void validate() const;
};

struct CnotConfig {
  Qubit target = Qubit::spin_up();
  Qubit control = Qubit::spin_up();
  double h = 10.0;
  double t_fin = 10.0;
  EvolutionConfig evolution{};

  void validate() const;
};

enum class ProtocolKind { bus, gate, cnot };

struct ProtocolResult {
  ProtocolKind kind;
  StateVector final_state;
  std::vector<std::size_t> output_sites;
  DensityMatrix reduced;        // on output_sites
  Eigen::VectorXcd expected;    // ideal pure output on output_sites
  double fidelity = 0.0;
  double output_polarization = 0.0;  // <sigma^z> of the output spin
  GapTrace gaps;
  std::optional<double> fidelity_dt_delta;  // set when convergence is checked
  double wall_seconds = 0.0;
  std::variant<BusConfig, GateConfig, CnotConfig> config;
};

/// Bus Hamiltonian A(t) s0.s1 + sum s_i.s_{i+1} + B(t) s_{N-2}.s_{N-1} with a
/// frame per site.
ScheduledHamiltonian bus_hamiltonian(std::size_t n_sites, const std::vector<Frame>& frames,
                                     double t_fin);

/// Input qubit on site 0 times the unique ground state of sites 1..N-1.
/// Throws SetupError if that chain ground state is degenerate.
StateVector bus_initial_state(std::size_t n_sites, const std::vector<Frame>& frames,
                              const Qubit& input, double degeneracy_tol);

ProtocolResult run_bus(const BusConfig& config);
ProtocolResult run_gate(const GateConfig& config);

/// lambda(t) * input + fixed + (1 - lambda(t)) * output.
ScheduledHamiltonian cnot_schedule(double h, double t_fin);

/// Unique lambda = 0 cluster ground state with the control fixed to
/// `control_up` and the input spin up. Throws SetupError on degeneracy.
StateVector cnot_branch_ground_state(double h, bool control_up, double degeneracy_tol);

StateVector cnot_initial_state(const CnotConfig& config);

/// Two-qubit gate on (target, control): the target is flipped when the
/// control is up and left alone when it is down.
Eigen::Matrix4cd cnot_matrix();

ProtocolResult run_cnot(const CnotConfig& config);

struct SweepGrid {
  std::vector<double> t_fin;
  std::vector<double> h{0.0};
};

struct SweepRow {
  double t_fin = 0.0;
  double h = 0.0;
  double fidelity = 0.0;
  double infidelity = 0.0;
  double min_gap = 0.0;
  double polarization = 0.0;
  std::string error;  // empty on success
  bool accuracy_failure = false;  // error came from the step-halving check
};

using PointRunner = std::function<ProtocolResult(double t_fin, double h)>;

/// One row per (t_fin, h) with t_fin as the outer loop. Points run on up to
/// `workers` threads; failures land in the row's error field.
std::vector<SweepRow> sweep(const PointRunner& run_point, const SweepGrid& grid,
                            std::size_t workers = 1);

std::vector<SweepRow> sweep_bus(const BusConfig& base, const std::vector<double>& t_fin,
                                std::size_t workers = 1);
std::vector<SweepRow> sweep_cnot(const CnotConfig& base, const SweepGrid& grid,
                                 std::size_t workers = 1);

}  // namespace holobus
