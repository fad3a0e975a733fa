#include "holobus/protocols.hpp"

#include "holobus/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

namespace holobus {

namespace {

using cd = std::complex<double>;
using Clock = std::chrono::steady_clock;

// Fix the arbitrary eigenvector phase: largest amplitude real and positive.
void fix_gauge(Amplitudes& v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  v *= std::conj(v(at)) / std::abs(v(at));
}

std::vector<Frame> twisted_frames(std::size_t n_sites, const Frame& twist, std::size_t start) {
  std::vector<Frame> frames(n_sites);
  for (std::size_t i = start; i < n_sites; ++i) frames[i] = twist;
  return frames;
}

double polarization(const DensityMatrix& rho_single) {
  return (rho_single(0, 0) - rho_single(1, 1)).real();
}

struct Evolved {
  StateVector state;
  std::optional<StateVector> refined;
};

Evolved run_evolution(const ScheduledHamiltonian& h, const StateVector& initial,
                      const EvolutionConfig& config) {
  if (!config.check_convergence) return {evolve(h, initial, config), std::nullopt};
  HalvingCheck check = evolve_with_halving(h, initial, config);
  return {std::move(check.coarse), std::move(check.fine)};
}

// Shared tail of every protocol: reduced state, fidelity, convergence delta.
void finish(ProtocolResult& r, const Evolved& evolved, const EvolutionConfig& config) {
  r.reduced = partial_trace(evolved.state, r.output_sites);
  r.fidelity = fidelity(r.reduced, r.expected);
  r.output_polarization = polarization(partial_trace(evolved.state, {r.output_sites.front()}));
  if (evolved.refined) {
    const double refined = fidelity(partial_trace(*evolved.refined, r.output_sites), r.expected);
    r.fidelity_dt_delta = std::abs(refined - r.fidelity);
    if (*r.fidelity_dt_delta > config.convergence_tol) {
      throw AccuracyError("halving dt changed the fidelity by " +
                              std::to_string(*r.fidelity_dt_delta),
                          *r.fidelity_dt_delta);
    }
  }
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ProtocolResult run_chain(const BusConfig& bus, const std::vector<Frame>& frames,
                         const SingleQubitGate& gate) {
  const auto start = Clock::now();
  const auto h = bus_hamiltonian(bus.n_sites, frames, bus.t_fin);
  const StateVector initial =
      bus_initial_state(bus.n_sites, frames, bus.input, bus.evolution.degeneracy_tol);
  const Evolved evolved = run_evolution(h, initial, bus.evolution);

  ProtocolResult r{ProtocolKind::bus, evolved.state, {bus.n_sites - 1}, {}, {}, 0.0, 0.0,
                   gap_trace(h, bus.evolution), std::nullopt, 0.0, bus};
  r.expected = gate.matrix() * bus.input.vector();
  finish(r, evolved, bus.evolution);
  r.wall_seconds = seconds_since(start);
  return r;
}

}  // namespace

DensityMatrix partial_trace(const StateVector& psi, const std::vector<std::size_t>& keep) {
  const std::size_t n = psi.n_sites();
  if (keep.empty()) throw ValidationError("partial trace needs at least one kept site");
  std::set<std::size_t> unique(keep.begin(), keep.end());
  if (unique.size() != keep.size()) throw ValidationError("kept sites must be distinct");
  if (*unique.rbegin() >= n) throw ValidationError("kept site out of range");

  std::vector<std::size_t> rest;
  for (std::size_t s = 0; s < n; ++s) {
    if (!unique.count(s)) rest.push_back(s);
  }
  const auto bit = [n](std::size_t site) { return std::size_t{1} << (n - 1 - site); };
  const auto scatter = [&](const std::vector<std::size_t>& sites, std::size_t value) {
    std::size_t index = 0;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      if ((value >> (sites.size() - 1 - k)) & 1U) index |= bit(sites[k]);
    }
    return index;
  };

  const std::size_t dk = std::size_t{1} << keep.size();
  const std::size_t dr = std::size_t{1} << rest.size();
  std::vector<std::size_t> keep_index(dk), rest_index(dr);
  for (std::size_t a = 0; a < dk; ++a) keep_index[a] = scatter(keep, a);
  for (std::size_t r = 0; r < dr; ++r) rest_index[r] = scatter(rest, r);

  // psi as a dk x dr matrix; rho = M M^dagger
  Matrix m(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dr));
  const auto& amp = psi.amplitudes();
  for (std::size_t a = 0; a < dk; ++a) {
    for (std::size_t r = 0; r < dr; ++r) {
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r)) =
          amp(static_cast<Eigen::Index>(keep_index[a] | rest_index[r]));
    }
  }
  return m * m.adjoint();
}

double fidelity(const DensityMatrix& rho, const Eigen::VectorXcd& expected) {
  if (rho.rows() != expected.size()) throw ValidationError("fidelity target has wrong dimension");
  const double f = expected.dot(rho * expected).real() / expected.squaredNorm();
  return std::clamp(f, 0.0, 1.0);
}

void BusConfig::validate() const {
  if (n_sites < 3) throw ValidationError("N must be at least 3");
  if (n_sites % 2 == 0) throw ValidationError("N must be odd");
  if (!input.is_normalized()) throw ValidationError("input qubit must be normalized");
  if (!(t_fin > 0.0) || !std::isfinite(t_fin)) throw ValidationError("t_fin must be positive");
  evolution.validate();
}

void GateConfig::validate() const {
  bus.validate();
  if (twist_start < 1 || twist_start > bus.n_sites - 1) {
    throw ValidationError("twist start L must satisfy 1 <= L <= N - 1");
  }
}

void CnotConfig::validate() const {
  if (!(h >= 0.0) || !std::isfinite(h)) throw ValidationError("h must be >= 0");
  if (!target.is_normalized()) throw ValidationError("target qubit must be normalized");
  if (!control.is_normalized()) throw ValidationError("control qubit must be normalized");
  if (!(t_fin > 0.0) || !std::isfinite(t_fin)) throw ValidationError("t_fin must be positive");
  evolution.validate();
}

ScheduledHamiltonian bus_hamiltonian(std::size_t n_sites, const std::vector<Frame>& frames,
                                     double t_fin) {
  if (n_sites < 3) throw ValidationError("bus needs at least 3 sites");
  const SpinSystem sys(n_sites);
  ScheduledHamiltonian h(sys, Schedule(t_fin));
  OperatorSum attach(sys), middle(sys), detach(sys);
  attach.add(heisenberg_bond(0, 1, frames.at(0), frames.at(1)));
  for (std::size_t i = 1; i + 2 < n_sites; ++i) {
    middle.add(heisenberg_bond(i, i + 1, frames.at(i), frames.at(i + 1)));
  }
  detach.add(heisenberg_bond(n_sites - 2, n_sites - 1, frames.at(n_sites - 2),
                             frames.at(n_sites - 1)));
  h.add(Coefficient::ramp_up, std::move(attach));
  h.add(Coefficient::constant, std::move(middle));
  h.add(Coefficient::ramp_down, std::move(detach));
  return h;
}

StateVector bus_initial_state(std::size_t n_sites, const std::vector<Frame>& frames,
                              const Qubit& input, double degeneracy_tol) {
  const std::vector<Frame> chain_frames(frames.begin() + 1, frames.end());
  const SpinSystem chain(n_sites - 1);
  const GroundManifold gm =
      ground_manifold(build_dense(heisenberg_chain(chain, 0, n_sites - 2, chain_frames)),
                      degeneracy_tol);
  if (gm.degeneracy != 1) {
    throw SetupError("chain ground state is " + std::to_string(gm.degeneracy) +
                     "-fold degenerate");
  }
  Amplitudes ground = gm.basis.col(0);
  fix_gauge(ground);
  return kron(StateVector::product({input}), StateVector(n_sites - 1, std::move(ground)));
}

ProtocolResult run_bus(const BusConfig& config) {
  config.validate();
  return run_chain(config, std::vector<Frame>(config.n_sites), gates::identity());
}

ProtocolResult run_gate(const GateConfig& config) {
  config.validate();
  ProtocolResult r = run_chain(
      config.bus, twisted_frames(config.bus.n_sites, config.twist, config.twist_start),
      gate_from_frame(config.twist));
  r.kind = ProtocolKind::gate;
  r.config = config;
  return r;
}

ScheduledHamiltonian cnot_schedule(double h, double t_fin) {
  CnotParts parts = cnot_parts(h);
  ScheduledHamiltonian sh(cnot_system(), Schedule(t_fin));
  sh.add(Coefficient::ramp_up, std::move(parts.input));
  sh.add(Coefficient::constant, std::move(parts.fixed));
  sh.add(Coefficient::ramp_down, std::move(parts.output));
  return sh;
}

StateVector cnot_branch_ground_state(double h, bool control_up, double degeneracy_tol) {
  const SpinSystem sys = cnot_system();
  const Matrix full = build_dense(cnot_hamiltonian(0.0, h));
  const std::size_t in_mask = sys.mask(cnot_sites::in);
  const std::size_t c_mask = sys.mask(cnot_sites::control);

  std::vector<Eigen::Index> sector;
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    const bool c_up = (i & c_mask) == 0;
    if ((i & in_mask) == 0 && c_up == control_up) sector.push_back(static_cast<Eigen::Index>(i));
  }
  const auto n = static_cast<Eigen::Index>(sector.size());
  Matrix sub(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) sub(r, c) = full(sector[r], sector[c]);
  }
  const GroundManifold gm = ground_manifold(sub, degeneracy_tol);
  if (gm.degeneracy != 1) {
    throw SetupError(std::string("CNOT cluster ground state for control ") +
                     (control_up ? "up" : "down") + " is " + std::to_string(gm.degeneracy) +
                     "-fold degenerate");
  }
  Amplitudes local = gm.basis.col(0);
  fix_gauge(local);
  Amplitudes amp = Amplitudes::Zero(static_cast<Eigen::Index>(sys.dimension()));
  for (Eigen::Index r = 0; r < n; ++r) amp(sector[r]) = local(r);
  return StateVector(sys.n_sites(), std::move(amp));
}

StateVector cnot_initial_state(const CnotConfig& config) {
  const SpinSystem sys = cnot_system();
  const auto in_mask = static_cast<Eigen::Index>(sys.mask(cnot_sites::in));
  Amplitudes psi = Amplitudes::Zero(static_cast<Eigen::Index>(sys.dimension()));
  for (const bool up : {true, false}) {
    const cd weight = up ? config.control.up : config.control.down;
    if (weight == cd(0.0)) continue;
    const StateVector branch = cnot_branch_ground_state(config.h, up, config.evolution.degeneracy_tol);
    const auto& g = branch.amplitudes();
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (g(i) == cd(0.0)) continue;
      psi(i) += weight * config.target.up * g(i);
      psi(i | in_mask) += weight * config.target.down * g(i);
    }
  }
  psi /= psi.norm();
  return StateVector(sys.n_sites(), std::move(psi));
}

Eigen::Matrix4cd cnot_matrix() {
  // basis (target, control): |uu>, |ud>, |du>, |dd>
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(2, 0) = 1.0;  // |uu> -> |du>
  m(1, 1) = 1.0;  // |ud> -> |ud>
  m(0, 2) = 1.0;  // |du> -> |uu>
  m(3, 3) = 1.0;  // |dd> -> |dd>
  return m;
}

ProtocolResult run_cnot(const CnotConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const ScheduledHamiltonian h = cnot_schedule(config.h, config.t_fin);
  const StateVector initial = cnot_initial_state(config);
  const Evolved evolved = run_evolution(h, initial, config.evolution);

  const Eigen::Vector4cd product =
      StateVector::product({config.target, config.control}).amplitudes();
  ProtocolResult r{ProtocolKind::cnot,
                   evolved.state,
                   {cnot_sites::out, cnot_sites::control},
                   {},
                   cnot_matrix() * product,
                   0.0,
                   0.0,
                   gap_trace(h, config.evolution),
                   std::nullopt,
                   0.0,
                   config};
  finish(r, evolved, config.evolution);
  r.wall_seconds = seconds_since(start);
  return r;
}

std::vector<SweepRow> sweep(const PointRunner& run_point, const SweepGrid& grid,
                            std::size_t workers) {
  if (grid.t_fin.empty() || grid.h.empty()) throw ValidationError("sweep grid must be nonempty");
  std::vector<SweepRow> rows;
  for (double t : grid.t_fin) {
    for (double h : grid.h) {
      SweepRow row;
      row.t_fin = t;
      row.h = h;
      rows.push_back(row);
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      try {
        const ProtocolResult r = run_point(row.t_fin, row.h);
        row.fidelity = r.fidelity;
        row.infidelity = 1.0 - r.fidelity;
        row.min_gap = r.gaps.min_gap();
        row.polarization = r.output_polarization;
      } catch (const AccuracyError& e) {
        row.fidelity = row.infidelity = row.min_gap = row.polarization = nan;
        row.error = e.what();
        row.accuracy_failure = true;
      } catch (const std::exception& e) {
        row.fidelity = row.infidelity = row.min_gap = row.polarization = nan;
        row.error = e.what();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, rows.size());
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(work);
  }
  return rows;
}

std::vector<SweepRow> sweep_bus(const BusConfig& base, const std::vector<double>& t_fin,
                                std::size_t workers) {
  return sweep(
      [&](double t, double) {
        BusConfig c = base;
        c.t_fin = t;
        return run_bus(c);
      },
      SweepGrid{t_fin, {0.0}}, workers);
}

std::vector<SweepRow> sweep_cnot(const CnotConfig& base, const SweepGrid& grid,
                                 std::size_t workers) {
  return sweep(
      [&](double t, double h) {
        CnotConfig c = base;
        c.t_fin = t;
        c.h = h;
        return run_cnot(c);
      },
      grid, workers);
}

}  // namespace holobus
