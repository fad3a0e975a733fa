#include "holobus/errors.hpp"
#include "holobus/protocols.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace holobus;
using oracle::Mat;

namespace {

// rho_{ab} = sum_r psi[a, r] conj(psi[b, r]), indices assembled bit by bit.
Mat brute_trace(const StateVector& psi, const std::vector<std::size_t>& keep) {
  const std::size_t n = psi.n_sites();
  const std::size_t k = keep.size();
  Mat rho = Mat::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
  for (std::size_t i = 0; i < psi.dimension(); ++i) {
    for (std::size_t j = 0; j < psi.dimension(); ++j) {
      bool same_rest = true;
      std::size_t a = 0, b = 0;
      for (std::size_t s = 0; s < n; ++s) {
        const std::size_t bi = (i >> (n - 1 - s)) & 1u, bj = (j >> (n - 1 - s)) & 1u;
        const auto pos = std::find(keep.begin(), keep.end(), s);
        if (pos == keep.end()) {
          if (bi != bj) same_rest = false;
        } else {
          const std::size_t shift = k - 1 - static_cast<std::size_t>(pos - keep.begin());
          a |= bi << shift;
          b |= bj << shift;
        }
      }
      if (same_rest) rho(a, b) += psi.amplitudes()(i) * std::conj(psi.amplitudes()(j));
    }
  }
  return rho;
}

Qubit normalised(std::complex<double> a, std::complex<double> b) {
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return {a / n, b / n};
}

BusConfig bus(std::size_t n, Qubit q, double t_fin) {
  BusConfig c;
  c.n_sites = n;
  c.input = q;
  c.t_fin = t_fin;
  return c;
}

CnotConfig cnot(Qubit target, Qubit control, double h, double t_fin) {
  CnotConfig c;
  c.target = target;
  c.control = control;
  c.h = h;
  c.t_fin = t_fin;
  return c;
}

}  // namespace

TEST(PartialTrace, ProductState) {
  const StateVector psi = StateVector::product({Qubit::spin_up(), Qubit::spin_down()});
  const Mat rho = partial_trace(psi, {0});
  EXPECT_NEAR(std::abs(rho(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(rho.norm(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(partial_trace(psi, {1})(1, 1) - 1.0), 0.0, 1e-15);
}

TEST(PartialTrace, SingletMarginalsAreMixed) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(1) = 1 / std::sqrt(2.0);
  v(2) = -1 / std::sqrt(2.0);
  const StateVector singlet(2, v);
  for (std::size_t s : {0u, 1u}) {
    EXPECT_LT((partial_trace(singlet, {s}) - 0.5 * Mat::Identity(2, 2)).norm(), 1e-15);
  }
}

TEST(PartialTrace, MatchesIndexSummation) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(16);
  v.normalize();
  const StateVector psi(4, v);
  for (const std::vector<std::size_t>& keep :
       {std::vector<std::size_t>{0, 1}, {3, 1}, {2}, {0, 2, 3}, {3, 2, 1, 0}}) {
    const Mat rho = partial_trace(psi, keep);
    EXPECT_LT((rho - brute_trace(psi, keep)).norm(), 1e-12);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  }
  EXPECT_THROW(partial_trace(psi, {}), ValidationError);
  EXPECT_THROW(partial_trace(psi, {1, 1}), ValidationError);
  EXPECT_THROW(partial_trace(psi, {4}), ValidationError);
}

TEST(Bus, ConfigValidation) {
  EXPECT_THROW(run_bus(bus(4, Qubit::spin_up(), 10)), ValidationError);
  EXPECT_THROW(run_bus(bus(1, Qubit::spin_up(), 10)), ValidationError);
  EXPECT_THROW(run_bus(bus(3, Qubit{1.0, 1.0}, 10)), ValidationError);
  GateConfig g;
  g.twist_start = 3;
  EXPECT_THROW(run_gate(g), ValidationError);
  g.twist_start = 0;
  EXPECT_THROW(run_gate(g), ValidationError);
}

TEST(Bus, AdiabaticTransfer) {
  const ProtocolResult r = run_bus(bus(3, Qubit::spin_up(), 50));
  EXPECT_LT(1 - r.fidelity, 1e-2);
  const Mat& rho = r.reduced;
  EXPECT_LT((rho - rho.adjoint()).norm(), 1e-12);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat>(rho).eigenvalues().minCoeff(), -1e-10);
  EXPECT_EQ(r.output_sites, std::vector<std::size_t>{2});
}

TEST(Bus, SuddenQuenchIsWorse) {
  const double sudden = run_bus(bus(3, Qubit::spin_up(), 0.01)).fidelity;
  const double slow = run_bus(bus(3, Qubit::spin_up(), 50)).fidelity;
  EXPECT_LT(sudden, slow);
}

TEST(Bus, InputIndependence) {
  const double up = run_bus(bus(3, Qubit::spin_up(), 10)).fidelity;
  const double y = run_bus(bus(3, normalised(1.0, {0.0, 1.0}), 10)).fidelity;
  EXPECT_NEAR(up, y, 1e-6);
}

TEST(Bus, DecaysTowardsAdiabaticLimit) {
  const double f10 = run_bus(bus(3, Qubit::plus(), 10)).fidelity;
  const double f100 = run_bus(bus(3, Qubit::plus(), 100)).fidelity;
  EXPECT_LT(1 - f100, 1 - f10);
}

TEST(Gate, HadamardOnUp) {
  GateConfig g;
  g.bus = bus(3, Qubit::spin_up(), 50);
  g.twist = frame_from_gate(gates::hadamard());
  const ProtocolResult r = run_gate(g);
  EXPECT_GT(r.fidelity, 0.99);
  Eigen::Vector2cd plus(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  EXPECT_GT(fidelity(r.reduced, plus), 0.99);
}

TEST(Gate, NotFlipsUp) {
  GateConfig g;
  g.bus = bus(3, Qubit::spin_up(), 50);
  g.twist = frame_from_gate(gates::not_gate());
  const ProtocolResult r = run_gate(g);
  EXPECT_GT(std::abs(r.reduced(1, 1)), 0.99);
  EXPECT_LT(r.output_polarization, -0.98);
}

TEST(Gate, IdentityTwistIsTheBus) {
  const BusConfig b = bus(5, normalised({0.3, 0.1}, -0.7), 7);
  GateConfig g;
  g.bus = b;
  g.twist_start = 2;
  const ProtocolResult plain = run_bus(b);
  const ProtocolResult twisted = run_gate(g);
  EXPECT_NEAR(plain.fidelity, twisted.fidelity, 1e-10);
  EXPECT_LT((plain.final_state.amplitudes() - twisted.final_state.amplitudes()).norm(), 1e-10);
}

TEST(Gate, TwistCovariance) {
  // Twisting sites L.. by U is the bus conjugated by U on those sites. The
  // bus run from the rotated-back initial state, rotated forward at the end,
  // must reproduce the twisted run up to a global phase.
  std::mt19937_64 rng(99);
  const std::size_t n = 5;
  for (int k = 0; k < 3; ++k) {
    const Frame f = Frame::random(rng);
    const Mat u = gate_from_frame(f).matrix();
    const std::size_t start = 1 + static_cast<std::size_t>(k);
    GateConfig g;
    g.bus = bus(n, Qubit::random(rng), 6);
    g.twist = f;
    g.twist_start = start;
    const ProtocolResult twisted = run_gate(g);

    Mat rot = Mat::Identity(1, 1);
    for (std::size_t s = 0; s < n; ++s) rot = oracle::kron(rot, s >= start ? u : Mat::Identity(2, 2));

    std::vector<Frame> frames(n);
    for (std::size_t s = start; s < n; ++s) frames[s] = f;
    const StateVector start_twisted = bus_initial_state(n, frames, g.bus.input, 1e-8);
    const StateVector start_plain(n, rot.adjoint() * start_twisted.amplitudes());
    const StateVector evolved =
        evolve(bus_hamiltonian(n, std::vector<Frame>(n), g.bus.t_fin), start_plain, EvolutionConfig{});
    const Eigen::VectorXcd covariant = rot * evolved.amplitudes();
    EXPECT_NEAR(oracle::overlap(covariant, twisted.final_state.amplitudes()), 1.0, 1e-8);
  }
}

TEST(Cnot, ExpectedMatrixFollowsTheText) {
  const Eigen::Matrix4cd m = cnot_matrix();
  // index = 2 * target + control, up = 0
  const auto col = [&](int target, int control) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(2 * target + control) = 1;
    return (m * v).eval();
  };
  EXPECT_NEAR(std::abs(col(0, 0)(2)), 1.0, 1e-15);  // control up flips
  EXPECT_NEAR(std::abs(col(1, 0)(0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(col(0, 1)(1)), 1.0, 1e-15);  // control down: identity
  EXPECT_NEAR(std::abs(col(1, 1)(3)), 1.0, 1e-15);
}

TEST(Cnot, BranchGroundStatesAreUnique) {
  for (bool up : {true, false}) {
    const StateVector g = cnot_branch_ground_state(10.0, up, 1e-8);
    EXPECT_NEAR(g.norm(), 1.0, 1e-12);
  }
}

TEST(Cnot, ControlUpFlipsTarget) {
  const ProtocolResult r = run_cnot(cnot(Qubit::spin_up(), Qubit::spin_up(), 10, 10));
  EXPECT_LT(1 - r.fidelity, 1e-2);
  EXPECT_LT(r.output_polarization, -0.98);
  EXPECT_EQ(r.output_sites, (std::vector<std::size_t>{cnot_sites::out, cnot_sites::control}));
}

TEST(Cnot, ControlDownLeavesTargetAlone) {
  std::mt19937_64 rng(1);
  const Qubit target = Qubit::random(rng);
  const ProtocolResult r = run_cnot(cnot(target, Qubit::spin_down(), 10, 40));
  EXPECT_GT(r.fidelity, 0.99);
}

TEST(Cnot, BasisTargetsTransferEqually) {
  // global spin flip combined with the 1<->2, 3<->4 swap is a symmetry of
  // every branch Hamiltonian, so up and down targets fare identically
  for (const Qubit control : {Qubit::spin_up(), Qubit::spin_down()}) {
    const double up = run_cnot(cnot(Qubit::spin_up(), control, 10, 10)).fidelity;
    const double down = run_cnot(cnot(Qubit::spin_down(), control, 10, 10)).fidelity;
    EXPECT_NEAR(up, down, 1e-9);
  }
}

TEST(Cnot, SuperposedTargetsStayWithinTheInfidelityScale) {
  // the z fields break SU(2), so coherence between the target's components
  // is only preserved up to the residual infidelity
  std::mt19937_64 rng(21);
  for (const Qubit control : {Qubit::spin_up(), Qubit::spin_down()}) {
    const double reference = run_cnot(cnot(Qubit::spin_up(), control, 10, 10)).fidelity;
    for (int k = 0; k < 3; ++k) {
      const double f = run_cnot(cnot(Qubit::random(rng), control, 10, 10)).fidelity;
      EXPECT_LT(std::abs(f - reference), 1 - reference);
    }
  }
}

TEST(Cnot, RejectsNegativeField) {
  EXPECT_THROW(run_cnot(cnot(Qubit::spin_up(), Qubit::spin_up(), -1, 10)), ValidationError);
}

TEST(Sweep, RowsFollowGridOrder) {
  const SweepGrid grid{{1.0, 3.0, 2.0}, {0.5, 0.25}};
  const auto runner = [](double t, double h) {
    if (t == 3.0 && h == 0.25) throw SetupError("boom");
    return run_bus(bus(3, Qubit::spin_up(), t * h + 0.5));
  };
  const auto serial = sweep(runner, grid, 1);
  const auto parallel = sweep(runner, grid, 3);
  ASSERT_EQ(serial.size(), 6u);
  std::size_t k = 0;
  for (double t : grid.t_fin) {
    for (double h : grid.h) {
      EXPECT_EQ(serial[k].t_fin, t);
      EXPECT_EQ(serial[k].h, h);
      EXPECT_EQ(parallel[k].error, serial[k].error);
      if (serial[k].error.empty()) EXPECT_EQ(parallel[k].fidelity, serial[k].fidelity);
      ++k;
    }
  }
  EXPECT_EQ(serial[3].error, "boom");
  EXPECT_TRUE(serial[2].error.empty());
  EXPECT_THROW(sweep(runner, SweepGrid{{}, {1.0}}, 1), ValidationError);
}
