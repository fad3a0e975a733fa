#include "holobus/errors.hpp"
#include "holobus/spin_algebra.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace holobus;
using oracle::Mat;

namespace {

std::size_t count_axes(const std::vector<PauliTerm>& terms, Axis a, Axis b) {
  return static_cast<std::size_t>(std::count_if(terms.begin(), terms.end(), [&](const PauliTerm& t) {
    return t.factors.size() == 2 && t.factors[0].axis == a && t.factors[1].axis == b;
  }));
}

double weight_of(const std::vector<PauliTerm>& terms, Axis a, Axis b) {
  double w = 0;
  for (const auto& t : terms) {
    if (t.factors.size() == 2 && t.factors[0].axis == a && t.factors[1].axis == b) w += t.weight;
  }
  return w;
}

Mat dense_of(std::size_t n, const std::vector<PauliTerm>& terms) {
  OperatorSum op{SpinSystem(n)};
  op.add(terms);
  return build_dense(op);
}

// The CNOT Hamiltonian assembled from Kronecker products, term by term.
Mat cnot_oracle(double lambda, double h) {
  const std::size_t n = 8, in = 0, a = 5, c = 6, out = 7;
  const Mat id = Mat::Identity(2, 2);
  const Mat x = oracle::pauli(0);
  const Mat z = oracle::pauli(2);
  Mat H = Mat::Zero(256, 256);
  for (std::size_t k = 1; k <= 4; ++k) {
    H += lambda * oracle::bond(n, in, k);
    H += oracle::bond(n, a, k);
  }
  const auto zz = [&](std::size_t i) { return oracle::embed(n, {{i, z}}); };
  const auto zc = [&](std::size_t i) { return oracle::embed(n, {{i, z}, {c, z}}); };
  H += h * (zz(1) - zc(1) - zz(2) + zc(2) + zz(3) + zc(3) - zz(4) - zc(4));
  H += (1 - lambda) * (oracle::bond(n, out, 1, x, id) + oracle::bond(n, out, 2, x, id));
  H += (1 - lambda) * (oracle::bond(n, out, 3) + oracle::bond(n, out, 4));
  return H;
}

bool any_factor_on(const OperatorSum& op, std::size_t site) { return op.touches(site); }

}  // namespace

TEST(HeisenbergBond, UntwistedHasThreeTerms) {
  const auto terms = heisenberg_bond(0, 1, Frame{}, Frame{});
  ASSERT_EQ(terms.size(), 3u);
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    EXPECT_EQ(count_axes(terms, a, a), 1u);
    EXPECT_DOUBLE_EQ(weight_of(terms, a, a), 1.0);
  }
}

TEST(HeisenbergBond, HadamardTwist) {
  const auto terms = heisenberg_bond(0, 1, Frame{}, frame_from_gate(gates::hadamard()));
  EXPECT_NEAR(weight_of(terms, Axis::x, Axis::z), 1.0, 1e-15);
  EXPECT_NEAR(weight_of(terms, Axis::z, Axis::x), 1.0, 1e-15);
  EXPECT_NEAR(weight_of(terms, Axis::y, Axis::y), -1.0, 1e-15);
  EXPECT_EQ(terms.size(), 3u);
}

TEST(HeisenbergBond, RandomTwistIsUnitaryConjugation) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const Frame f = Frame::random(rng);
    const Mat u = gate_from_frame(f).matrix();
    const Mat lhs = dense_of(2, heisenberg_bond(0, 1, Frame{}, f));
    const Mat rot = oracle::kron(Mat::Identity(2, 2), u);
    const Mat rhs = rot * oracle::bond(2, 0, 1) * rot.adjoint();
    EXPECT_LT((lhs - rhs).norm(), 1e-12);
  }
}

TEST(HeisenbergBond, SameSiteIsRejected) {
  EXPECT_THROW(heisenberg_bond(2, 2, Frame{}, Frame{}), ValidationError);
}

TEST(BuildDense, SigmaZOnMostSignificantSite) {
  OperatorSum op{SpinSystem(2)};
  op.add(PauliTerm{1.0, {{0, Axis::z}}});
  const Mat m = build_dense(op);
  Eigen::VectorXcd diag(4);
  diag << 1, 1, -1, -1;
  EXPECT_LT((m - Mat(diag.asDiagonal())).norm(), 1e-15);
}

TEST(BuildDense, BondSpectrum) {
  const Eigen::VectorXd ev = oracle::eigenvalues(dense_of(2, heisenberg_bond(0, 1, Frame{}, Frame{})));
  EXPECT_NEAR(ev(0), -3.0, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(ev(k), 1.0, 1e-12);
}

TEST(BuildDense, MatchesKroneckerOracleForTwistedChains) {
  std::mt19937_64 rng(41);
  const std::size_t n = 5;
  for (int k = 0; k < 5; ++k) {
    std::vector<Frame> frames(n);
    for (auto& f : frames) f = Frame::random(rng);
    const Mat built = build_dense(heisenberg_chain(SpinSystem(n), 0, n - 1, frames));
    Mat expected = Mat::Zero(32, 32);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      expected += oracle::bond(n, i, i + 1, gate_from_frame(frames[i]).matrix(),
                               gate_from_frame(frames[i + 1]).matrix());
    }
    EXPECT_LT((built - expected).norm(), 1e-12);
    EXPECT_LT((built - built.adjoint()).norm(), 1e-12);
  }
}

TEST(BuildDense, SiteCap) {
  OperatorSum op{SpinSystem(4)};
  op.add(PauliTerm{1.0, {{0, Axis::x}}});
  EXPECT_THROW(build_dense(op, 3), ResourceError);
  EXPECT_NO_THROW(build_dense(op, 4));
}

TEST(OperatorSum, RejectsMalformedTerms) {
  OperatorSum op{SpinSystem(3)};
  EXPECT_THROW(op.add(PauliTerm{1.0, {{0, Axis::x}, {0, Axis::y}}}), ValidationError);
  EXPECT_THROW(op.add(PauliTerm{1.0, {{0, Axis::x}, {1, Axis::y}, {2, Axis::z}}}), ValidationError);
  EXPECT_THROW(op.add(PauliTerm{1.0, {{3, Axis::x}}}), ValidationError);
  EXPECT_THROW(op.add(PauliTerm{std::nan(""), {{0, Axis::x}}}), ValidationError);
}

TEST(SpinSystem, Labels) {
  const SpinSystem s = cnot_system();
  EXPECT_EQ(s.n_sites(), 8u);
  EXPECT_EQ(s.dimension(), 256u);
  EXPECT_EQ(s.site("c"), cnot_sites::control);
  EXPECT_EQ(s.site("out"), cnot_sites::out);
  EXPECT_THROW(s.site("nope"), ValidationError);
  EXPECT_THROW(SpinSystem(std::vector<std::string>{"a", "a"}), ValidationError);
}

TEST(TwistInvariance, SuffixTwistKeepsSpectrum) {
  std::mt19937_64 rng(7);
  for (std::size_t n = 3; n <= 6; ++n) {
    const SpinSystem sys(n);
    const Eigen::VectorXd plain =
        oracle::eigenvalues(build_dense(heisenberg_chain(sys, 0, n - 1, std::vector<Frame>(n))));
    for (int k = 0; k < 5; ++k) {
      const Frame f = Frame::random(rng);
      std::uniform_int_distribution<std::size_t> pick(1, n - 1);
      const std::size_t start = pick(rng);
      std::vector<Frame> frames(n);
      for (std::size_t i = start; i < n; ++i) frames[i] = f;
      const Eigen::VectorXd twisted =
          oracle::eigenvalues(build_dense(heisenberg_chain(sys, 0, n - 1, frames)));
      EXPECT_LT((plain - twisted).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(Cnot, MatchesTermByTermOracle) {
  for (double lambda : {0.0, 0.3, 1.0}) {
    const Mat built = build_dense(cnot_hamiltonian(lambda, 10.0));
    const Mat expected = cnot_oracle(lambda, 10.0);
    EXPECT_LT((built - expected).norm(), 1e-10) << lambda;
    EXPECT_LT((oracle::eigenvalues(built) - oracle::eigenvalues(expected)).cwiseAbs().maxCoeff(),
              1e-10);
  }
}

TEST(Cnot, InputDecoupledAtStartOutputAtEnd) {
  EXPECT_FALSE(any_factor_on(cnot_hamiltonian(0.0, 0.0), cnot_sites::in));
  EXPECT_TRUE(any_factor_on(cnot_hamiltonian(0.0, 0.0), cnot_sites::out));
  EXPECT_FALSE(any_factor_on(cnot_hamiltonian(1.0, 10.0), cnot_sites::out));
  EXPECT_TRUE(any_factor_on(cnot_hamiltonian(1.0, 10.0), cnot_sites::in));
}

TEST(Cnot, ControlIsConserved) {
  const Mat zc = oracle::embed(8, {{cnot_sites::control, oracle::pauli(2)}});
  for (double lambda : {0.0, 0.5, 1.0}) {
    for (double h : {0.0, 1.0, 10.0}) {
      const Mat H = build_dense(cnot_hamiltonian(lambda, h));
      EXPECT_LT((zc * H - H * zc).norm(), 1e-12);
    }
  }
}

TEST(Cnot, ControlBranchesShareSpectrum) {
  const std::size_t cmask = cnot_system().mask(cnot_sites::control);
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Mat H = build_dense(cnot_hamiltonian(lambda, 10.0));
    std::vector<Eigen::Index> up, down;
    for (Eigen::Index i = 0; i < 256; ++i) ((static_cast<std::size_t>(i) & cmask) ? down : up).push_back(i);
    const Mat hu = H(up, up);
    const Mat hd = H(down, down);
    EXPECT_LT((oracle::eigenvalues(hu) - oracle::eigenvalues(hd)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Cnot, NegativeFieldRejected) {
  EXPECT_THROW(cnot_hamiltonian(0.5, -1.0), ValidationError);
}
