#include "holobus/state.hpp"

#include "holobus/errors.hpp"

#include <cmath>

namespace holobus {

Qubit Qubit::plus() { return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}; }

Qubit Qubit::random(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Qubit q{{normal(rng), normal(rng)}, {normal(rng), normal(rng)}};
  const double n = q.norm();
  q.up /= n;
  q.down /= n;
  return q;
}

double Qubit::norm() const { return std::sqrt(std::norm(up) + std::norm(down)); }

bool Qubit::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

StateVector::StateVector(std::size_t n_sites, Amplitudes amplitudes)
    : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != (std::size_t{1} << n_sites_)) {
    throw ValidationError("state of " + std::to_string(amplitudes_.size()) +
                          " amplitudes does not match " + std::to_string(n_sites_) + " sites");
  }
}

StateVector StateVector::basis(std::size_t n_sites, std::size_t index) {
  const std::size_t dim = std::size_t{1} << n_sites;
  if (index >= dim) throw ValidationError("basis index out of range");
  Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(dim));
  a(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(n_sites, std::move(a));
}

StateVector StateVector::product(const std::vector<Qubit>& qubits) {
  if (qubits.empty()) throw ValidationError("product state needs at least one qubit");
  Amplitudes a(1);
  a(0) = 1.0;
  for (const auto& q : qubits) {
    Amplitudes next(a.size() * 2);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      next(2 * i) = a(i) * q.up;
      next(2 * i + 1) = a(i) * q.down;
    }
    a = std::move(next);
  }
  return StateVector(qubits.size(), std::move(a));
}

std::complex<double> StateVector::inner(const StateVector& other) const {
  if (other.n_sites_ != n_sites_) throw ValidationError("inner product of mismatched states");
  return amplitudes_.dot(other.amplitudes_);
}

std::complex<double> StateVector::expectation(const Eigen::MatrixXcd& op) const {
  if (op.rows() != amplitudes_.size() || op.cols() != amplitudes_.size()) {
    throw ValidationError("operator dimension does not match the state");
  }
  return amplitudes_.dot(op * amplitudes_);
}

StateVector kron(const StateVector& first, const StateVector& second) {
  const auto& a = first.amplitudes();
  const auto& b = second.amplitudes();
  Amplitudes out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return StateVector(first.n_sites() + second.n_sites(), std::move(out));
}

}  // namespace holobus
