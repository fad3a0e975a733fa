#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace holobus {

using Amplitudes = Eigen::VectorXcd;

/// alpha |up> + beta |down>.
struct Qubit {
  std::complex<double> up{1.0};
  std::complex<double> down{0.0};

  static Qubit spin_up() { return {1.0, 0.0}; }
  static Qubit spin_down() { return {0.0, 1.0}; }
  static Qubit plus();
  /// Haar-random pure qubit.
  static Qubit random(std::mt19937_64& rng);

  Eigen::Vector2cd vector() const { return {up, down}; }
  double norm() const;
  bool is_normalized(double tol = 1e-10) const;
};

/// Amplitudes over 2^n spin configurations (site 0 most significant).
class StateVector {
 public:
  /// Throws ValidationError if the length is not 2^n_sites.
  StateVector(std::size_t n_sites, Amplitudes amplitudes);

  static StateVector basis(std::size_t n_sites, std::size_t index);
  static StateVector product(const std::vector<Qubit>& qubits);

  std::size_t n_sites() const { return n_sites_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  Amplitudes& amplitudes() { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }
  std::complex<double> inner(const StateVector& other) const;

  /// |this><this| expectation value of a dense operator.
  std::complex<double> expectation(const Eigen::MatrixXcd& op) const;

 private:
  std::size_t n_sites_;
  Amplitudes amplitudes_;
};

/// `first` occupies the most significant sites.
StateVector kron(const StateVector& first, const StateVector& second);

}  // namespace holobus
