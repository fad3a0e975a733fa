#pragma once

#include "holobus/frames.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace holobus {

using Matrix = Eigen::MatrixXcd;

/// Site 0 is the most significant qubit of a computational-basis index;
/// spin up is bit value 0 (sigma^z = +1).
class SpinSystem {
 public:
  explicit SpinSystem(std::size_t n_sites);
  explicit SpinSystem(std::vector<std::string> labels);

  std::size_t n_sites() const { return labels_.size(); }
  std::size_t dimension() const { return std::size_t{1} << labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Index of a labelled site; throws ValidationError if absent.
  std::size_t site(const std::string& label) const;

  /// Bit mask selecting `site` inside a basis index.
  std::size_t mask(std::size_t site) const { return std::size_t{1} << (n_sites() - 1 - site); }

  friend bool operator==(const SpinSystem&, const SpinSystem&) = default;

 private:
  std::vector<std::string> labels_;
};

struct PauliFactor {
  std::size_t site;
  Axis axis;
  Frame frame{};  // factor is the primed Pauli sigma'^axis of this frame
};

/// weight * product of at most two Pauli factors on distinct sites.
struct PauliTerm {
  double weight = 0.0;
  std::vector<PauliFactor> factors;
};

class OperatorSum {
 public:
  explicit OperatorSum(SpinSystem system) : system_(std::move(system)) {}

  const SpinSystem& system() const { return system_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  /// Throws ValidationError on >2 factors, repeated sites, out-of-range
  /// sites or a non-finite weight.
  OperatorSum& add(PauliTerm term);
  OperatorSum& add(const std::vector<PauliTerm>& terms);
  OperatorSum& operator+=(const OperatorSum& other);

  OperatorSum scaled(double factor) const;

  /// True if any term acts on `site`.
  bool touches(std::size_t site) const;

 private:
  SpinSystem system_;
  std::vector<PauliTerm> terms_;
};

inline constexpr std::size_t kDefaultSiteCap = 14;

/// weight * sum_a (sigma'^a of frame_i)_i (sigma'^a of frame_j)_j, expanded into
/// plain two-site Pauli products. Identity frames give exactly xx + yy + zz.
std::vector<PauliTerm> heisenberg_bond(std::size_t i, std::size_t j, const Frame& frame_i,
                                       const Frame& frame_j, double weight = 1.0);

/// Dense 2^N x 2^N realization. Throws ResourceError past `site_cap`.
Matrix build_dense(const OperatorSum& op, std::size_t site_cap = kDefaultSiteCap);

/// Open Heisenberg chain over consecutive sites [first, last] with a frame
/// per site (frames indexed by absolute site).
OperatorSum heisenberg_chain(const SpinSystem& system, std::size_t first, std::size_t last,
                             const std::vector<Frame>& frames);

namespace cnot_sites {
inline constexpr std::size_t in = 0;
inline constexpr std::size_t s1 = 1;
inline constexpr std::size_t s2 = 2;
inline constexpr std::size_t s3 = 3;
inline constexpr std::size_t s4 = 4;
inline constexpr std::size_t ancilla = 5;
inline constexpr std::size_t control = 6;
inline constexpr std::size_t out = 7;
}  // namespace cnot_sites

SpinSystem cnot_system();

/// The three pieces of the CNOT Hamiltonian:
///   H(lambda) = lambda * input + fixed + (1 - lambda) * output.
struct CnotParts {
  OperatorSum input;   // sigma_in . (sigma_1 + ... + sigma_4)
  OperatorSum fixed;   // ancilla bonds plus the control-gated fields
  OperatorSum output;  // NOT-twisted out-{1,2} and plain out-{3,4} bonds
};

/// Throws ValidationError for h < 0.
CnotParts cnot_parts(double h);

OperatorSum cnot_hamiltonian(double lambda, double h);

}  // namespace holobus
