#pragma once

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace holobus {

enum class Axis { x = 0, y = 1, z = 2 };

inline constexpr std::string_view axis_name(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

/// A proper rotation of the Pauli axis triple.
///
/// Stored as the adjoint rotation R of a single-qubit unitary U:
///   U sigma^b U^dagger = sum_a R(a, b) sigma^a.
/// The primed Pauli sigma'^b of a twisted site is therefore column b of R.
class Frame {
 public:
  Frame() : rotation_(Eigen::Matrix3d::Identity()) {}

  /// Throws ValidationError unless R is orthogonal with det +1 (to 1e-10).
  explicit Frame(const Eigen::Matrix3d& rotation);

  static Frame identity() { return Frame(); }
  static Frame from_axis_angle(const Eigen::Vector3d& axis, double angle);
  static Frame random(std::mt19937_64& rng);

  const Eigen::Matrix3d& matrix() const { return rotation_; }

  /// Coefficients of sigma'^a in the unprimed basis (x, y, z).
  Eigen::Vector3d primed(Axis a) const { return rotation_.col(static_cast<int>(a)); }

  Frame inverse() const { return Frame(rotation_.transpose(), Unchecked{}); }
  bool is_identity(double tol = 1e-12) const;

 private:
  struct Unchecked {};
  Frame(const Eigen::Matrix3d& rotation, Unchecked) : rotation_(rotation) {}
  friend Frame compose(const Frame&, const Frame&);
  friend Frame frame_from_gate_unchecked(const Eigen::Matrix2cd&);

  Eigen::Matrix3d rotation_;
};

bool approx_equal(const Frame& a, const Frame& b, double tol);

class SingleQubitGate {
 public:
  /// Throws ValidationError if U is not unitary to 1e-10.
  explicit SingleQubitGate(const Eigen::Matrix2cd& unitary, std::string name = {});

  const Eigen::Matrix2cd& matrix() const { return unitary_; }
  const std::string& name() const { return name_; }

 private:
  Eigen::Matrix2cd unitary_;
  std::string name_;
};

/// Adjoint image of U: R(a, b) = Tr(sigma^a U sigma^b U^dagger) / 2.
/// Insensitive to the global phase of U.
Frame frame_from_gate(const SingleQubitGate& gate);

/// One of the two SU(2) preimages of the rotation.
SingleQubitGate gate_from_frame(const Frame& frame);

/// R1 * R2, the frame of U1 * U2.
Frame compose(const Frame& first, const Frame& second);

// Named single-qubit gates.
namespace gates {
SingleQubitGate identity();
SingleQubitGate hadamard();
SingleQubitGate pi_over_8();
SingleQubitGate phase();
SingleQubitGate phase_dagger();
SingleQubitGate not_gate();
}  // namespace gates

/// Gates accepted by name in experiment specs, in display order.
std::vector<SingleQubitGate> named_gates();
std::vector<std::string> gate_names();
std::optional<SingleQubitGate> gate_by_name(std::string_view name);

}  // namespace holobus
