#include "holobus/frames.hpp"

#include "holobus/errors.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <complex>

namespace holobus {

namespace {

using cd = std::complex<double>;
constexpr double kRotationTol = 1e-10;

const std::array<Eigen::Matrix2cd, 3>& paulis() {
  static const std::array<Eigen::Matrix2cd, 3> p = [] {
    std::array<Eigen::Matrix2cd, 3> m;
    m[0] << 0, 1, 1, 0;
    m[1] << 0, cd(0, -1), cd(0, 1), 0;
    m[2] << 1, 0, 0, -1;
    return m;
  }();
  return p;
}

}  // namespace

Frame::Frame(const Eigen::Matrix3d& rotation) : rotation_(rotation) {
  const double orth = (rotation * rotation.transpose() - Eigen::Matrix3d::Identity())
                          .cwiseAbs()
                          .maxCoeff();
  if (!std::isfinite(orth) || orth > kRotationTol) {
    throw ValidationError("frame matrix is not orthogonal (deviation " + std::to_string(orth) +
                          ")");
  }
  if (std::abs(rotation.determinant() - 1.0) > kRotationTol) {
    throw ValidationError("frame matrix is not a proper rotation (det " +
                          std::to_string(rotation.determinant()) + ")");
  }
}

Frame Frame::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  if (axis.norm() == 0.0) throw ValidationError("rotation axis must be nonzero");
  return Frame(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

Frame Frame::random(std::mt19937_64& rng) {
  // Haar-uniform via a normalized Gaussian quaternion.
  std::normal_distribution<double> normal;
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return Frame(q.toRotationMatrix());
}

bool Frame::is_identity(double tol) const {
  return (rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol;
}

bool approx_equal(const Frame& a, const Frame& b, double tol) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff() <= tol;
}

SingleQubitGate::SingleQubitGate(const Eigen::Matrix2cd& unitary, std::string name)
    : unitary_(unitary), name_(std::move(name)) {
  const double dev =
      (unitary.adjoint() * unitary - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
  if (!std::isfinite(dev) || dev > kRotationTol) {
    throw ValidationError("gate matrix is not unitary (deviation " + std::to_string(dev) + ")");
  }
}

Frame frame_from_gate_unchecked(const Eigen::Matrix2cd& u) {
  const auto& p = paulis();
  Eigen::Matrix3d r;
  for (int b = 0; b < 3; ++b) {
    const Eigen::Matrix2cd conj = u * p[b] * u.adjoint();
    for (int a = 0; a < 3; ++a) r(a, b) = 0.5 * (p[a] * conj).trace().real();
  }
  return Frame(r, Frame::Unchecked{});
}

Frame frame_from_gate(const SingleQubitGate& gate) {
  return frame_from_gate_unchecked(gate.matrix());
}

SingleQubitGate gate_from_frame(const Frame& frame) {
  // R = rotation by theta about n  <->  U = cos(theta/2) - i sin(theta/2) n.sigma
  const Eigen::Quaterniond q(frame.matrix());
  const auto& p = paulis();
  const Eigen::Matrix2cd u = q.w() * Eigen::Matrix2cd::Identity() -
                             cd(0, 1) * (q.x() * p[0] + q.y() * p[1] + q.z() * p[2]);
  return SingleQubitGate(u);
}

Frame compose(const Frame& first, const Frame& second) {
  return Frame(first.matrix() * second.matrix(), Frame::Unchecked{});
}

namespace gates {

SingleQubitGate identity() { return SingleQubitGate(Eigen::Matrix2cd::Identity(), "identity"); }

SingleQubitGate hadamard() {
  Eigen::Matrix2cd m;
  m << 1, 1, 1, -1;
  return SingleQubitGate(m / std::sqrt(2.0), "hadamard");
}

SingleQubitGate pi_over_8() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, std::polar(1.0, M_PI / 4);
  return SingleQubitGate(m, "pi/8");
}

SingleQubitGate phase() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, cd(0, 1);
  return SingleQubitGate(m, "phase");
}

SingleQubitGate phase_dagger() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, cd(0, -1);
  return SingleQubitGate(m, "phase_dagger");
}

SingleQubitGate not_gate() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return SingleQubitGate(m, "not");
}

}  // namespace gates

std::vector<SingleQubitGate> named_gates() {
  return {gates::identity(), gates::hadamard(), gates::pi_over_8(),
          gates::phase(),    gates::phase_dagger(), gates::not_gate()};
}

std::vector<std::string> gate_names() {
  std::vector<std::string> names;
  for (const auto& g : named_gates()) names.push_back(g.name());
  return names;
}

std::optional<SingleQubitGate> gate_by_name(std::string_view name) {
  for (auto& g : named_gates()) {
    if (g.name() == name) return g;
  }
  return std::nullopt;
}

}  // namespace holobus
