#include "holobus/spin_algebra.hpp"

#include "holobus/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace holobus {

namespace {

using cd = std::complex<double>;

// Below this a bond coefficient is treated as an exact zero.
constexpr double kDropTol = 1e-15;

Eigen::Matrix2cd pauli(Axis a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case Axis::x: m << 0, 1, 1, 0; break;
    case Axis::y: m << 0, cd(0, -1), cd(0, 1), 0; break;
    case Axis::z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Eigen::Matrix2cd factor_matrix(const PauliFactor& f) {
  const Eigen::Vector3d c = f.frame.primed(f.axis);
  return c(0) * pauli(Axis::x) + c(1) * pauli(Axis::y) + c(2) * pauli(Axis::z);
}

std::vector<std::string> numbered_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

}  // namespace

SpinSystem::SpinSystem(std::size_t n_sites) : SpinSystem(numbered_labels(n_sites)) {}

SpinSystem::SpinSystem(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("spin system needs at least one site");
  if (labels_.size() >= 8 * sizeof(std::size_t) - 1) {
    throw ResourceError("too many sites for a basis index");
  }
  auto sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("site labels must be unique");
  }
}

std::size_t SpinSystem::site(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw ValidationError("unknown site label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

OperatorSum& OperatorSum::add(PauliTerm term) {
  if (term.factors.size() > 2) throw ValidationError("Pauli terms act on at most two sites");
  if (!std::isfinite(term.weight)) throw ValidationError("Pauli term weight must be finite");
  for (const auto& f : term.factors) {
    if (f.site >= system_.n_sites()) {
      throw ValidationError("Pauli factor on site " + std::to_string(f.site) +
                            " outside a system of " + std::to_string(system_.n_sites()));
    }
  }
  if (term.factors.size() == 2 && term.factors[0].site == term.factors[1].site) {
    throw ValidationError("two-site Pauli term repeats site " +
                          std::to_string(term.factors[0].site));
  }
  terms_.push_back(std::move(term));
  return *this;
}

OperatorSum& OperatorSum::add(const std::vector<PauliTerm>& terms) {
  for (const auto& t : terms) add(t);
  return *this;
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
  if (!(other.system_ == system_)) throw ValidationError("cannot add operators on different systems");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

OperatorSum OperatorSum::scaled(double factor) const {
  OperatorSum out(system_);
  out.terms_ = terms_;
  for (auto& t : out.terms_) t.weight *= factor;
  return out;
}

bool OperatorSum::touches(std::size_t site) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const PauliTerm& t) {
    return t.weight != 0.0 && std::any_of(t.factors.begin(), t.factors.end(),
                                          [&](const PauliFactor& f) { return f.site == site; });
  });
}

std::vector<PauliTerm> heisenberg_bond(std::size_t i, std::size_t j, const Frame& frame_i,
                                       const Frame& frame_j, double weight) {
  if (i == j) throw ValidationError("invalid bond: both ends on site " + std::to_string(i));
  // sum_a (R_i e_a . sigma)(R_j e_a . sigma) = sum_bc (R_i R_j^T)_bc sigma^b sigma^c
  const Eigen::Matrix3d coupling = frame_i.matrix() * frame_j.matrix().transpose();
  constexpr std::array<Axis, 3> axes{Axis::x, Axis::y, Axis::z};
  std::vector<PauliTerm> terms;
  for (int b = 0; b < 3; ++b) {
    for (int c = 0; c < 3; ++c) {
      const double w = weight * coupling(b, c);
      if (std::abs(w) <= kDropTol * std::abs(weight)) continue;
      terms.push_back({w, {{i, axes[b]}, {j, axes[c]}}});
    }
  }
  return terms;
}

Matrix build_dense(const OperatorSum& op, std::size_t site_cap) {
  const SpinSystem& sys = op.system();
  if (sys.n_sites() > site_cap) {
    throw ResourceError("dense realization of " + std::to_string(sys.n_sites()) +
                        " sites exceeds the cap of " + std::to_string(site_cap));
  }
  const std::size_t dim = sys.dimension();
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

  for (const auto& term : op.terms()) {
    if (term.weight == 0.0) continue;
    if (term.factors.empty()) {
      h.diagonal().array() += term.weight;
      continue;
    }
    std::vector<std::size_t> masks;
    std::vector<Eigen::Matrix2cd> mats;
    for (const auto& f : term.factors) {
      masks.push_back(sys.mask(f.site));
      mats.push_back(factor_matrix(f));
    }
    const std::size_t n_f = masks.size();
    const std::size_t n_targets = std::size_t{1} << n_f;
    for (std::size_t col = 0; col < dim; ++col) {
      // enumerate every assignment of the factor bits in the row index
      for (std::size_t pattern = 0; pattern < n_targets; ++pattern) {
        std::size_t row = col;
        cd amp = term.weight;
        for (std::size_t k = 0; k < n_f; ++k) {
          const int out_bit = static_cast<int>((pattern >> k) & 1U);
          const int in_bit = (col & masks[k]) ? 1 : 0;
          row = out_bit ? (row | masks[k]) : (row & ~masks[k]);
          amp *= mats[k](out_bit, in_bit);
        }
        if (amp != cd(0.0)) {
          h(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += amp;
        }
      }
    }
  }
  return h;
}

OperatorSum heisenberg_chain(const SpinSystem& system, std::size_t first, std::size_t last,
                             const std::vector<Frame>& frames) {
  if (frames.size() != system.n_sites()) {
    throw ValidationError("heisenberg_chain needs one frame per site");
  }
  if (first > last || last >= system.n_sites()) throw ValidationError("invalid chain range");
  OperatorSum op(system);
  for (std::size_t i = first; i < last; ++i) {
    op.add(heisenberg_bond(i, i + 1, frames[i], frames[i + 1]));
  }
  return op;
}

SpinSystem cnot_system() { return SpinSystem({"in", "1", "2", "3", "4", "a", "c", "out"}); }

CnotParts cnot_parts(double h) {
  if (!(h >= 0.0) || !std::isfinite(h)) throw ValidationError("field strength h must be >= 0");
  using namespace cnot_sites;
  const SpinSystem sys = cnot_system();
  const Frame id;
  const Frame twist = frame_from_gate(gates::not_gate());
  constexpr std::array<std::size_t, 4> middle{s1, s2, s3, s4};

  CnotParts parts{OperatorSum(sys), OperatorSum(sys), OperatorSum(sys)};
  for (auto k : middle) {
    parts.input.add(heisenberg_bond(in, k, id, id));
    parts.fixed.add(heisenberg_bond(ancilla, k, id, id));
  }
  // h[(z1 - z2)(1 - zc) + (z3 - z4)(1 + zc)]
  const auto field = [&](std::size_t site, double sign) {
    parts.fixed.add({sign * h, {{site, Axis::z}}});
  };
  const auto ising = [&](std::size_t site, double sign) {
    parts.fixed.add({sign * h, {{site, Axis::z}, {control, Axis::z}}});
  };
  field(s1, +1); field(s2, -1); ising(s1, -1); ising(s2, +1);
  field(s3, +1); field(s4, -1); ising(s3, +1); ising(s4, -1);

  parts.output.add(heisenberg_bond(out, s1, twist, id));
  parts.output.add(heisenberg_bond(out, s2, twist, id));
  parts.output.add(heisenberg_bond(out, s3, id, id));
  parts.output.add(heisenberg_bond(out, s4, id, id));
  return parts;
}

OperatorSum cnot_hamiltonian(double lambda, double h) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0, 1]");
  const CnotParts parts = cnot_parts(h);
  OperatorSum op = parts.fixed;
  if (lambda != 0.0) op += parts.input.scaled(lambda);
  if (lambda != 1.0) op += parts.output.scaled(1.0 - lambda);
  return op;
}

}  // namespace holobus
