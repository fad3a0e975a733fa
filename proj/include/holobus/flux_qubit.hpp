#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace holobus::flux {

/// Per-loop constants of the harmonic terms U_n (phi_n - phi_n^x)^2 / 2.
struct LoopParams {
  double U = 1.0;
  double C = 1.0;  // carried for completeness; charge terms are not evaluated
  double phi_x = 0.0;
};

enum class Loop { q = 0, ccjj = 1, l = 2, r = 3 };

/// CCJJ circuit constants in reduced units (Phi_0 = 1, U_q = 1 by default).
struct CircuitParams {
  double L_q = 1.0;
  std::array<double, 4> currents{1.0, 1.0, 1.0, 1.0};  // I_1 .. I_4
  double phi0 = 1.0;
  double U_q = 1.0;
  std::array<LoopParams, 4> loops{};  // indexed by Loop

  // Three-direction qubit: harmonic loops and flux scale factors alpha_n.
  std::array<LoopParams, 3> heisenberg_loops{};
  std::array<double, 3> alpha{1.0, 1.0, 1.0};

  const LoopParams& loop(Loop l) const { return loops[static_cast<std::size_t>(l)]; }

  /// Throws ValidationError unless L_q, phi0, currents and capacitances are positive.
  void validate() const;
};

struct EffectiveParams {
  double beta_L_plus = 0, beta_L_minus = 0, beta_R_plus = 0, beta_R_minus = 0;
  double phi_L0 = 0, phi_R0 = 0;
  double beta_L = 0, beta_R = 0;
  double beta_plus = 0, beta_minus = 0;
  double gamma = 0, gamma0 = 0;
  double beta_eff = 0;
  double phi_q0 = 0;
};

/// Reduces the CCJJ junction currents and loop fluxes to the single-junction
/// form -U_q beta_eff cos(phi_q - phi_q^0).
///
/// arctan is taken on its principal branch. A tangent argument at pi/2 (mod
/// pi) is only an error when it multiplies a nonzero asymmetry ratio; with a
/// vanishing ratio the offset is exactly zero. Throws DomainError naming the
/// offending flux, or when beta_{L,+}, beta_{R,+} or beta_+ vanish.
EffectiveParams effective_params(const CircuitParams& p, double phi_ccjj, double phi_L,
                                 double phi_R);

/// Cell-centred samples of (phi_ccjj, phi_y) over (-pi, pi)^2, each checked at
/// every phi_q in `phi_q`.
struct FluxGrid {
  std::size_t n_ccjj = 50;
  std::size_t n_y = 50;
  std::vector<double> phi_q{-2.0, -0.5, 0.0, 0.7, 2.5};

  static std::vector<double> cell_centres(std::size_t n);
};

struct SimplificationReport {
  bool assumptions_hold = true;
  std::vector<std::string> violations;
  std::size_t points = 0;
  double max_beta_eff_deviation = 0;   // vs beta_+ cos(phi_ccjj / 2)
  double max_beta_lr_deviation = 0;    // vs 4 pi L_q I_c cos(phi_y / 2) / Phi_0
  double max_potential_deviation = 0;  // vs -U_q 8 pi L_q I_c cos cos cos / Phi_0

  double max_deviation() const;
};

/// Compares the full reduction against its closed form under equal critical
/// currents (I_c taken as their mean) and phi_L = phi_R = phi_y, with
/// phi_x <-> phi_ccjj and phi_z <-> phi_q. Violated assumptions are listed,
/// never silently accepted.
SimplificationReport verify_simplification(const CircuitParams& p, const FluxGrid& grid);

struct LoopFluxes {
  double q = 0, ccjj = 0, l = 0, r = 0;
};

/// sum_n U_n (phi_n - phi_n^x)^2 / 2 - U_q beta_eff cos(phi_q - phi_q^0).
double ccjj_potential(const CircuitParams& p, const LoopFluxes& phi);

/// Potential along phi_q with the other loop fluxes held at `fixed`.
std::vector<double> potential_1d(const CircuitParams& p, const LoopFluxes& fixed,
                                 const std::vector<double>& phi_q);

/// Rows follow phi_q, columns follow phi_ccjj.
Eigen::MatrixXd potential_2d(const CircuitParams& p, const LoopFluxes& fixed,
                             const std::vector<double>& phi_q,
                             const std::vector<double>& phi_ccjj);

/// sum_n U_n (phi_n - phi_n^x)^2 / 2 - U_q prod_n cos(alpha_n phi_n).
double heisenberg_potential(const CircuitParams& p, const std::array<double, 3>& phi);

/// Slice over (phi_1, phi_2) at fixed phi_3.
Eigen::MatrixXd heisenberg_potential_slice(const CircuitParams& p,
                                           const std::vector<double>& phi_1,
                                           const std::vector<double>& phi_2, double phi_3);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace holobus::flux
