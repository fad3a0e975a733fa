#include "holobus/flux_qubit.hpp"

#include "holobus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace holobus::flux {

namespace {

constexpr double kSingularCos = 1e-12;

// cos(x) * sqrt(1 + (ratio * tan(x))^2), finite at cos(x) = 0.
double scaled_cos(double x, double ratio) {
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double mag = std::sqrt(c * c + ratio * ratio * s * s);
  return c < 0.0 ? -mag : mag;
}

// arctan(ratio * tan(x)) on the principal branch.
double offset(double x, double ratio, const char* flux_name) {
  if (ratio == 0.0) return 0.0;
  if (std::abs(std::cos(x)) < kSingularCos) {
    throw DomainError(std::string("tangent of ") + flux_name +
                      "/2 is singular with a nonzero junction asymmetry");
  }
  return std::atan(ratio * std::tan(x));
}

double harmonic(const LoopParams& l, double phi) {
  const double d = phi - l.phi_x;
  return 0.5 * l.U * d * d;
}

}  // namespace

void CircuitParams::validate() const {
  if (!(L_q > 0.0)) throw ValidationError("L_q must be positive");
  if (!(phi0 > 0.0)) throw ValidationError("Phi_0 must be positive");
  for (double i : currents) {
    if (!(i > 0.0)) throw ValidationError("critical currents must be positive");
  }
  for (const auto& l : loops) {
    if (!(l.C > 0.0)) throw ValidationError("capacitances must be positive");
  }
  for (const auto& l : heisenberg_loops) {
    if (!(l.C > 0.0)) throw ValidationError("capacitances must be positive");
  }
}

EffectiveParams effective_params(const CircuitParams& p, double phi_ccjj, double phi_L,
                                 double phi_R) {
  p.validate();
  const double scale = 2.0 * M_PI * p.L_q / p.phi0;
  const auto& I = p.currents;

  EffectiveParams e;
  e.beta_L_plus = scale * (I[0] + I[1]);
  e.beta_L_minus = scale * (I[0] - I[1]);
  e.beta_R_plus = scale * (I[2] + I[3]);
  e.beta_R_minus = scale * (I[2] - I[3]);
  if (e.beta_L_plus == 0.0 || e.beta_R_plus == 0.0) throw DomainError("beta_{L(R),+} vanishes");

  const double r_L = e.beta_L_minus / e.beta_L_plus;
  const double r_R = e.beta_R_minus / e.beta_R_plus;
  e.phi_L0 = offset(phi_L / 2.0, r_L, "phi_L");
  e.phi_R0 = offset(phi_R / 2.0, r_R, "phi_R");
  e.beta_L = e.beta_L_plus * scaled_cos(phi_L / 2.0, r_L);
  e.beta_R = e.beta_R_plus * scaled_cos(phi_R / 2.0, r_R);

  e.beta_plus = e.beta_L + e.beta_R;
  e.beta_minus = e.beta_L - e.beta_R;
  if (e.beta_plus == 0.0) throw DomainError("beta_+ vanishes (phi_L, phi_R switch off both loops)");

  const double r = e.beta_minus / e.beta_plus;
  e.gamma = phi_ccjj - (e.phi_L0 - e.phi_R0);
  e.gamma0 = -offset(e.gamma / 2.0, r, "phi_ccjj");
  e.beta_eff = e.beta_plus * scaled_cos(e.gamma / 2.0, r);
  e.phi_q0 = 0.5 * (e.phi_L0 + e.phi_R0) + e.gamma0;
  return e;
}

std::vector<double> FluxGrid::cell_centres(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = -M_PI + (static_cast<double>(k) + 0.5) * 2.0 * M_PI / static_cast<double>(n);
  }
  return v;
}

double SimplificationReport::max_deviation() const {
  return std::max({max_beta_eff_deviation, max_beta_lr_deviation, max_potential_deviation});
}

SimplificationReport verify_simplification(const CircuitParams& p, const FluxGrid& grid) {
  p.validate();
  if (grid.n_ccjj == 0 || grid.n_y == 0 || grid.phi_q.empty()) {
    throw ValidationError("flux grid must be nonempty");
  }
  SimplificationReport report;
  const auto [lo, hi] = std::minmax_element(p.currents.begin(), p.currents.end());
  const double i_c = std::accumulate(p.currents.begin(), p.currents.end(), 0.0) / 4.0;
  const double spread = (*hi - *lo) / i_c;
  if (spread > 1e-12) {
    report.assumptions_hold = false;
    std::ostringstream msg;
    msg << "critical currents are not equal (relative spread " << spread << ")";
    report.violations.push_back(msg.str());
  }

  const double lr_prefactor = 4.0 * M_PI * p.L_q * i_c / p.phi0;
  const double full_prefactor = 8.0 * M_PI * p.L_q * i_c / p.phi0;
  for (double phi_ccjj : FluxGrid::cell_centres(grid.n_ccjj)) {
    for (double phi_y : FluxGrid::cell_centres(grid.n_y)) {
      const EffectiveParams e = effective_params(p, phi_ccjj, phi_y, phi_y);
      const double beta_lr = lr_prefactor * std::cos(phi_y / 2.0);
      const double beta_eff = 2.0 * beta_lr * std::cos(phi_ccjj / 2.0);
      report.max_beta_lr_deviation =
          std::max({report.max_beta_lr_deviation, std::abs(e.beta_L - beta_lr),
                    std::abs(e.beta_R - beta_lr)});
      report.max_beta_eff_deviation =
          std::max(report.max_beta_eff_deviation, std::abs(e.beta_eff - beta_eff));
      for (double phi_q : grid.phi_q) {
        const double full = -p.U_q * e.beta_eff * std::cos(phi_q - e.phi_q0);
        const double simple = -p.U_q * full_prefactor * std::cos(phi_y / 2.0) *
                              std::cos(phi_ccjj / 2.0) * std::cos(phi_q);
        report.max_potential_deviation =
            std::max(report.max_potential_deviation, std::abs(full - simple));
        ++report.points;
      }
    }
  }
  return report;
}

double ccjj_potential(const CircuitParams& p, const LoopFluxes& phi) {
  const EffectiveParams e = effective_params(p, phi.ccjj, phi.l, phi.r);
  return harmonic(p.loop(Loop::q), phi.q) + harmonic(p.loop(Loop::ccjj), phi.ccjj) +
         harmonic(p.loop(Loop::l), phi.l) + harmonic(p.loop(Loop::r), phi.r) -
         p.U_q * e.beta_eff * std::cos(phi.q - e.phi_q0);
}

std::vector<double> potential_1d(const CircuitParams& p, const LoopFluxes& fixed,
                                 const std::vector<double>& phi_q) {
  if (phi_q.empty()) throw ValidationError("potential range must be nonempty");
  const EffectiveParams e = effective_params(p, fixed.ccjj, fixed.l, fixed.r);
  const double rest = harmonic(p.loop(Loop::ccjj), fixed.ccjj) + harmonic(p.loop(Loop::l), fixed.l) +
                      harmonic(p.loop(Loop::r), fixed.r);
  std::vector<double> u;
  u.reserve(phi_q.size());
  for (double q : phi_q) {
    u.push_back(rest + harmonic(p.loop(Loop::q), q) - p.U_q * e.beta_eff * std::cos(q - e.phi_q0));
  }
  return u;
}

Eigen::MatrixXd potential_2d(const CircuitParams& p, const LoopFluxes& fixed,
                             const std::vector<double>& phi_q,
                             const std::vector<double>& phi_ccjj) {
  if (phi_q.empty() || phi_ccjj.empty()) throw ValidationError("potential range must be nonempty");
  Eigen::MatrixXd u(static_cast<Eigen::Index>(phi_q.size()),
                    static_cast<Eigen::Index>(phi_ccjj.size()));
  for (std::size_t j = 0; j < phi_ccjj.size(); ++j) {
    LoopFluxes f = fixed;
    f.ccjj = phi_ccjj[j];
    const auto column = potential_1d(p, f, phi_q);
    for (std::size_t i = 0; i < phi_q.size(); ++i) {
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = column[i];
    }
  }
  return u;
}

double heisenberg_potential(const CircuitParams& p, const std::array<double, 3>& phi) {
  double quadratic = 0.0;
  double product = 1.0;
  for (std::size_t n = 0; n < 3; ++n) {
    quadratic += harmonic(p.heisenberg_loops[n], phi[n]);
    product *= std::cos(p.alpha[n] * phi[n]);
  }
  return quadratic - p.U_q * product;
}

Eigen::MatrixXd heisenberg_potential_slice(const CircuitParams& p,
                                           const std::vector<double>& phi_1,
                                           const std::vector<double>& phi_2, double phi_3) {
  if (phi_1.empty() || phi_2.empty()) throw ValidationError("potential range must be nonempty");
  Eigen::MatrixXd u(static_cast<Eigen::Index>(phi_1.size()),
                    static_cast<Eigen::Index>(phi_2.size()));
  for (std::size_t i = 0; i < phi_1.size(); ++i) {
    for (std::size_t j = 0; j < phi_2.size(); ++j) {
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          heisenberg_potential(p, {phi_1[i], phi_2[j], phi_3});
    }
  }
  return u;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return v;
}

}  // namespace holobus::flux
