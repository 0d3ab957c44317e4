#pragma once

#include "duolind/fock.hpp"
#include "duolind/sim_config.hpp"

namespace duolind {

// J- rho = 2 a rho a†   (emission side)
// J+ rho = 2 a† rho a   (absorption side)
enum class JSign { minus, plus };

// Parameters of the two-step similarity transform that maps the damped
// dynamics onto a pure non-Hermitian-Hamiltonian evolution.
struct ThermalTransformParams {
  double nbar = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double eta_plus = 0.0;    // root that cancels the upward-noise term
  double eta_minus = -0.5;  // companion root
  double chi = 0.5;         // (1 + nbar) / 2
  double f_plus = 1.0;      // scale factor at eta_plus, +1
  double f_minus = -1.0;    // scale factor at eta_minus, -1
  double gain_plus = 0.0;   // residual pump rate at eta_plus, 0
  double gain_minus = 0.0;  // residual pump rate at eta_minus, -2(gamma1+gamma2)
};

ThermalTransformParams thermal_params(double nbar, double gamma1, double gamma2);

// Residual of the defining quadratic for eta; ~0 at both roots.
double eta_quadratic_residual(double nbar, double eta);

Matrix apply_j(const TwoModeSpace& space, JSign sign, int mode, const Matrix& rho);

// L rho = a†a rho + rho a†a  (anticommutator with the mode number operator).
Matrix apply_l(const TwoModeSpace& space, int mode, const Matrix& rho);

// S rho = [a1 a2† + a1† a2, rho]  (exchange commutator).
Matrix apply_s(const TwoModeSpace& space, const Matrix& rho);

struct JSeriesInfo {
  int terms = 0;                 // retained series terms past the zeroth
  double last_term_ratio = 0.0;  // |last nonzero term| / |result|, max norm
  bool truncation_warning = false;
};

// exp(coeff * (J1 + J2)) rho as a finite series; both signs terminate exactly
// on the truncated space. For the raising sign the termination is an artifact
// of the cutoff, so a last-term ratio above 1e-10 sets the warning flag.
Matrix exp_j_sum(const TwoModeSpace& space, JSign sign, double coeff,
                 const Matrix& rho, JSeriesInfo* info = nullptr);

// Right-hand side of the damped-pair master equation.
Matrix lindblad_generator(const TwoModeSpace& space, const SimConfig& cfg,
                          const Matrix& rho);

}  // namespace duolind
