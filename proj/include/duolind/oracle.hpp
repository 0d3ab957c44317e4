#pragma once

#include <vector>

#include "duolind/fock.hpp"
#include "duolind/sim_config.hpp"

namespace duolind {

// Brute-force reference integrator. Shares only the fock operator builders
// with the closed-form path; its right-hand side is assembled independently.
struct IntegratorConfig {
  double dt = 0.0;               // <= 0 picks 1e-3 / max(g, gamma1, gamma2, g*nbar, 1)
  long max_steps = 20'000'000;   // guard; IntegrationError past this
  double tail_budget = 1e-8;     // allowed thermal population beyond the working window
};

double default_time_step(const SimConfig& cfg);

// Smallest truncation whose stationary thermal tail stays within tail_budget;
// never below cfg.cutoff, capped at cfg.cutoff + 6.
int integration_working_cutoff(const SimConfig& cfg, double tail_budget = 1e-8);

Matrix integrate(const DensityMatrix& rho0, double t, const SimConfig& cfg,
                 IntegratorConfig ic = {});

// One pass over an ascending time grid; returns the state at each grid point.
std::vector<Matrix> integrate_snapshots(const DensityMatrix& rho0,
                                        const std::vector<double>& times,
                                        const SimConfig& cfg, IntegratorConfig ic = {});

// Column-stacked dim^2 x dim^2 matrix of the master-equation generator.
struct VectorizedLiouvillian {
  Matrix mat;
  TwoModeSpace space;
};

VectorizedLiouvillian liouvillian_matrix(const SimConfig& cfg);

// Second reference route: matrix exponential of the vectorized generator.
Matrix expm_evolve(const DensityMatrix& rho0, double t, const SimConfig& cfg);

}  // namespace duolind
