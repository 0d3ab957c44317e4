#pragma once

#include <vector>

#include "duolind/fock.hpp"
#include "duolind/sim_config.hpp"
#include "duolind/superop.hpp"

namespace duolind {

// Non-Hermitian generator of the damped pair: -i g1 a1†a1 - i g2 a2†a2 + g (a1 a2† + a1† a2).
struct EffectiveHamiltonian {
  Matrix mat;
  TwoModeSpace space;
};

EffectiveHamiltonian effective_hamiltonian(const TwoModeSpace& space, const SimConfig& cfg);

enum class Regime { overdamped, underdamped, exceptional };

std::string regime_name(Regime r);

// Rotation angle xi = zeta + i tau pi/2 solving tanh(xi) = 2g / delta.
struct XiParameter {
  Regime regime = Regime::underdamped;
  double zeta = 0.0;
  int tau = 0;
  Complex xi;
};

// regime_tol is relative to g: | |delta| - 2g | <= regime_tol * g is exceptional.
XiParameter xi_parameter(double g, double delta, double regime_tol = 1e-6);

struct DiagonalizationResult {
  Regime regime = Regime::underdamped;
  Complex xi;
  Complex c_n;       // coefficient of the total number operator
  Complex c_x;       // residual exchange coefficient, ~0 by construction
  Complex c_z;       // coefficient of the population-difference operator
  int sign_branch = 1;  // sign of the root picked by the artanh evaluation
  Vector h_diag;     // c_n (n1+n2) + c_z (n2-n1)/2 over the flat basis
  TwoModeSpace space;
};

// Throws RegimeError in the exceptional regime (generator not diagonalizable).
DiagonalizationResult diagonalize(const SimConfig& cfg);

// Method::automatic resolves to diagonalized away from the exceptional
// region and to direct inside it.
Method resolve_method(const SimConfig& cfg);

struct Propagator {
  Matrix mat;
  double t = 0.0;
  Method path = Method::diagonalized;
  TwoModeSpace space;
};

Propagator propagator(const SimConfig& cfg, double t);

// Reusable propagator factory. Exponentials act on full total-photon blocks
// (built from the pair's angular-momentum representation) and are compressed
// to the kept basis afterwards, so both paths agree on every block.
class PropagatorPlan {
 public:
  explicit PropagatorPlan(const SimConfig& cfg);
  // Same, on a caller-built space (cfg.cutoff must match space.cutoff).
  PropagatorPlan(const SimConfig& cfg, const TwoModeSpace& space);

  Method path() const { return path_; }
  Regime regime() const { return regime_; }
  const TwoModeSpace& space() const { return space_; }

  // One propagator block per total photon number 0 .. 2*cutoff.
  std::vector<Matrix> block_propagators(double t) const;
  Matrix assemble(const std::vector<Matrix>& blocks) const;
  // U x U† using the block structure of U.
  Matrix sandwich(const std::vector<Matrix>& blocks, const Matrix& x) const;
  Matrix at(double t) const { return assemble(block_propagators(t)); }

  // Kernels reducing tr(F† U(t) X U(t)†) to sums over per-block eigenphases,
  // so a time sweep at fixed X costs no propagator rebuilds. Diagonalized
  // path only.
  struct OverlapKernels {
    std::vector<Vector> lam;             // full-block eigenvalues per block
    std::vector<std::vector<Matrix>> c;  // [functional][block_i * nb + block_j]
  };
  OverlapKernels overlap_kernels(const Matrix& x,
                                 const std::vector<Matrix>& functionals) const;
  std::vector<Complex> overlap_eval(const OverlapKernels& k, double t) const;

 private:
  struct Block {
    int n_total = 0;
    int kept_lo = 0;             // first kept r; basis state r of a block is (n1, n2) = (N - r, r)
    std::vector<int> flat;       // flat space index per kept r
    Matrix h_full;               // full-block generator
    Matrix rot, rot_inv;         // exp(±xi Jy) on the full block
    Vector h_rot;                // rotated diagonal generator over the full block
  };

  TwoModeSpace space_;
  Method path_ = Method::diagonalized;
  Regime regime_ = Regime::underdamped;
  std::vector<Block> blocks_;
};

// Frame maps of the closed-form solution. The decoupled frame evolves under
// the effective Hamiltonian alone.
Matrix to_decoupled_frame(const TwoModeSpace& space, const ThermalTransformParams& p,
                          const Matrix& rho, JSeriesInfo* raise_info = nullptr,
                          JSeriesInfo* lower_info = nullptr);
Matrix from_decoupled_frame(const TwoModeSpace& space, const ThermalTransformParams& p,
                            const Matrix& omega, JSeriesInfo* lower_info = nullptr,
                            JSeriesInfo* raise_info = nullptr);

struct EvolveInfo {
  Method path = Method::diagonalized;
  int working_cutoff = 0;       // internal truncation the pipeline ran at
  double pipeline_drift = 0.0;  // |trace - 1| on the working space
  double herm_defect = 0.0;     // on the working space, before symmetrization
  double trace_dev = 0.0;       // |trace - 1| of the returned state; population above the window
  double min_eig = 0.0;         // of the returned state
  double leakage = 0.0;         // population on the returned state's cutoff shell
  bool truncation_warning = false;
};

// Extra quanta of internal headroom the raising series needs to keep its
// edge error negligible at the given bath occupation. Zero bath, zero need.
int thermal_working_margin(double nbar);

// Largest total photon number whose entries carry weight above level_tol.
int support_total_photons(const TwoModeSpace& space, const Matrix& rho,
                          double level_tol = 1e-9);

// Population on the cutoff shell (n1 == cutoff or n2 == cutoff).
double shell_population(const TwoModeSpace& space, const Matrix& rho);

// Closed-form evolution: frame in, propagate, frame out. Runs on an enlarged
// working space when the bath is warm, then restricts the result to the
// config's space, so the returned trace may fall below one by exactly the
// population that escaped the window. Throws TruncationError when the
// working-space computation itself drifts past the trace or positivity
// tolerances.
DensityMatrix evolve(const DensityMatrix& rho0, double t, const SimConfig& cfg,
                     EvolveInfo* info = nullptr);

}  // namespace duolind
