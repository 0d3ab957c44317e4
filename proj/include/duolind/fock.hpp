#pragma once

#include <cstddef>
#include <utility>

#include "duolind/types.hpp"

namespace duolind {

// Default ceiling on the memory a brute-force check matrix (dim^2 x dim^2)
// may claim. Generous on purpose: it only guards absurd cutoffs; the
// brute-force builder applies its own, tighter budget.
inline constexpr std::size_t kDefaultCheckMatrixBudget = std::size_t{64} << 30;

// Two bosonic modes, each truncated at `cutoff` quanta.
// Flat basis index is row-major: n1 * (cutoff + 1) + n2.
struct TwoModeSpace {
  int cutoff = 0;
  int dim_per_mode = 1;
  int dim = 1;
  std::size_t check_matrix_budget = kDefaultCheckMatrixBudget;

  int index(int n1, int n2) const;
  std::pair<int, int> occupation(int idx) const;
  int total_photons(int idx) const;
  bool same_as(const TwoModeSpace& other) const { return cutoff == other.cutoff; }
};

TwoModeSpace build_space(int cutoff,
                         std::size_t check_matrix_budget = kDefaultCheckMatrixBudget);

// Dense operator tagged with the space it acts on.
struct OperatorMatrix {
  Matrix mat;
  TwoModeSpace space;
};

OperatorMatrix annihilator(const TwoModeSpace& space, int mode);
OperatorMatrix creator(const TwoModeSpace& space, int mode);

// Total number plus the angular-momentum triple built from the two modes.
struct SchwingerSet {
  OperatorMatrix n_total;
  OperatorMatrix jx;
  OperatorMatrix jy;
  OperatorMatrix jz;
};

SchwingerSet schwinger_operators(const TwoModeSpace& space);

struct StateVector {
  Vector amp;
  TwoModeSpace space;
};

StateVector number_state(const TwoModeSpace& space, int n1, int n2);

struct DensityMatrix {
  Matrix mat;
  TwoModeSpace space;
};

// Enforces the construction invariants: Hermiticity defect <= herm_tol,
// |trace - 1| <= trace_tol, min eigenvalue >= eig_floor. Throws ValidationError.
DensityMatrix density_from_matrix(const TwoModeSpace& space, Matrix mat,
                                  double herm_tol = 1e-12, double trace_tol = 1e-10,
                                  double eig_floor = -1e-10);

DensityMatrix density_from_state(const StateVector& psi);

// Truncated product of two geometric distributions, renormalized to unit trace.
DensityMatrix thermal_state(const TwoModeSpace& space, double nbar);

// Zero-padded copy of rho on a larger space; exact (no information lost).
Matrix embed_state(const TwoModeSpace& from, const TwoModeSpace& into, const Matrix& rho);

// Sub-block of rho on a smaller space. Trace of the result may fall below one;
// the deficit is the population outside the smaller window.
Matrix restrict_state(const TwoModeSpace& from, const TwoModeSpace& into, const Matrix& rho);

// Largest per-mode occupation whose marginal population exceeds level_tol.
int support_max_occupation(const TwoModeSpace& space, const Matrix& rho,
                           double level_tol = 1e-9);

}  // namespace duolind
