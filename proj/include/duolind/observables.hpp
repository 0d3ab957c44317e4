#pragma once

#include <cstdint>
#include <vector>

#include "duolind/fock.hpp"
#include "duolind/sim_config.hpp"

namespace duolind {

// Re <1,1| rho |1,1>. Requires cutoff >= 1.
double coincidence_rate(const TwoModeSpace& space, const Matrix& rho);

// Tr(a†a rho) for the given mode.
double mode_occupation(const TwoModeSpace& space, const Matrix& rho, int mode);

struct Diagnostics {
  double trace_dev = 0.0;
  double herm_defect = 0.0;
  double min_eig = 0.0;
  double leakage = 0.0;
};

Diagnostics diagnostics(const TwoModeSpace& space, const Matrix& rho);

// (1/2) * trace norm of (a - b); both arguments Hermitian.
double trace_distance(const Matrix& a, const Matrix& b);

// Uniform grid of `points` values over [0, tmax] with `inject` values placed
// bit-exactly (replacing any grid neighbor closer than 1e-12 * max(tmax, 1)).
std::vector<double> make_grid(double tmax, int points, const std::vector<double>& inject = {});

struct ColumnDiagnostics {
  double gamma1 = 0.0;
  double max_trace_dev = 0.0;     // worst cell of the column
  double max_leakage = 0.0;       // worst cell of the column
  double min_eig_final = 0.0;     // positivity check at the last time point
  bool truncation_warning = false;
};

// Interference-dip sweep: coincidence of |1,1> over a (t, gamma1) grid.
struct CoincidenceGrid {
  std::vector<double> times;      // ascending, contains pi/(4g) exactly
  std::vector<double> gamma1s;    // ascending
  Eigen::MatrixXd p11;            // times.size() x gamma1s.size()
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> valid;
  std::vector<ColumnDiagnostics> columns;
  SimConfig base;                 // gamma1 field holds the column value per cell
};

struct HomSweepOptions {
  double tmax = -1.0;     // < 0 picks pi / g
  int tpoints = 201;
  double gamma1_max = -1.0;  // < 0 picks g
  int gamma1_points = 101;
  int jobs = 1;
};

// Evolves |1,1><1,1| across the grid. Cells where the result drifts past the
// solver tolerances are marked invalid instead of aborting the sweep.
CoincidenceGrid hom_sweep(const SimConfig& base, const HomSweepOptions& opt = {});

}  // namespace duolind
