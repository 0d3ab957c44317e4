#include "duolind/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <utility>

#include <Eigen/Eigenvalues>

#include "duolind/solver.hpp"
#include "duolind/superop.hpp"

namespace duolind {

namespace {

void check_square(const TwoModeSpace& space, const Matrix& rho) {
  if (rho.rows() != space.dim || rho.cols() != space.dim)
    throw DimensionError("operand does not match the space dimension");
}

double real_overlap(const Matrix& functional, const Matrix& omega) {
  return functional.conjugate().cwiseProduct(omega).sum().real();
}

Complex overlap(const Matrix& functional, const Matrix& omega) {
  return functional.conjugate().cwiseProduct(omega).sum();
}

}  // namespace

double coincidence_rate(const TwoModeSpace& space, const Matrix& rho) {
  check_square(space, rho);
  const int idx = space.index(1, 1);
  return rho(idx, idx).real();
}

double mode_occupation(const TwoModeSpace& space, const Matrix& rho, int mode) {
  check_square(space, rho);
  if (mode != 1 && mode != 2) throw DomainError("mode must be 1 or 2");
  double occ = 0.0;
  for (int i = 0; i < space.dim; ++i) {
    const auto [n1, n2] = space.occupation(i);
    occ += ((mode == 1) ? n1 : n2) * rho(i, i).real();
  }
  return occ;
}

Diagnostics diagnostics(const TwoModeSpace& space, const Matrix& rho) {
  check_square(space, rho);
  Diagnostics d;
  const Complex tr = rho.trace();
  d.trace_dev = std::abs(tr - Complex(1.0));
  d.herm_defect = max_abs(rho - rho.adjoint());
  const Matrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  d.min_eig = es.eigenvalues().minCoeff();
  d.leakage = shell_population(space, sym);
  return d;
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw DimensionError("trace distance needs equal square matrices");
  const Matrix diff = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

std::vector<double> make_grid(double tmax, int points, const std::vector<double>& inject) {
  if (points < 1) throw ConfigError("grid needs at least one point");
  if (!(tmax >= 0.0)) throw ConfigError("grid extent must be nonnegative");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = (points == 1) ? 0.0 : tmax * i / static_cast<double>(points - 1);
  const double tol = 1e-12 * std::max(tmax, 1.0);
  for (double v : inject) {
    if (v < 0.0 || v > tmax + tol) continue;
    auto it = std::min_element(grid.begin(), grid.end(), [v](double a, double b) {
      return std::abs(a - v) < std::abs(b - v);
    });
    if (std::abs(*it - v) <= tol) {
      *it = v;
    } else {
      grid.insert(std::upper_bound(grid.begin(), grid.end(), v), v);
    }
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

CoincidenceGrid hom_sweep(const SimConfig& base, const HomSweepOptions& opt) {
  validate(base);
  if (base.g <= 0.0) throw ConfigError("sweep requires positive g");
  if (base.cutoff < 4)
    throw ConfigError("sweep starts from one photon per mode and needs cutoff >= 4");
  if (opt.tpoints < 1 || opt.gamma1_points < 1)
    throw ConfigError("sweep grids need at least one point");
  const double tmax = (opt.tmax < 0.0) ? std::acos(-1.0) / base.g : opt.tmax;
  const double gmax = (opt.gamma1_max < 0.0) ? base.g : opt.gamma1_max;
  const double dip_time = std::acos(-1.0) / (4.0 * base.g);

  CoincidenceGrid out;
  out.base = base;
  out.times = make_grid(tmax, opt.tpoints, {dip_time});
  out.gamma1s = make_grid(gmax, opt.gamma1_points);
  const int nt = static_cast<int>(out.times.size());
  const int ng = static_cast<int>(out.gamma1s.size());
  out.p11.resize(nt, ng);
  out.valid.resize(nt, ng);
  out.columns.resize(ng);

  // Cells are computed on the enlarged working space; reported quantities
  // refer to the user's window.
  const TwoModeSpace user_space = build_space(base.cutoff);
  const int work_cutoff = base.cutoff + thermal_working_margin(base.nbar);
  const bool padded = work_cutoff != base.cutoff;
  const TwoModeSpace space =
      padded ? build_space(work_cutoff, std::size_t{1} << 62) : user_space;
  SimConfig wbase = base;
  wbase.cutoff = work_cutoff;
  const ThermalTransformParams params =
      thermal_params(base.nbar, base.gamma1, base.gamma2);
  const DensityMatrix rho0 = density_from_state(number_state(space, 1, 1));

  JSeriesInfo in_raise, in_lower;
  const Matrix omega0 = to_decoupled_frame(space, params, rho0.mat, &in_raise, &in_lower);

  // Observables are pulled back to the decoupled frame once; each grid cell
  // then needs only overlaps against the propagated pair state.
  const auto pull_back = [&](const Matrix& target) {
    const Matrix lowered = exp_j_sum(space, JSign::minus, -params.eta_plus, target);
    return exp_j_sum(space, JSign::plus, -params.chi, lowered);
  };
  const int pair_idx = space.index(1, 1);
  Matrix pair_proj = Matrix::Zero(space.dim, space.dim);
  pair_proj(pair_idx, pair_idx) = 1.0;
  Matrix shell_proj = Matrix::Zero(space.dim, space.dim);
  for (int i = 0; i < space.dim; ++i) {
    const auto [n1, n2] = space.occupation(i);
    if (n1 <= base.cutoff && n2 <= base.cutoff &&
        (n1 == base.cutoff || n2 == base.cutoff))
      shell_proj(i, i) = 1.0;
  }
  const Matrix f_pair = pull_back(pair_proj);
  const Matrix f_trace = pull_back(Matrix::Identity(space.dim, space.dim));
  const Matrix f_shell = pull_back(shell_proj);

  const auto run_column = [&](int gi) {
    SimConfig cfg = wbase;
    cfg.gamma1 = out.gamma1s[gi];
    const PropagatorPlan plan(cfg, space);
    ColumnDiagnostics& col = out.columns[gi];
    col.gamma1 = cfg.gamma1;
    col.truncation_warning = in_raise.truncation_warning;
    const bool fast = plan.path() == Method::diagonalized;
    PropagatorPlan::OverlapKernels kernels;
    if (fast) kernels = plan.overlap_kernels(omega0, {f_pair, f_trace, f_shell});
    for (int ti = 0; ti < nt; ++ti) {
      double p11, trace_dev, leak;
      if (fast) {
        const auto vals = plan.overlap_eval(kernels, out.times[ti]);
        p11 = vals[0].real();
        trace_dev = std::abs(vals[1] - Complex(1.0));
        leak = vals[2].real();
      } else {
        const Matrix omega_t =
            plan.sandwich(plan.block_propagators(out.times[ti]), omega0);
        p11 = real_overlap(f_pair, omega_t);
        trace_dev = std::abs(overlap(f_trace, omega_t) - Complex(1.0));
        leak = real_overlap(f_shell, omega_t);
      }
      out.p11(ti, gi) = p11;
      out.valid(ti, gi) = (trace_dev <= 1e-6) ? 1 : 0;
      col.max_trace_dev = std::max(col.max_trace_dev, trace_dev);
      col.max_leakage = std::max(col.max_leakage, leak);
    }
    JSeriesInfo out_lower, out_raise;
    const Matrix omega_final =
        plan.sandwich(plan.block_propagators(out.times[nt - 1]), omega0);
    Matrix rho_t = from_decoupled_frame(space, params, omega_final, &out_lower, &out_raise);
    rho_t = 0.5 * (rho_t + rho_t.adjoint()).eval();
    if (padded) rho_t = restrict_state(space, user_space, rho_t);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_t, Eigen::EigenvaluesOnly);
    col.min_eig_final = es.eigenvalues().minCoeff();
    col.truncation_warning = col.truncation_warning || out_raise.truncation_warning;
  };

  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (int gi = 0; gi < ng; ++gi) run_column(gi);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < std::min(jobs, ng); ++w)
      pool.emplace_back([&] {
        for (int gi = next.fetch_add(1); gi < ng; gi = next.fetch_add(1)) run_column(gi);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace duolind
