#include "duolind/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "duolind/fock.hpp"
#include "duolind/observables.hpp"
#include "duolind/oracle.hpp"
#include "duolind/solver.hpp"
#include "duolind/superop.hpp"

namespace duolind::verify {

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  Timer() : start_(Clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  Clock::time_point start_;
};

Check residual_check(const std::string& name, double observed, double threshold,
                     const Options& opt, std::string detail = {}) {
  Check c;
  c.name = name;
  c.observed = observed;
  c.threshold = opt.tol_override.value_or(threshold);
  c.pass = observed <= c.threshold;
  c.detail = std::move(detail);
  return c;
}

Check strict_check(const std::string& name, double observed, double threshold,
                   std::string detail = {}) {
  Check c;
  c.name = name;
  c.observed = observed;
  c.threshold = threshold;
  c.larger_is_better = true;
  c.pass = observed > threshold;
  c.detail = std::move(detail);
  return c;
}

void finish(Suite& s, const Timer& timer) {
  s.pass = true;
  for (const Check& c : s.checks) s.pass = s.pass && c.pass;
  s.seconds = timer.seconds();
}

Matrix random_hermitian(const TwoModeSpace& space, int max_total,
                        std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m = Matrix::Zero(space.dim, space.dim);
  for (int i = 0; i < space.dim; ++i) {
    if (space.total_photons(i) > max_total) continue;
    for (int j = 0; j < space.dim; ++j) {
      if (space.total_photons(j) > max_total) continue;
      m(i, j) = Complex(u(gen), u(gen));
    }
  }
  return 0.5 * (m + m.adjoint()).eval();
}

Matrix random_mixture(const TwoModeSpace& space, int max_total,
                      std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> uw(0.2, 0.8);
  Matrix rho = Matrix::Zero(space.dim, space.dim);
  const double w = uw(gen);
  for (int pick = 0; pick < 2; ++pick) {
    Vector psi = Vector::Zero(space.dim);
    for (int i = 0; i < space.dim; ++i)
      if (space.total_photons(i) <= max_total) psi(i) = Complex(u(gen), u(gen));
    psi.normalize();
    rho += ((pick == 0) ? w : 1.0 - w) * (psi * psi.adjoint());
  }
  return rho;
}

double pi() { return std::acos(-1.0); }

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

Suite run_hom_dip(const Options& opt) {
  Timer timer;
  Suite s;
  s.name = "hom-dip";
  SimConfig cfg;
  cfg.g = 1.0;
  cfg.cutoff = 4;
  const TwoModeSpace space = build_space(cfg.cutoff);
  const DensityMatrix rho0 = density_from_state(number_state(space, 1, 1));
  EvolveInfo info;
  const DensityMatrix rho = evolve(rho0, pi() / 4.0, cfg, &info);
  const double p11 = coincidence_rate(space, rho.mat);
  s.checks.push_back(residual_check("coincidence-at-dip", p11, 1e-8, opt,
                                    "lossless pair interference at t = pi/4g"));
  s.checks.push_back(
      residual_check("trace-intact", info.trace_dev, 1e-10, opt));
  finish(s, timer);
  return s;
}

Suite run_hom_thermal(const Options& opt) {
  Timer timer;
  Suite s;
  s.name = "hom-thermal";
  SimConfig base;
  base.g = 1.0;
  base.cutoff = 6;
  HomSweepOptions sweep_opt;
  sweep_opt.jobs = opt.jobs;
  base.nbar = 0.0;
  const CoincidenceGrid cold = hom_sweep(base, sweep_opt);
  base.nbar = 0.01;
  const CoincidenceGrid warm = hom_sweep(base, sweep_opt);

  const double t_half = pi() / 2.0 + 1e-9;
  const int nt = static_cast<int>(warm.times.size());
  const int ng = static_cast<int>(warm.gamma1s.size());
  double floor_min = 1e300;
  double gap_min = 1e300;
  int invalid = 0;
  for (int gi = 0; gi < ng; ++gi) {
    double m_cold = 1e300, m_warm = 1e300;
    for (int ti = 0; ti < nt; ++ti) {
      if (warm.times[ti] > t_half) break;
      m_cold = std::min(m_cold, cold.p11(ti, gi));
      m_warm = std::min(m_warm, warm.p11(ti, gi));
      invalid += (cold.valid(ti, gi) == 0) + (warm.valid(ti, gi) == 0);
    }
    // At gamma1 = gamma2 = 0 no bath term survives and both dips are exactly
    // zero; the filled-dip comparison is meaningful on coupled columns only.
    if (warm.gamma1s[gi] == 0.0 && warm.base.gamma2 == 0.0) continue;
    floor_min = std::min(floor_min, m_warm);
    gap_min = std::min(gap_min, m_warm - m_cold);
  }
  s.checks.push_back(strict_check("thermal-floor-positive", floor_min, 0.0,
                                  "smallest coincidence with nbar = 0.01"));
  s.checks.push_back(strict_check("thermal-above-lossless", gap_min, 0.0,
                                  "dip filling at every coupled damping value"));

  // First local minimum of the warm trace at gamma1 = g/2 arrives early.
  int gi_half = 0;
  for (int gi = 0; gi < ng; ++gi)
    if (std::abs(warm.gamma1s[gi] - 0.5) < std::abs(warm.gamma1s[gi_half] - 0.5))
      gi_half = gi;
  double t_first = warm.times[nt - 1];
  for (int ti = 1; ti + 1 < nt; ++ti) {
    if (warm.p11(ti, gi_half) < warm.p11(ti - 1, gi_half) &&
        warm.p11(ti, gi_half) <= warm.p11(ti + 1, gi_half)) {
      t_first = warm.times[ti];
      break;
    }
  }
  Check first_min;
  first_min.name = "first-min-not-late";
  first_min.observed = t_first;
  first_min.threshold = pi() / 4.0;
  first_min.pass = t_first <= first_min.threshold + 1e-9;
  first_min.detail = "first local minimum at gamma1/g = 0.5";
  s.checks.push_back(first_min);

  Check valid_cells;
  valid_cells.name = "cells-valid";
  valid_cells.observed = invalid;
  valid_cells.threshold = 0.0;
  valid_cells.pass = invalid == 0;
  valid_cells.detail = "invalid grid cells up to t = pi/2g";
  s.checks.push_back(valid_cells);
  finish(s, timer);
  return s;
}

Suite run_oracle_equivalence(const Options& opt) {
  Timer timer;
  Suite s;
  s.name = "oracle";
  std::mt19937_64 gen(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double nbars[3] = {0.0, 0.01, 0.2};
  const std::vector<double> times = {0.3, 1.0, 3.0};
  double worst = 0.0;
  std::string worst_detail;
  for (int k = 0; k < 20; ++k) {
    SimConfig cfg;
    cfg.g = 1.0;
    cfg.gamma1 = u01(gen);
    cfg.gamma2 = u01(gen);
    cfg.nbar = nbars[k % 3];
    cfg.cutoff = 6;
    const TwoModeSpace space = build_space(cfg.cutoff);
    const DensityMatrix rho0{random_mixture(space, 2, gen), space};
    const std::vector<Matrix> ref = integrate_snapshots(rho0, times, cfg);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const DensityMatrix sol = evolve(rho0, times[ti], cfg);
      const double dist = trace_distance(sol.mat, ref[ti]);
      if (dist > worst) {
        worst = dist;
        worst_detail = "config " + std::to_string(k) + " at t = " +
                       std::to_string(times[ti]);
      }
    }
  }
  s.checks.push_back(residual_check("solver-vs-integrator", worst, 1e-6, opt,
                                    worst_detail));
  finish(s, timer);
  return s;
}

Suite run_superop_algebra(const Options& opt) {
  Timer timer;
  Suite s;
  s.name = "algebra";
  SimConfig cfg;
  cfg.g = 0.7;
  cfg.gamma1 = 0.3;
  cfg.gamma2 = 0.5;
  cfg.nbar = 0.2;
  cfg.cutoff = 6;
  const TwoModeSpace space = build_space(cfg.cutoff);
  std::mt19937_64 gen(opt.seed);
  double ladder_comm = 0.0, number_shift = 0.0, coupling_comm = 0.0;
  double pair_algebra = 0.0, traceless = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Matrix x = random_hermitian(space, space.cutoff - 1, gen);
    for (int mode = 1; mode <= 2; ++mode) {
      const auto jm = [&](const Matrix& y) { return apply_j(space, JSign::minus, mode, y); };
      const auto jp = [&](const Matrix& y) { return apply_j(space, JSign::plus, mode, y); };
      const auto ln = [&](const Matrix& y) { return apply_l(space, mode, y); };
      // [J-, J+] = 4(L + 1)
      ladder_comm = std::max(ladder_comm,
          max_abs(jm(jp(x)) - jp(jm(x)) - 4.0 * (ln(x) + x)));
      // [L, J±] = ∓2 J±  (lowering removes, raising adds one quantum per side)
      number_shift = std::max(number_shift,
          max_abs(ln(jm(x)) - jm(ln(x)) + 2.0 * jm(x)));
      number_shift = std::max(number_shift,
          max_abs(ln(jp(x)) - jp(ln(x)) - 2.0 * jp(x)));
      // su(1,1) closure: [A+, A-] = -2 A0 with A± = J±/2, A0 = (L + 1)/2
      pair_algebra = std::max(pair_algebra,
          max_abs(0.25 * (jp(jm(x)) - jm(jp(x))) + (ln(x) + x)));
    }
    // Mode-summed ladder maps commute with the coupling commutator.
    const auto jsum = [&](JSign sign, const Matrix& y) {
      return (apply_j(space, sign, 1, y) + apply_j(space, sign, 2, y)).eval();
    };
    for (JSign sign : {JSign::minus, JSign::plus})
      coupling_comm = std::max(coupling_comm,
          max_abs(jsum(sign, apply_s(space, x)) - apply_s(space, jsum(sign, x))));
    traceless = std::max(traceless,
        std::abs(lindblad_generator(space, cfg, x).trace()));
  }
  s.checks.push_back(residual_check("ladder-commutator", ladder_comm, 1e-10, opt));
  s.checks.push_back(residual_check("number-shift", number_shift, 1e-10, opt));
  s.checks.push_back(residual_check("coupling-commutes", coupling_comm, 1e-10, opt));
  s.checks.push_back(residual_check("pair-algebra", pair_algebra, 1e-10, opt));
  s.checks.push_back(residual_check("generator-traceless", traceless, 1e-10, opt));
  finish(s, timer);
  return s;
}

Suite run_transform_params(const Options& opt) {
  Timer timer;
  Suite s;
  s.name = "params";
  const double nbars[] = {0.0, 1e-3, 0.01, 0.5, 2.0};
  double quad = 0.0, fvals = 0.0, gain_plus = 0.0, gain_minus = 0.0, chi = 0.0;
  for (double nbar : nbars) {
    const ThermalTransformParams p = thermal_params(nbar, 0.3, 0.7);
    quad = std::max({quad, std::abs(eta_quadratic_residual(nbar, p.eta_plus)),
                     std::abs(eta_quadratic_residual(nbar, p.eta_minus))});
    fvals = std::max({fvals, std::abs(p.f_plus - 1.0), std::abs(p.f_minus + 1.0)});
    gain_plus = std::max(gain_plus, std::abs(p.gain_plus));
    gain_minus = std::max(gain_minus,
                          std::abs(p.gain_minus + 2.0 * (p.gamma1 + p.gamma2)));
    chi = std::max(chi, std::abs(p.chi - 0.5 * (1.0 + nbar)));
  }
  s.checks.push_back(residual_check("branch-roots", quad, 1e-12, opt));
  s.checks.push_back(residual_check("branch-normalization", fvals, 1e-12, opt));
  s.checks.push_back(residual_check("gain-free-branch", gain_plus, 1e-12, opt));
  s.checks.push_back(residual_check("gain-full-branch", gain_minus, 1e-12, opt));
  s.checks.push_back(residual_check("lowering-weight", chi, 1e-12, opt));
  finish(s, timer);
  return s;
}

Suite run_diagonalization(const Options& opt) {
  Timer timer;
  Suite s;
  s.name = "diagonalization";
  const double deltas[] = {3.0, 1.0, 0.5, 0.0};
  double cx = 0.0, spectra = 0.0;
  for (double delta : deltas) {
    SimConfig cfg;
    cfg.g = 1.0;
    cfg.gamma1 = 0.2;
    cfg.gamma2 = 0.2 + delta;
    cfg.cutoff = 6;
    const DiagonalizationResult d = diagonalize(cfg);
    cx = std::max(cx, std::abs(d.c_x));
    const TwoModeSpace space = d.space;
    const Matrix h = effective_hamiltonian(space, cfg).mat;
    for (int n = 0; n <= space.cutoff; ++n) {
      std::vector<int> flat;
      for (int r = 0; r <= n; ++r) flat.push_back(space.index(n - r, r));
      const int k = static_cast<int>(flat.size());
      Matrix block(k, k);
      for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) block(p, q) = h(flat[p], flat[q]);
      Eigen::ComplexEigenSolver<Matrix> es(block, false);
      std::vector<Complex> got(es.eigenvalues().data(), es.eigenvalues().data() + k);
      // Greedy eigenvalue pairing; stable against roundoff along either axis.
      for (int r = 0; r <= n; ++r) {
        const Complex want = d.c_n * static_cast<double>(n) + d.c_z * (r - 0.5 * n);
        std::size_t best = 0;
        for (std::size_t q = 1; q < got.size(); ++q)
          if (std::abs(got[q] - want) < std::abs(got[best] - want)) best = q;
        spectra = std::max(spectra, std::abs(got[best] - want));
        got.erase(got.begin() + static_cast<std::ptrdiff_t>(best));
      }
    }
  }
  s.checks.push_back(residual_check("rotated-coupling-vanishes", cx, 1e-10, opt));
  s.checks.push_back(residual_check("block-spectra", spectra, 1e-9, opt));

  {
    SimConfig cfg;
    cfg.g = 1.0;
    cfg.gamma1 = 0.2;
    cfg.gamma2 = 0.7;
    cfg.cutoff = 6;
    cfg.method = Method::diagonalized;
    const Propagator pd = propagator(cfg, 1.3);
    cfg.method = Method::direct;
    const Propagator px = propagator(cfg, 1.3);
    s.checks.push_back(residual_check("path-agreement",
                                      max_abs(pd.mat - px.mat), 1e-9, opt));
  }

  {
    // Continuity across the non-diagonalizable line, evolved the direct way.
    double p[3];
    const double offsets[] = {-1e-3, 0.0, 1e-3};
    for (int k = 0; k < 3; ++k) {
      SimConfig cfg;
      cfg.g = 1.0;
      cfg.gamma1 = 0.2;
      cfg.gamma2 = 0.2 + 2.0 * cfg.g + offsets[k];
      cfg.cutoff = 6;
      cfg.method = Method::direct;
      const TwoModeSpace space = build_space(cfg.cutoff);
      const DensityMatrix rho0 = density_from_state(number_state(space, 1, 1));
      const DensityMatrix rho = evolve(rho0, 1.0, cfg);
      p[k] = coincidence_rate(space, rho.mat);
    }
    const double jump = std::max(std::abs(p[0] - p[1]), std::abs(p[2] - p[1]));
    s.checks.push_back(residual_check("critical-line-continuity", jump, 1e-2, opt));

    SimConfig cfg;
    cfg.g = 1.0;
    cfg.gamma1 = 0.2;
    cfg.gamma2 = 0.2 + 2.0 * cfg.g;
    cfg.cutoff = 6;
    bool refused = false;
    try {
      diagonalize(cfg);
    } catch (const RegimeError&) {
      refused = true;
    }
    Check c;
    c.name = "critical-line-refusal";
    c.observed = refused ? 1.0 : 0.0;
    c.threshold = 1.0;
    c.pass = refused;
    c.detail = "closed-form split must refuse |delta| = 2g";
    s.checks.push_back(c);
  }
  finish(s, timer);
  return s;
}

Suite run_conjugation(const Options& opt) {
  Timer timer;
  Suite s;
  s.name = "conjugation";
  struct Case {
    double nbar;
    int cutoff;
    int samples;
  };
  // Cutoffs chosen so the truncation tail of the frame map sits below the
  // tolerance; the residual shrinks roughly ninefold per two extra levels.
  const Case cases[] = {{0.0, 6, 3}, {0.01, 10, 3}, {0.5, 26, 2}};
  std::mt19937_64 gen(opt.seed);
  for (const Case& cs : cases) {
    SimConfig cfg;
    cfg.g = 1.0;
    cfg.gamma1 = 0.3;
    cfg.gamma2 = 0.55;
    cfg.nbar = cs.nbar;
    cfg.cutoff = cs.cutoff;
    const TwoModeSpace space = build_space(cs.cutoff, std::size_t{1} << 62);
    const ThermalTransformParams p = thermal_params(cfg.nbar, cfg.gamma1, cfg.gamma2);
    const Eigen::SparseMatrix<Complex> h =
        effective_hamiltonian(space, cfg).mat.sparseView();
    const Eigen::SparseMatrix<Complex> h_adj =
        Eigen::SparseMatrix<Complex>(h.adjoint());
    double worst = 0.0;
    for (int k = 0; k < cs.samples; ++k) {
      // Draw the sample in the decoupled frame and compare in the lab frame.
      // Both sides then agree with the untruncated identity up to the tail
      // beyond the cutoff; the reverse composition would push that tail
      // through the lowering exponential, which amplifies it exponentially.
      const Matrix omega = random_hermitian(space, 2, gen);
      const Matrix rho = from_decoupled_frame(space, p, omega);
      const Matrix lhs = lindblad_generator(space, cfg, rho);
      const Matrix komega = Complex(0.0, -1.0) * (h * omega - omega * h_adj);
      const Matrix rhs = from_decoupled_frame(space, p, komega);
      worst = std::max(worst, max_abs(lhs - rhs));
    }
    s.checks.push_back(residual_check("decoupling-nbar-" + short_number(cs.nbar),
                                      worst, 1e-8, opt,
                                      "cutoff " + std::to_string(cs.cutoff)));
  }
  finish(s, timer);
  return s;
}

Suite run_thermalization(const Options& opt) {
  Timer timer;
  Suite s;
  s.name = "thermalization";
  SimConfig cfg;
  cfg.g = 1.0;
  cfg.gamma1 = 0.5;
  cfg.gamma2 = 0.5;
  cfg.nbar = 0.2;
  cfg.cutoff = 8;
  const TwoModeSpace space = build_space(cfg.cutoff);
  const DensityMatrix rho0 = density_from_state(number_state(space, 1, 1));
  EvolveInfo info;
  const DensityMatrix rho = evolve(rho0, 40.0, cfg, &info);
  const double occ1 = mode_occupation(space, rho.mat, 1);
  const double occ2 = mode_occupation(space, rho.mat, 2);
  const DensityMatrix target = thermal_state(space, cfg.nbar);
  const double dist = trace_distance(rho.mat, target.mat);
  s.checks.push_back(
      residual_check("mode-1-occupation", std::abs(occ1 - cfg.nbar), 1e-3, opt));
  s.checks.push_back(
      residual_check("mode-2-occupation", std::abs(occ2 - cfg.nbar), 1e-3, opt));
  s.checks.push_back(residual_check("distance-to-thermal", dist, 1e-3, opt,
                                    "late-time state vs product thermal state"));
  finish(s, timer);
  return s;
}

std::vector<std::string> suite_names() {
  return {"hom-dip", "hom-thermal", "oracle", "algebra",
          "params", "diagonalization", "conjugation", "thermalization"};
}

Suite run_suite(const std::string& name, const Options& opt) {
  if (name == "hom-dip") return run_hom_dip(opt);
  if (name == "hom-thermal") return run_hom_thermal(opt);
  if (name == "oracle") return run_oracle_equivalence(opt);
  if (name == "algebra") return run_superop_algebra(opt);
  if (name == "params") return run_transform_params(opt);
  if (name == "diagonalization") return run_diagonalization(opt);
  if (name == "conjugation") return run_conjugation(opt);
  if (name == "thermalization") return run_thermalization(opt);
  throw ConfigError("unknown verification suite '" + name + "'");
}

}  // namespace duolind::verify
