#include "duolind/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace duolind {

namespace {

constexpr Complex kImag(0.0, 1.0);

// Spin ladder amplitude within a fixed total-photon block of dimension n+1.
double ladder(int n_total, int r) {
  return std::sqrt(static_cast<double>(r + 1) * static_cast<double>(n_total - r));
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::automatic: return "auto";
    case Method::diagonalized: return "diagonalized";
    case Method::direct: return "direct";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "auto" || name == "automatic") return Method::automatic;
  if (name == "diagonalized" || name == "diag") return Method::diagonalized;
  if (name == "direct") return Method::direct;
  throw ConfigError("unknown method '" + name + "' (expected auto, diagonalized, direct)");
}

void validate(const SimConfig& cfg) {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(cfg.g) || !finite(cfg.gamma1) || !finite(cfg.gamma2) || !finite(cfg.nbar))
    throw ConfigError("simulation parameters must be finite");
  if (cfg.g < 0.0) throw ConfigError("coupling g must be nonnegative");
  if (cfg.gamma1 < 0.0 || cfg.gamma2 < 0.0)
    throw ConfigError("damping rates must be nonnegative");
  if (cfg.nbar < 0.0) throw ConfigError("nbar must be nonnegative");
  if (cfg.cutoff < 1) throw ConfigError("cutoff must be at least 1");
}

EffectiveHamiltonian effective_hamiltonian(const TwoModeSpace& space,
                                           const SimConfig& cfg) {
  validate(cfg);
  if (cfg.cutoff != space.cutoff)
    throw DimensionError("config cutoff does not match the space");
  const Matrix a1 = annihilator(space, 1).mat;
  const Matrix a2 = annihilator(space, 2).mat;
  Matrix h = -kImag * cfg.gamma1 * (a1.adjoint() * a1) -
             kImag * cfg.gamma2 * (a2.adjoint() * a2) +
             cfg.g * (a1 * a2.adjoint() + a1.adjoint() * a2);
  return EffectiveHamiltonian{std::move(h), space};
}

XiParameter xi_parameter(double g, double delta, double regime_tol) {
  if (g < 0.0) throw ConfigError("coupling g must be nonnegative");
  XiParameter x;
  if (g > 0.0 && std::abs(std::abs(delta) - 2.0 * g) <= regime_tol * g) {
    x.regime = Regime::exceptional;
    return x;
  }
  if (std::abs(delta) > 2.0 * g) {
    x.regime = Regime::overdamped;
    x.zeta = (delta != 0.0) ? std::atanh(2.0 * g / delta) : 0.0;
    x.tau = 0;
    x.xi = Complex(x.zeta, 0.0);
  } else {
    x.regime = Regime::underdamped;
    x.zeta = std::atanh(delta / (2.0 * g));
    x.tau = 1;
    x.xi = Complex(x.zeta, std::asin(1.0));  // zeta + i pi/2
  }
  return x;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::overdamped: return "overdamped";
    case Regime::underdamped: return "underdamped";
    case Regime::exceptional: return "exceptional";
  }
  return "unknown";
}

DiagonalizationResult diagonalize(const SimConfig& cfg) {
  validate(cfg);
  const double delta = cfg.delta();
  const XiParameter x = xi_parameter(cfg.g, delta);
  if (x.regime == Regime::exceptional)
    throw RegimeError("effective Hamiltonian is not diagonalizable at |delta| = 2g; "
                      "use the direct method");
  DiagonalizationResult d;
  d.regime = x.regime;
  d.xi = x.xi;
  d.space = build_space(cfg.cutoff);
  d.c_n = Complex(0.0, -0.5 * cfg.gamma_sum());
  const Complex ch = std::cosh(x.xi), sh = std::sinh(x.xi);
  d.c_x = 2.0 * cfg.g * ch - delta * sh;
  d.c_z = -kImag * (delta * ch - 2.0 * cfg.g * sh);
  d.sign_branch = (delta < 0.0) ? -1 : 1;
  d.h_diag = Vector(d.space.dim);
  for (int i = 0; i < d.space.dim; ++i) {
    const auto [n1, n2] = d.space.occupation(i);
    const int n = n1 + n2;
    d.h_diag(i) = d.c_n * static_cast<double>(n) + d.c_z * (n2 - 0.5 * n);
  }
  return d;
}

Method resolve_method(const SimConfig& cfg) {
  validate(cfg);
  if (cfg.method != Method::automatic) return cfg.method;
  const XiParameter x = xi_parameter(cfg.g, cfg.delta());
  return (x.regime == Regime::exceptional) ? Method::direct : Method::diagonalized;
}

PropagatorPlan::PropagatorPlan(const SimConfig& cfg)
    : PropagatorPlan(cfg, build_space(cfg.cutoff)) {}

PropagatorPlan::PropagatorPlan(const SimConfig& cfg, const TwoModeSpace& space)
    : space_(space) {
  validate(cfg);
  if (cfg.cutoff != space.cutoff)
    throw DimensionError("config cutoff does not match the space");
  path_ = resolve_method(cfg);
  const double delta = cfg.delta();
  const XiParameter x = xi_parameter(cfg.g, delta);
  regime_ = x.regime;
  if (path_ == Method::diagonalized && regime_ == Regime::exceptional)
    throw RegimeError("effective Hamiltonian is not diagonalizable at |delta| = 2g; "
                      "use the direct method");
  const int c = space_.cutoff;
  const int dpm = space_.dim_per_mode;
  const double gsum = cfg.gamma_sum();
  const Complex c_n(0.0, -0.5 * gsum);
  Complex c_z = 0.0;
  if (path_ == Method::diagonalized)
    c_z = -kImag * (delta * std::cosh(x.xi) - 2.0 * cfg.g * std::sinh(x.xi));
  blocks_.reserve(2 * c + 1);
  for (int n = 0; n <= 2 * c; ++n) {
    Block b;
    b.n_total = n;
    b.kept_lo = std::max(0, n - c);
    const int hi = std::min(n, c);
    for (int r = b.kept_lo; r <= hi; ++r) b.flat.push_back((n - r) * dpm + r);
    // Full spin block: exponentiate before dropping corner rows so that both
    // propagator paths act identically on partially represented blocks.
    b.h_full = Matrix::Zero(n + 1, n + 1);
    for (int r = 0; r <= n; ++r) {
      b.h_full(r, r) = -kImag * (0.5 * gsum * n + delta * (r - 0.5 * n));
      if (r < n) {
        const double s = cfg.g * ladder(n, r);
        b.h_full(r, r + 1) = s;
        b.h_full(r + 1, r) = s;
      }
    }
    if (path_ == Method::diagonalized) {
      Matrix jy = Matrix::Zero(n + 1, n + 1);
      for (int r = 0; r < n; ++r) {
        const Complex v(0.0, 0.5 * ladder(n, r));
        jy(r, r + 1) = v;
        jy(r + 1, r) = -v;
      }
      b.rot = (x.xi * jy).exp();
      b.rot_inv = (-x.xi * jy).exp();
      b.h_rot = Vector(n + 1);
      for (int r = 0; r <= n; ++r)
        b.h_rot(r) = c_n * static_cast<double>(n) + c_z * (r - 0.5 * n);
    }
    blocks_.push_back(std::move(b));
  }
}

std::vector<Matrix> PropagatorPlan::block_propagators(double t) const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const Block& b : blocks_) {
    const int full = b.n_total + 1;
    Matrix u_full;
    if (path_ == Method::diagonalized) {
      Vector phase(full);
      for (int r = 0; r < full; ++r) phase(r) = std::exp(-kImag * b.h_rot(r) * t);
      u_full = b.rot * phase.asDiagonal() * b.rot_inv;
    } else {
      u_full = ((-kImag * t) * b.h_full).exp();
    }
    const int k = static_cast<int>(b.flat.size());
    out.push_back(u_full.block(b.kept_lo, b.kept_lo, k, k));
  }
  return out;
}

Matrix PropagatorPlan::assemble(const std::vector<Matrix>& blocks) const {
  Matrix out = Matrix::Zero(space_.dim, space_.dim);
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const auto& flat = blocks_[bi].flat;
    const Matrix& u = blocks[bi];
    for (std::size_t p = 0; p < flat.size(); ++p)
      for (std::size_t q = 0; q < flat.size(); ++q) out(flat[p], flat[q]) = u(p, q);
  }
  return out;
}

Matrix PropagatorPlan::sandwich(const std::vector<Matrix>& blocks, const Matrix& x) const {
  if (x.rows() != space_.dim || x.cols() != space_.dim)
    throw DimensionError("operand does not match the space dimension");
  Matrix out = Matrix::Zero(space_.dim, space_.dim);
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const auto& fi = blocks_[bi].flat;
    const int ki = static_cast<int>(fi.size());
    for (std::size_t bj = 0; bj < blocks_.size(); ++bj) {
      const auto& fj = blocks_[bj].flat;
      const int kj = static_cast<int>(fj.size());
      Matrix sub(ki, kj);
      for (int p = 0; p < ki; ++p)
        for (int q = 0; q < kj; ++q) sub(p, q) = x(fi[p], fj[q]);
      const Matrix res = blocks[bi] * sub * blocks[bj].adjoint();
      for (int p = 0; p < ki; ++p)
        for (int q = 0; q < kj; ++q) out(fi[p], fj[q]) = res(p, q);
    }
  }
  return out;
}

PropagatorPlan::OverlapKernels PropagatorPlan::overlap_kernels(
    const Matrix& x, const std::vector<Matrix>& functionals) const {
  if (path_ != Method::diagonalized)
    throw RegimeError("overlap kernels need the diagonalized path");
  if (x.rows() != space_.dim || x.cols() != space_.dim)
    throw DimensionError("operand does not match the space dimension");
  for (const Matrix& f : functionals)
    if (f.rows() != space_.dim || f.cols() != space_.dim)
      throw DimensionError("functional does not match the space dimension");
  const int nb = static_cast<int>(blocks_.size());
  OverlapKernels k;
  k.lam.resize(nb);
  for (int i = 0; i < nb; ++i) k.lam[i] = blocks_[i].h_rot;
  k.c.assign(functionals.size(), std::vector<Matrix>(nb * nb));
  for (int i = 0; i < nb; ++i) {
    const Block& bi = blocks_[i];
    const int ki = static_cast<int>(bi.flat.size());
    // Kept window seen from the full block: A = kept rows of rot, and the
    // kept columns of rot_inv carry the window back into the eigenbasis.
    const auto a_i = bi.rot.middleRows(bi.kept_lo, ki);
    const auto b_i = bi.rot_inv.middleCols(bi.kept_lo, ki);
    for (int j = 0; j < nb; ++j) {
      const Block& bj = blocks_[j];
      const int kj = static_cast<int>(bj.flat.size());
      Matrix sub(ki, kj);
      for (int p = 0; p < ki; ++p)
        for (int q = 0; q < kj; ++q) sub(p, q) = x(bi.flat[p], bj.flat[q]);
      const Matrix g = b_i * sub * blocks_[j].rot_inv.middleCols(bj.kept_lo, kj).adjoint();
      for (std::size_t f = 0; f < functionals.size(); ++f) {
        Matrix fsub(ki, kj);
        for (int p = 0; p < ki; ++p)
          for (int q = 0; q < kj; ++q)
            fsub(p, q) = functionals[f](bi.flat[p], bj.flat[q]);
        const Matrix xf = a_i.adjoint() * fsub * bj.rot.middleRows(bj.kept_lo, kj);
        k.c[f][i * nb + j] = g.cwiseProduct(xf.conjugate());
      }
    }
  }
  return k;
}

std::vector<Complex> PropagatorPlan::overlap_eval(const OverlapKernels& k,
                                                  double t) const {
  const int nb = static_cast<int>(blocks_.size());
  std::vector<Vector> w(nb);
  for (int i = 0; i < nb; ++i) {
    const Vector& lam = k.lam[i];
    Vector wi(lam.size());
    for (Eigen::Index r = 0; r < lam.size(); ++r)
      wi(r) = std::exp(-kImag * lam(r) * t);
    w[i] = std::move(wi);
  }
  std::vector<Complex> out(k.c.size(), Complex(0.0, 0.0));
  for (int j = 0; j < nb; ++j) {
    const Vector wj_conj = w[j].conjugate();
    for (int i = 0; i < nb; ++i)
      for (std::size_t f = 0; f < k.c.size(); ++f)
        out[f] += w[i].cwiseProduct(k.c[f][i * nb + j] * wj_conj).sum();
  }
  return out;
}

Propagator propagator(const SimConfig& cfg, double t) {
  PropagatorPlan plan(cfg);
  return Propagator{plan.at(t), t, plan.path(), plan.space()};
}

Matrix to_decoupled_frame(const TwoModeSpace& space, const ThermalTransformParams& p,
                          const Matrix& rho, JSeriesInfo* raise_info,
                          JSeriesInfo* lower_info) {
  const Matrix raised = exp_j_sum(space, JSign::plus, p.eta_plus, rho, raise_info);
  return exp_j_sum(space, JSign::minus, p.chi, raised, lower_info);
}

Matrix from_decoupled_frame(const TwoModeSpace& space, const ThermalTransformParams& p,
                            const Matrix& omega, JSeriesInfo* lower_info,
                            JSeriesInfo* raise_info) {
  const Matrix lowered = exp_j_sum(space, JSign::minus, -p.chi, omega, lower_info);
  return exp_j_sum(space, JSign::plus, -p.eta_plus, lowered, raise_info);
}

int thermal_working_margin(double nbar) {
  if (nbar <= 0.0) return 0;
  if (nbar <= 0.02) return 4;
  if (nbar <= 0.25) return 10;
  return 12;
}

int support_total_photons(const TwoModeSpace& space, const Matrix& rho,
                          double level_tol) {
  if (rho.rows() != space.dim || rho.cols() != space.dim)
    throw DimensionError("operand does not match the space dimension");
  std::vector<double> mass(2 * space.cutoff + 1, 0.0);
  for (int i = 0; i < space.dim; ++i)
    mass[space.total_photons(i)] += std::abs(rho(i, i));
  int support = 0;
  for (int n = 0; n <= 2 * space.cutoff; ++n)
    if (mass[n] > level_tol) support = n;
  return support;
}

double shell_population(const TwoModeSpace& space, const Matrix& rho) {
  if (rho.rows() != space.dim || rho.cols() != space.dim)
    throw DimensionError("operand does not match the space dimension");
  double pop = 0.0;
  for (int i = 0; i < space.dim; ++i) {
    const auto [n1, n2] = space.occupation(i);
    if (n1 == space.cutoff || n2 == space.cutoff) pop += rho(i, i).real();
  }
  return pop;
}

DensityMatrix evolve(const DensityMatrix& rho0, double t, const SimConfig& cfg,
                     EvolveInfo* info) {
  validate(cfg);
  if (rho0.space.cutoff != cfg.cutoff)
    throw DimensionError("state cutoff does not match the config");
  if (!(t >= 0.0)) throw ConfigError("time must be nonnegative");
  const TwoModeSpace& space = rho0.space;
  const int occ = support_max_occupation(space, rho0.mat);
  if (occ + 2 > cfg.cutoff)
    throw ConfigError("cutoff margin violation: initial state occupies level " +
                      std::to_string(occ) + " and the cutoff must exceed the "
                      "occupation by at least 2 (cutoff >= " +
                      std::to_string(occ + 2) + ")");
  // Raising edges and coherent spreading of high blocks are handled on an
  // enlarged working space; the user's space only frames the result.
  int work_cutoff = cfg.cutoff + thermal_working_margin(cfg.nbar);
  work_cutoff = std::max(work_cutoff, support_total_photons(space, rho0.mat));
  if (work_cutoff > cfg.cutoff + 14)
    throw TruncationError("initial state spreads too far beyond the cutoff; "
                          "increase cutoff");
  const bool padded = work_cutoff != cfg.cutoff;
  const TwoModeSpace wspace =
      padded ? build_space(work_cutoff, std::size_t{1} << 62) : space;
  SimConfig wcfg = cfg;
  wcfg.cutoff = work_cutoff;

  const ThermalTransformParams p = thermal_params(cfg.nbar, cfg.gamma1, cfg.gamma2);
  PropagatorPlan plan(wcfg, wspace);
  JSeriesInfo in_raise, in_lower, out_lower, out_raise;
  const Matrix rho_in = padded ? embed_state(space, wspace, rho0.mat) : rho0.mat;
  const Matrix omega0 = to_decoupled_frame(wspace, p, rho_in, &in_raise, &in_lower);
  const Matrix omega_t = plan.sandwich(plan.block_propagators(t), omega0);
  Matrix full = from_decoupled_frame(wspace, p, omega_t, &out_lower, &out_raise);

  const double pipeline_drift = std::abs(full.trace().real() - 1.0) +
                                std::abs(full.trace().imag());
  const double herm_defect = max_abs(full - full.adjoint());
  full = 0.5 * (full + full.adjoint()).eval();
  Matrix rho_t = padded ? restrict_state(wspace, space, full) : std::move(full);
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_t, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  EvolveInfo local;
  local.path = plan.path();
  local.working_cutoff = work_cutoff;
  local.pipeline_drift = pipeline_drift;
  local.herm_defect = herm_defect;
  local.trace_dev = std::abs(rho_t.trace() - Complex(1.0));
  local.min_eig = min_eig;
  local.leakage = shell_population(space, rho_t);
  local.truncation_warning = in_raise.truncation_warning || out_raise.truncation_warning;
  if (info) *info = local;
  if (herm_defect > 1e-9)
    throw TruncationError("evolved state lost Hermiticity beyond tolerance; "
                          "increase cutoff");
  if (pipeline_drift > 1e-6 || min_eig < -1e-6)
    throw TruncationError("evolution exceeds truncation tolerances "
                          "(trace drift " + std::to_string(pipeline_drift) +
                          ", min eigenvalue " + std::to_string(min_eig) +
                          "); increase cutoff");
  return DensityMatrix{std::move(rho_t), space};
}

}  // namespace duolind
