#include "duolind/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace duolind {

namespace {

// Right-hand side in drift-plus-jumps form: the drift matrix collects the
// coherent part and both anticommutators, the jump terms are index shifts.
class MasterRhs {
 public:
  MasterRhs(const TwoModeSpace& space, const SimConfig& cfg)
      : dim_(space.dim), dpm_(space.dim_per_mode), g_(cfg.g),
        down1_(2.0 * (1.0 + cfg.nbar) * cfg.gamma1),
        down2_(2.0 * (1.0 + cfg.nbar) * cfg.gamma2),
        up1_(2.0 * cfg.nbar * cfg.gamma1),
        up2_(2.0 * cfg.nbar * cfg.gamma2) {
    const int c = space.cutoff;
    diag_.resize(dim_);
    wa_.assign(dim_, 0.0);
    wb_.assign(dim_, 0.0);
    ia_.assign(dim_, 0);
    ib_.assign(dim_, 0);
    s1p_.assign(dim_, 0.0);
    s2p_.assign(dim_, 0.0);
    s1m_.assign(dim_, 0.0);
    s2m_.assign(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
      const int n1 = i / dpm_, n2 = i % dpm_;
      const double hot1 = (n1 < c) ? n1 + 1.0 : 0.0;
      const double hot2 = (n2 < c) ? n2 + 1.0 : 0.0;
      diag_[i] = (1.0 + cfg.nbar) * (cfg.gamma1 * n1 + cfg.gamma2 * n2) +
                 cfg.nbar * (cfg.gamma1 * hot1 + cfg.gamma2 * hot2);
      if (n1 >= 1 && n2 < c) {
        wa_[i] = std::sqrt(static_cast<double>(n1) * (n2 + 1.0));
        ia_[i] = i - dpm_ + 1;
      } else {
        ia_[i] = i;
      }
      if (n1 < c && n2 >= 1) {
        wb_[i] = std::sqrt((n1 + 1.0) * static_cast<double>(n2));
        ib_[i] = i + dpm_ - 1;
      } else {
        ib_[i] = i;
      }
      s1p_[i] = (n1 < c) ? std::sqrt(n1 + 1.0) : 0.0;
      s2p_[i] = (n2 < c) ? std::sqrt(n2 + 1.0) : 0.0;
      s1m_[i] = (n1 >= 1) ? std::sqrt(static_cast<double>(n1)) : 0.0;
      s2m_[i] = (n2 >= 1) ? std::sqrt(static_cast<double>(n2)) : 0.0;
    }
  }

  void operator()(const Matrix& rho, Matrix& out) const {
    const Complex ig(0.0, g_);
    for (int j = 0; j < dim_; ++j) {
      for (int i = 0; i < dim_; ++i) {
        Complex acc = -(diag_[i] + diag_[j]) * rho(i, j);
        acc -= ig * (wa_[i] * rho(ia_[i], j) + wb_[i] * rho(ib_[i], j));
        acc += ig * (wa_[j] * rho(i, ia_[j]) + wb_[j] * rho(i, ib_[j]));
        if (down1_ != 0.0 && s1p_[i] != 0.0 && s1p_[j] != 0.0)
          acc += down1_ * s1p_[i] * s1p_[j] * rho(i + dpm_, j + dpm_);
        if (down2_ != 0.0 && s2p_[i] != 0.0 && s2p_[j] != 0.0)
          acc += down2_ * s2p_[i] * s2p_[j] * rho(i + 1, j + 1);
        if (up1_ != 0.0 && s1m_[i] != 0.0 && s1m_[j] != 0.0)
          acc += up1_ * s1m_[i] * s1m_[j] * rho(i - dpm_, j - dpm_);
        if (up2_ != 0.0 && s2m_[i] != 0.0 && s2m_[j] != 0.0)
          acc += up2_ * s2m_[i] * s2m_[j] * rho(i - 1, j - 1);
        out(i, j) = acc;
      }
    }
  }

 private:
  int dim_, dpm_;
  double g_, down1_, down2_, up1_, up2_;
  std::vector<double> diag_, wa_, wb_, s1p_, s2p_, s1m_, s2m_;
  std::vector<int> ia_, ib_;
};

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-stacked representation of rho -> A rho B.
Matrix two_sided(const Matrix& a, const Matrix& b) {
  return kron(b.transpose(), a);
}

void check_state(const DensityMatrix& rho0, const SimConfig& cfg) {
  validate(cfg);
  if (rho0.space.cutoff != cfg.cutoff)
    throw DimensionError("state cutoff does not match the config");
}

}  // namespace

double default_time_step(const SimConfig& cfg) {
  const double scale =
      std::max({cfg.g, cfg.gamma1, cfg.gamma2, cfg.g * cfg.nbar, 1.0});
  return 1e-3 / scale;
}

int integration_working_cutoff(const SimConfig& cfg, double tail_budget) {
  validate(cfg);
  if (cfg.nbar <= 0.0 || tail_budget <= 0.0) return cfg.cutoff;
  const double r = cfg.nbar / (1.0 + cfg.nbar);
  int m = cfg.cutoff;
  // Two-mode stationary tail beyond level m is below 2 r^(m+1).
  while (m < cfg.cutoff + 6 && 2.0 * std::pow(r, m + 1) > tail_budget) ++m;
  return m;
}

std::vector<Matrix> integrate_snapshots(const DensityMatrix& rho0,
                                        const std::vector<double>& times,
                                        const SimConfig& cfg, IntegratorConfig ic) {
  check_state(rho0, cfg);
  double prev = 0.0;
  for (double t : times) {
    if (!(t >= prev)) throw ConfigError("snapshot times must be ascending and nonnegative");
    prev = t;
  }
  const double dt = (ic.dt > 0.0) ? ic.dt : default_time_step(cfg);
  // Heating populates levels past any fixed truncation; step on a window wide
  // enough that the missed tail stays inside the configured budget, then
  // restrict the snapshots to the caller's space.
  const int work_cutoff = integration_working_cutoff(cfg, ic.tail_budget);
  const bool padded = work_cutoff != cfg.cutoff;
  const TwoModeSpace space =
      padded ? build_space(work_cutoff, std::size_t{1} << 62) : rho0.space;
  SimConfig wcfg = cfg;
  wcfg.cutoff = work_cutoff;
  const MasterRhs rhs(space, wcfg);
  Matrix rho = padded ? embed_state(rho0.space, space, rho0.mat) : rho0.mat;
  Matrix k1(space.dim, space.dim), k2(space.dim, space.dim);
  Matrix k3(space.dim, space.dim), k4(space.dim, space.dim);
  Matrix stage(space.dim, space.dim);
  std::vector<Matrix> out;
  out.reserve(times.size());
  long total_steps = 0;
  double t_cur = 0.0;
  for (double target : times) {
    const double span = target - t_cur;
    if (span > 0.0) {
      const long n = std::max<long>(1, static_cast<long>(std::ceil(span / dt)));
      total_steps += n;
      if (total_steps > ic.max_steps)
        throw IntegrationError("step budget exceeded; increase dt or max_steps");
      const double h = span / static_cast<double>(n);
      for (long s = 0; s < n; ++s) {
        rhs(rho, k1);
        stage = rho + (0.5 * h) * k1;
        rhs(stage, k2);
        stage = rho + (0.5 * h) * k2;
        rhs(stage, k3);
        stage = rho + h * k3;
        rhs(stage, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t_cur = target;
    }
    out.push_back(padded ? restrict_state(space, rho0.space, rho) : rho);
  }
  return out;
}

Matrix integrate(const DensityMatrix& rho0, double t, const SimConfig& cfg,
                 IntegratorConfig ic) {
  return integrate_snapshots(rho0, {t}, cfg, ic).front();
}

VectorizedLiouvillian liouvillian_matrix(const SimConfig& cfg) {
  validate(cfg);
  const TwoModeSpace space = build_space(cfg.cutoff);
  const std::size_t need = 16ull * static_cast<std::size_t>(space.dim) *
                           space.dim * space.dim * space.dim;
  if (need > space.check_matrix_budget)
    throw ConfigError("vectorized generator would need " + std::to_string(need) +
                      " bytes; raise the check matrix budget or lower the cutoff");
  const Matrix a1 = annihilator(space, 1).mat;
  const Matrix a2 = annihilator(space, 2).mat;
  const Matrix w = a1 * a2.adjoint() + a1.adjoint() * a2;
  const Matrix id = Matrix::Identity(space.dim, space.dim);
  const Complex mi(0.0, -1.0);
  Matrix l = (mi * cfg.g) * (two_sided(w, id) - two_sided(id, w));
  const double down = 1.0 + cfg.nbar, up = cfg.nbar;
  const Matrix* as[2] = {&a1, &a2};
  const double gs[2] = {cfg.gamma1, cfg.gamma2};
  for (int m = 0; m < 2; ++m) {
    if (gs[m] == 0.0) continue;
    const Matrix& a = *as[m];
    const Matrix ad = a.adjoint();
    const Matrix num = ad * a;
    const Matrix hot = a * ad;
    l += (down * gs[m]) *
         (2.0 * two_sided(a, ad) - two_sided(num, id) - two_sided(id, num));
    if (up > 0.0)
      l += (up * gs[m]) *
           (2.0 * two_sided(ad, a) - two_sided(hot, id) - two_sided(id, hot));
  }
  return VectorizedLiouvillian{std::move(l), space};
}

Matrix expm_evolve(const DensityMatrix& rho0, double t, const SimConfig& cfg) {
  check_state(rho0, cfg);
  if (!(t >= 0.0)) throw ConfigError("time must be nonnegative");
  const VectorizedLiouvillian l = liouvillian_matrix(cfg);
  const Matrix prop = (t * l.mat).exp();
  const int dim = rho0.space.dim;
  const Eigen::Map<const Vector> v0(rho0.mat.data(), dim * dim);
  const Vector vt = prop * v0;
  Matrix out(dim, dim);
  Eigen::Map<Vector>(out.data(), dim * dim) = vt;
  return out;
}

}  // namespace duolind
