#include "duolind/superop.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace duolind {

namespace {

void check_same_dim(const TwoModeSpace& space, const Matrix& rho) {
  if (rho.rows() != space.dim || rho.cols() != space.dim)
    throw DimensionError("operand does not match the space dimension");
}

void check_mode(int mode) {
  if (mode != 1 && mode != 2) throw DomainError("mode must be 1 or 2");
}

std::vector<double> sqrt_table(int up_to) {
  std::vector<double> s(up_to + 1);
  for (int n = 0; n <= up_to; ++n) s[n] = std::sqrt(static_cast<double>(n));
  return s;
}

// {D, rho} with D diagonal in the number basis, D(n1, n2) = w1(n1) + w2(n2).
Matrix anticommute_mode_diagonal(const TwoModeSpace& space, int mode,
                                 const std::vector<double>& w, const Matrix& rho) {
  Matrix out(space.dim, space.dim);
  const int dpm = space.dim_per_mode;
  for (int i = 0; i < space.dim; ++i) {
    const int ni = (mode == 1) ? i / dpm : i % dpm;
    for (int j = 0; j < space.dim; ++j) {
      const int nj = (mode == 1) ? j / dpm : j % dpm;
      out(i, j) = (w[ni] + w[nj]) * rho(i, j);
    }
  }
  return out;
}

}  // namespace

ThermalTransformParams thermal_params(double nbar, double gamma1, double gamma2) {
  if (nbar < 0.0) throw ConfigError("nbar must be nonnegative");
  if (gamma1 < 0.0 || gamma2 < 0.0) throw ConfigError("damping rates must be nonnegative");
  ThermalTransformParams p;
  p.nbar = nbar;
  p.gamma1 = gamma1;
  p.gamma2 = gamma2;
  p.eta_plus = -nbar / (2.0 * (1.0 + nbar));
  p.eta_minus = -0.5;
  p.chi = 0.5 * (1.0 + nbar);
  const auto f = [&](double eta) { return (4.0 * eta + 1.0) * (1.0 + nbar) + nbar; };
  const auto gain = [&](double eta) {
    return 2.0 * (gamma1 + gamma2) * (nbar + 2.0 * eta * (1.0 + nbar));
  };
  p.f_plus = f(p.eta_plus);
  p.f_minus = f(p.eta_minus);
  p.gain_plus = gain(p.eta_plus);
  p.gain_minus = gain(p.eta_minus);
  return p;
}

double eta_quadratic_residual(double nbar, double eta) {
  return 4.0 * eta * eta * (1.0 + nbar) + 2.0 * eta * (1.0 + 2.0 * nbar) + nbar;
}

Matrix apply_j(const TwoModeSpace& space, JSign sign, int mode, const Matrix& rho) {
  check_same_dim(space, rho);
  check_mode(mode);
  const int dpm = space.dim_per_mode;
  const int shift = (mode == 1) ? dpm : 1;
  const auto sq = sqrt_table(space.cutoff + 1);
  Matrix out = Matrix::Zero(space.dim, space.dim);
  for (int i = 0; i < space.dim; ++i) {
    const int ni = (mode == 1) ? i / dpm : i % dpm;
    for (int j = 0; j < space.dim; ++j) {
      const int nj = (mode == 1) ? j / dpm : j % dpm;
      if (sign == JSign::minus) {
        // 2 a rho a†: pull from one quantum higher on both sides.
        if (ni < space.cutoff && nj < space.cutoff)
          out(i, j) = 2.0 * sq[ni + 1] * sq[nj + 1] * rho(i + shift, j + shift);
      } else {
        // 2 a† rho a: pull from one quantum lower on both sides.
        if (ni > 0 && nj > 0)
          out(i, j) = 2.0 * sq[ni] * sq[nj] * rho(i - shift, j - shift);
      }
    }
  }
  return out;
}

Matrix apply_l(const TwoModeSpace& space, int mode, const Matrix& rho) {
  check_same_dim(space, rho);
  check_mode(mode);
  std::vector<double> w(space.dim_per_mode);
  for (int n = 0; n <= space.cutoff; ++n) w[n] = n;
  return anticommute_mode_diagonal(space, mode, w, rho);
}

Matrix apply_s(const TwoModeSpace& space, const Matrix& rho) {
  check_same_dim(space, rho);
  const int dpm = space.dim_per_mode;
  const int c = space.cutoff;
  const auto sq = sqrt_table(c + 1);
  Matrix out = Matrix::Zero(space.dim, space.dim);
  // W = a1 a2† + a1† a2; out = W rho - rho W.
  for (int i = 0; i < space.dim; ++i) {
    const int n1 = i / dpm, n2 = i % dpm;
    for (int j = 0; j < space.dim; ++j) {
      Complex acc = 0.0;
      if (n1 >= 1 && n2 < c) acc += sq[n1] * sq[n2 + 1] * rho(i - dpm + 1, j);
      if (n1 < c && n2 >= 1) acc += sq[n1 + 1] * sq[n2] * rho(i + dpm - 1, j);
      const int m1 = j / dpm, m2 = j % dpm;
      if (m1 < c && m2 >= 1) acc -= sq[m1 + 1] * sq[m2] * rho(i, j + dpm - 1);
      if (m1 >= 1 && m2 < c) acc -= sq[m1] * sq[m2 + 1] * rho(i, j - dpm + 1);
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix exp_j_sum(const TwoModeSpace& space, JSign sign, double coeff,
                 const Matrix& rho, JSeriesInfo* info) {
  check_same_dim(space, rho);
  JSeriesInfo local;
  Matrix sum = rho;
  if (coeff != 0.0) {
    Matrix term = rho;
    const int hard_cap = 2 * space.cutoff + 2;  // series is exactly nilpotent past 2*cutoff
    double last_norm = 0.0;
    for (int k = 1; k <= hard_cap; ++k) {
      term = (coeff / k) *
             (apply_j(space, sign, 1, term) + apply_j(space, sign, 2, term)).eval();
      const double nrm = max_abs(term);
      if (nrm == 0.0) break;
      sum += term;
      last_norm = nrm;
      ++local.terms;
    }
    const double scale = max_abs(sum);
    local.last_term_ratio = (scale > 0.0) ? last_norm / scale : 0.0;
    // The raising series ends only because the cutoff swallows the next term.
    local.truncation_warning = (sign == JSign::plus) && (local.last_term_ratio > 1e-10);
  }
  if (info) *info = local;
  return sum;
}

Matrix lindblad_generator(const TwoModeSpace& space, const SimConfig& cfg,
                          const Matrix& rho) {
  check_same_dim(space, rho);
  validate(cfg);
  if (cfg.cutoff != space.cutoff)
    throw DimensionError("config cutoff does not match the space");
  const Complex minus_i(0.0, -1.0);
  Matrix out = (minus_i * cfg.g) * apply_s(space, rho);
  // Anticommutator weight of the truncated a a†: n + 1 below the shell, 0 on it.
  std::vector<double> w_down(space.dim_per_mode);
  for (int n = 0; n <= space.cutoff; ++n) w_down[n] = (n < space.cutoff) ? n + 1.0 : 0.0;
  const double down = 1.0 + cfg.nbar;
  const double up = cfg.nbar;
  for (int mode = 1; mode <= 2; ++mode) {
    const double gamma = (mode == 1) ? cfg.gamma1 : cfg.gamma2;
    if (gamma == 0.0) continue;
    out += (down * gamma) *
           (apply_j(space, JSign::minus, mode, rho) - apply_l(space, mode, rho));
    if (up > 0.0)
      out += (up * gamma) * (apply_j(space, JSign::plus, mode, rho) -
                             anticommute_mode_diagonal(space, mode, w_down, rho));
  }
  return out;
}

}  // namespace duolind
