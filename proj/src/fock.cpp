#include "duolind/fock.hpp"

#include <cmath>
#include <string>

namespace duolind {

namespace {

void check_mode(int mode) {
  if (mode != 1 && mode != 2) throw DomainError("mode must be 1 or 2");
}

std::size_t check_matrix_bytes(int dim) {
  // dim^2 x dim^2 complex doubles.
  const std::size_t d = static_cast<std::size_t>(dim);
  return d * d * d * d * sizeof(Complex);
}

}  // namespace

int TwoModeSpace::index(int n1, int n2) const {
  if (n1 < 0 || n1 > cutoff || n2 < 0 || n2 > cutoff)
    throw DomainError("occupation (" + std::to_string(n1) + ", " + std::to_string(n2) +
                      ") outside cutoff " + std::to_string(cutoff));
  return n1 * dim_per_mode + n2;
}

std::pair<int, int> TwoModeSpace::occupation(int idx) const {
  if (idx < 0 || idx >= dim) throw DomainError("basis index out of range");
  return {idx / dim_per_mode, idx % dim_per_mode};
}

int TwoModeSpace::total_photons(int idx) const {
  auto [n1, n2] = occupation(idx);
  return n1 + n2;
}

TwoModeSpace build_space(int cutoff, std::size_t check_matrix_budget) {
  if (cutoff < 1) throw ConfigError("cutoff must be at least 1");
  TwoModeSpace s;
  s.cutoff = cutoff;
  s.dim_per_mode = cutoff + 1;
  s.dim = s.dim_per_mode * s.dim_per_mode;
  s.check_matrix_budget = check_matrix_budget;
  if (check_matrix_bytes(s.dim) > check_matrix_budget)
    throw ConfigError("cutoff " + std::to_string(cutoff) +
                      " needs " + std::to_string(check_matrix_bytes(s.dim)) +
                      " bytes for the brute-force check matrix, over the configured budget");
  return s;
}

OperatorMatrix annihilator(const TwoModeSpace& space, int mode) {
  check_mode(mode);
  Matrix a = Matrix::Zero(space.dim, space.dim);
  for (int idx = 0; idx < space.dim; ++idx) {
    auto [n1, n2] = space.occupation(idx);
    const int n = (mode == 1) ? n1 : n2;
    if (n == 0) continue;
    const int row = (mode == 1) ? space.index(n1 - 1, n2) : space.index(n1, n2 - 1);
    a(row, idx) = std::sqrt(static_cast<double>(n));
  }
  return {std::move(a), space};
}

OperatorMatrix creator(const TwoModeSpace& space, int mode) {
  OperatorMatrix a = annihilator(space, mode);
  a.mat = a.mat.adjoint().eval();
  return a;
}

SchwingerSet schwinger_operators(const TwoModeSpace& space) {
  const Matrix a1 = annihilator(space, 1).mat;
  const Matrix a2 = annihilator(space, 2).mat;
  const Matrix n1 = a1.adjoint() * a1;
  const Matrix n2 = a2.adjoint() * a2;
  const Matrix cross = a1 * a2.adjoint();  // lowers mode 1, raises mode 2
  const Complex half_i(0.0, 0.5);
  SchwingerSet s{{n1 + n2, space},
                 {0.5 * (cross + cross.adjoint()), space},
                 {half_i * (cross.adjoint() - cross), space},
                 {0.5 * (n2 - n1), space}};
  return s;
}

StateVector number_state(const TwoModeSpace& space, int n1, int n2) {
  Vector v = Vector::Zero(space.dim);
  v(space.index(n1, n2)) = 1.0;
  return {std::move(v), space};
}

DensityMatrix density_from_matrix(const TwoModeSpace& space, Matrix mat,
                                  double herm_tol, double trace_tol, double eig_floor) {
  if (mat.rows() != space.dim || mat.cols() != space.dim)
    throw DimensionError("matrix does not match the space dimension");
  const double herm_defect = max_abs(mat - mat.adjoint());
  if (herm_defect > herm_tol)
    throw ValidationError("Hermiticity defect " + std::to_string(herm_defect) +
                          " over tolerance");
  mat = 0.5 * (mat + mat.adjoint()).eval();
  const double trace_dev = std::abs(mat.trace() - Complex(1.0));
  if (trace_dev > trace_tol)
    throw ValidationError("trace deviates from 1 by " + std::to_string(trace_dev));
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < eig_floor)
    throw ValidationError("negative eigenvalue " + std::to_string(min_eig));
  return {std::move(mat), space};
}

DensityMatrix density_from_state(const StateVector& psi) {
  const double norm = psi.amp.norm();
  if (std::abs(norm - 1.0) > 1e-12)
    throw ValidationError("state vector norm deviates from 1");
  return {psi.amp * psi.amp.adjoint(), psi.space};
}

Matrix embed_state(const TwoModeSpace& from, const TwoModeSpace& into, const Matrix& rho) {
  if (rho.rows() != from.dim || rho.cols() != from.dim)
    throw DimensionError("matrix does not match the source space");
  if (into.cutoff < from.cutoff)
    throw DimensionError("target space is smaller than the source space");
  Matrix out = Matrix::Zero(into.dim, into.dim);
  for (int i = 0; i < from.dim; ++i) {
    auto [a1, a2] = from.occupation(i);
    const int row = into.index(a1, a2);
    for (int j = 0; j < from.dim; ++j) {
      auto [b1, b2] = from.occupation(j);
      out(row, into.index(b1, b2)) = rho(i, j);
    }
  }
  return out;
}

Matrix restrict_state(const TwoModeSpace& from, const TwoModeSpace& into, const Matrix& rho) {
  if (rho.rows() != from.dim || rho.cols() != from.dim)
    throw DimensionError("matrix does not match the source space");
  if (into.cutoff > from.cutoff)
    throw DimensionError("target space is larger than the source space");
  Matrix out(into.dim, into.dim);
  for (int i = 0; i < into.dim; ++i) {
    auto [a1, a2] = into.occupation(i);
    const int row = from.index(a1, a2);
    for (int j = 0; j < into.dim; ++j) {
      auto [b1, b2] = into.occupation(j);
      out(i, j) = rho(row, from.index(b1, b2));
    }
  }
  return out;
}

int support_max_occupation(const TwoModeSpace& space, const Matrix& rho, double level_tol) {
  if (rho.rows() != space.dim || rho.cols() != space.dim)
    throw DimensionError("matrix does not match the space dimension");
  Eigen::VectorXd marg1 = Eigen::VectorXd::Zero(space.dim_per_mode);
  Eigen::VectorXd marg2 = Eigen::VectorXd::Zero(space.dim_per_mode);
  for (int idx = 0; idx < space.dim; ++idx) {
    auto [n1, n2] = space.occupation(idx);
    const double p = rho(idx, idx).real();
    marg1(n1) += p;
    marg2(n2) += p;
  }
  int top = 0;
  for (int n = 0; n < space.dim_per_mode; ++n)
    if (marg1(n) > level_tol || marg2(n) > level_tol) top = n;
  return top;
}

DensityMatrix thermal_state(const TwoModeSpace& space, double nbar) {
  if (nbar < 0.0) throw ConfigError("nbar must be nonnegative");
  const double r = nbar / (1.0 + nbar);
  Eigen::VectorXd w(space.dim_per_mode);
  double p = 1.0;
  for (int n = 0; n < space.dim_per_mode; ++n, p *= r) w(n) = p;
  w /= w.sum();
  Matrix rho = Matrix::Zero(space.dim, space.dim);
  for (int n1 = 0; n1 <= space.cutoff; ++n1)
    for (int n2 = 0; n2 <= space.cutoff; ++n2)
      rho(space.index(n1, n2), space.index(n1, n2)) = w(n1) * w(n2);
  return {std::move(rho), space};
}

}  // namespace duolind
