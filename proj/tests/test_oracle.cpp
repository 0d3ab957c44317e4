#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "duolind/observables.hpp"
#include "duolind/oracle.hpp"
#include "duolind/superop.hpp"

using namespace duolind;

namespace {

SimConfig config(double g, double gamma1, double gamma2, double nbar, int cutoff) {
  SimConfig cfg;
  cfg.g = g;
  cfg.gamma1 = gamma1;
  cfg.gamma2 = gamma2;
  cfg.nbar = nbar;
  cfg.cutoff = cutoff;
  return cfg;
}

Matrix random_hermitian(const TwoModeSpace& s, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(s.dim, s.dim);
  for (int i = 0; i < s.dim; ++i)
    for (int j = 0; j < s.dim; ++j) m(i, j) = Complex(u(gen), u(gen));
  return 0.5 * (m + m.adjoint()).eval();
}

}  // namespace

TEST_CASE("default step scales with the fastest rate") {
  CHECK(default_time_step(config(2.0, 0.1, 0.1, 0.0, 4)) == doctest::Approx(5e-4));
  CHECK(default_time_step(config(0.5, 0.1, 0.2, 0.0, 4)) == doctest::Approx(1e-3));
}

TEST_CASE("integration window covers the thermal tail") {
  CHECK(integration_working_cutoff(config(1.0, 0.3, 0.3, 0.0, 6)) == 6);
  CHECK(integration_working_cutoff(config(1.0, 0.3, 0.3, 0.01, 6)) == 6);
  CHECK(integration_working_cutoff(config(1.0, 0.3, 0.3, 0.2, 6)) == 10);
  // Warmer baths hit the padding cap.
  CHECK(integration_working_cutoff(config(1.0, 0.3, 0.3, 0.5, 6)) == 12);
}

TEST_CASE("one integrator step is a classical fourth-order stage composition") {
  const SimConfig cfg = config(1.0, 0.3, 0.1, 0.0, 4);
  const TwoModeSpace s = build_space(4);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 1));
  const double h = 0.05;
  IntegratorConfig ic;
  ic.dt = h;
  const Matrix stepped = integrate(rho0, h, cfg, ic);

  const auto rhs = [&](const Matrix& m) { return lindblad_generator(s, cfg, m); };
  const Matrix k1 = rhs(rho0.mat);
  const Matrix k2 = rhs(rho0.mat + (0.5 * h) * k1);
  const Matrix k3 = rhs(rho0.mat + (0.5 * h) * k2);
  const Matrix k4 = rhs(rho0.mat + h * k3);
  const Matrix expect = rho0.mat + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  CHECK(max_abs(stepped - expect) <= 1e-13);
}

TEST_CASE("halving the step leaves the solution unchanged at fourth order") {
  const SimConfig cfg = config(1.0, 0.4, 0.2, 0.2, 4);
  const TwoModeSpace s = build_space(4);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 1));
  IntegratorConfig coarse, fine;
  coarse.dt = 1e-3;
  fine.dt = 5e-4;
  const Matrix a = integrate(rho0, 0.4, cfg, coarse);
  const Matrix b = integrate(rho0, 0.4, cfg, fine);
  CHECK(trace_distance(a, b) <= 1e-9);
}

TEST_CASE("snapshots resume instead of restarting") {
  const SimConfig cfg = config(1.0, 0.3, 0.1, 0.01, 4);
  const TwoModeSpace s = build_space(4);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 1));
  const std::vector<Matrix> snaps = integrate_snapshots(rho0, {0.0, 0.2, 0.5}, cfg);
  REQUIRE(snaps.size() == 3);
  CHECK(max_abs(snaps[0] - rho0.mat) == 0.0);
  CHECK(max_abs(snaps[1] - integrate(rho0, 0.2, cfg)) <= 1e-12);
  CHECK(max_abs(snaps[2] - integrate(rho0, 0.5, cfg)) <= 1e-12);
  CHECK_THROWS_AS(integrate_snapshots(rho0, {0.5, 0.2}, cfg), ConfigError);
}

TEST_CASE("step budget guards runaway integrations") {
  const SimConfig cfg = config(1.0, 0.3, 0.1, 0.0, 4);
  const TwoModeSpace s = build_space(4);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 1));
  IntegratorConfig ic;
  ic.max_steps = 10;
  CHECK_THROWS_AS(integrate(rho0, 1.0, cfg, ic), IntegrationError);
}

TEST_CASE("vectorized generator agrees with the matrix-free form") {
  const SimConfig cfg = config(0.9, 0.35, 0.15, 0.2, 3);
  const VectorizedLiouvillian l = liouvillian_matrix(cfg);
  const TwoModeSpace& s = l.space;
  std::mt19937_64 gen(41);
  const Matrix rho = random_hermitian(s, gen);
  const Eigen::Map<const Vector> vec_rho(rho.data(), s.dim * s.dim);
  const Vector out = l.mat * vec_rho;
  const Eigen::Map<const Matrix> unvec(out.data(), s.dim, s.dim);
  CHECK(max_abs(Matrix(unvec) - lindblad_generator(s, cfg, rho)) <= 1e-12);

  // Every column conserves the trace.
  const Matrix id = Matrix::Identity(s.dim, s.dim);
  const Eigen::Map<const Vector> vec_id(id.data(), s.dim * s.dim);
  CHECK((vec_id.adjoint() * l.mat).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(liouvillian_matrix(config(1.0, 0.1, 0.1, 0.0, 16)), ConfigError);
}

TEST_CASE("exponential route and stepping route coincide") {
  const SimConfig cfg = config(1.0, 0.3, 0.2, 0.1, 3);
  const TwoModeSpace s = build_space(3);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 1));
  const Matrix via_expm = expm_evolve(rho0, 0.5, cfg);
  IntegratorConfig ic;
  ic.tail_budget = 0.0;  // keep the stepping route on the bare space too
  const Matrix via_steps = integrate(rho0, 0.5, cfg, ic);
  CHECK(max_abs(via_expm - via_steps) <= 1e-8);
}
