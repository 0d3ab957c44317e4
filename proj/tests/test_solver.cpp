#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "duolind/observables.hpp"
#include "duolind/oracle.hpp"
#include "duolind/solver.hpp"

using namespace duolind;

namespace {

Matrix random_hermitian(const TwoModeSpace& s, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(s.dim, s.dim);
  for (int i = 0; i < s.dim; ++i)
    for (int j = 0; j < s.dim; ++j) m(i, j) = Complex(u(gen), u(gen));
  return 0.5 * (m + m.adjoint()).eval();
}

SimConfig config(double g, double gamma1, double gamma2, double nbar, int cutoff) {
  SimConfig cfg;
  cfg.g = g;
  cfg.gamma1 = gamma1;
  cfg.gamma2 = gamma2;
  cfg.nbar = nbar;
  cfg.cutoff = cutoff;
  return cfg;
}

}  // namespace

TEST_CASE("effective generator has the damped beam-splitter block structure") {
  const TwoModeSpace s = build_space(3);
  const SimConfig cfg = config(1.3, 0.4, 0.9, 0.0, 3);
  const Matrix h = effective_hamiltonian(s, cfg).mat;
  const int i10 = s.index(1, 0), i01 = s.index(0, 1);
  CHECK(std::abs(h(i10, i10) - Complex(0.0, -0.4)) <= 1e-14);
  CHECK(std::abs(h(i01, i01) - Complex(0.0, -0.9)) <= 1e-14);
  CHECK(std::abs(h(i10, i01) - Complex(1.3)) <= 1e-14);
  CHECK(std::abs(h(i01, i10) - Complex(1.3)) <= 1e-14);
  // The coupling conserves total photon number.
  CHECK(std::abs(h(s.index(0, 0), i10)) == 0.0);
}

TEST_CASE("rotation angle covers both damping regimes") {
  const XiParameter over = xi_parameter(1.0, 3.0);
  CHECK(over.regime == Regime::overdamped);
  CHECK(over.tau == 0);
  CHECK(over.xi.real() == doctest::Approx(std::atanh(2.0 / 3.0)));
  CHECK(over.xi.imag() == doctest::Approx(0.0));

  const XiParameter under = xi_parameter(1.0, 1.0);
  CHECK(under.regime == Regime::underdamped);
  CHECK(under.tau == 1);
  CHECK(under.xi.real() == doctest::Approx(std::atanh(0.5)));
  CHECK(under.xi.imag() == doctest::Approx(std::asin(1.0)));

  CHECK(xi_parameter(1.0, 0.0).xi.real() == doctest::Approx(0.0));
  CHECK(xi_parameter(1.0, 2.0).regime == Regime::exceptional);
  CHECK(xi_parameter(1.0, -2.0).regime == Regime::exceptional);
}

TEST_CASE("split generator matches the known spectrum") {
  // gamma1 = 3, gamma2 = 0: eigenvalue splitting sqrt(delta^2 - 4 g^2) on the
  // one-photon block.
  const SimConfig cfg = config(1.0, 3.0, 0.0, 0.0, 4);
  const DiagonalizationResult d = diagonalize(cfg);
  CHECK(d.regime == Regime::overdamped);
  CHECK(std::abs(d.c_n - Complex(0.0, -1.5)) <= 1e-12);
  CHECK(std::abs(d.c_x) <= 1e-10);
  CHECK(std::abs(d.c_z) == doctest::Approx(std::sqrt(5.0)));

  CHECK_THROWS_AS(diagonalize(config(1.0, 0.0, 2.0, 0.0, 4)), RegimeError);
}

TEST_CASE("automatic method avoids the exceptional line") {
  CHECK(resolve_method(config(1.0, 0.2, 0.7, 0.0, 4)) == Method::diagonalized);
  CHECK(resolve_method(config(1.0, 0.0, 2.0, 0.0, 4)) == Method::direct);
  SimConfig forced = config(1.0, 0.2, 0.7, 0.0, 4);
  forced.method = Method::direct;
  CHECK(resolve_method(forced) == Method::direct);
}

TEST_CASE("propagator limits and path agreement") {
  SimConfig cfg = config(1.0, 0.2, 0.7, 0.0, 5);
  const Propagator u0 = propagator(cfg, 0.0);
  CHECK(max_abs(u0.mat - Matrix::Identity(u0.space.dim, u0.space.dim)) <= 1e-12);

  // Lossless pair exchange: the coincidence amplitude oscillates as cos(2gt).
  const SimConfig lossless = config(1.0, 0.0, 0.0, 0.0, 5);
  const TwoModeSpace s = build_space(5);
  const Propagator u = propagator(lossless, 0.3);
  CHECK(std::abs(u.mat(s.index(1, 1), s.index(1, 1)) - Complex(std::cos(0.6))) <= 1e-12);

  SimConfig diag = cfg;
  diag.method = Method::diagonalized;
  SimConfig direct = cfg;
  direct.method = Method::direct;
  CHECK(max_abs(propagator(diag, 1.3).mat - propagator(direct, 1.3).mat) <= 1e-9);
}

TEST_CASE("overlap kernels reproduce the sandwiched trace") {
  const SimConfig cfg = config(1.0, 0.2, 0.7, 0.0, 5);
  const PropagatorPlan plan(cfg);
  std::mt19937_64 gen(31);
  const TwoModeSpace& s = plan.space();
  const Matrix x = random_hermitian(s, gen);
  Matrix pair = Matrix::Zero(s.dim, s.dim);
  pair(s.index(1, 1), s.index(1, 1)) = 1.0;
  const Matrix f2 = random_hermitian(s, gen);

  const auto kernels = plan.overlap_kernels(x, {pair, f2});
  for (double t : {0.0, 0.45, 1.7}) {
    const auto vals = plan.overlap_eval(kernels, t);
    const Matrix ut = plan.sandwich(plan.block_propagators(t), x);
    CHECK(std::abs(vals[0] - (pair.adjoint() * ut).trace()) <= 1e-10);
    CHECK(std::abs(vals[1] - (f2.adjoint() * ut).trace()) <= 1e-10);
  }

  SimConfig ep = config(1.0, 0.0, 2.0, 0.0, 5);
  const PropagatorPlan ep_plan(ep);
  CHECK(ep_plan.path() == Method::direct);
  CHECK_THROWS_AS(ep_plan.overlap_kernels(x, {pair}), RegimeError);
}

TEST_CASE("frame maps invert each other") {
  const TwoModeSpace s = build_space(5);
  const ThermalTransformParams p = thermal_params(0.2, 0.3, 0.5);
  std::mt19937_64 gen(13);
  const Matrix rho = random_hermitian(s, gen);
  // The forward map inflates entries by two orders of magnitude before the
  // inverse deflates them, so absolute roundoff lands near 1e-12.
  CHECK(max_abs(from_decoupled_frame(s, p, to_decoupled_frame(s, p, rho)) - rho) <= 1e-11);
}

TEST_CASE("working margin grows with the bath occupation") {
  CHECK(thermal_working_margin(0.0) == 0);
  CHECK(thermal_working_margin(0.01) == 4);
  CHECK(thermal_working_margin(0.2) == 10);
  CHECK(thermal_working_margin(0.5) == 12);
}

TEST_CASE("support and shell helpers") {
  const TwoModeSpace s = build_space(6);
  CHECK(support_total_photons(s, density_from_state(number_state(s, 2, 1)).mat) == 3);
  CHECK(shell_population(s, density_from_state(number_state(s, 0, 6)).mat) ==
        doctest::Approx(1.0));
  CHECK(shell_population(s, density_from_state(number_state(s, 1, 1)).mat) == 0.0);
}

TEST_CASE("evolution is the identity at t = 0") {
  const SimConfig cfg = config(1.0, 0.3, 0.5, 0.2, 6);
  const TwoModeSpace s = build_space(6);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 1));
  EvolveInfo info;
  const DensityMatrix rho = evolve(rho0, 0.0, cfg, &info);
  CHECK(max_abs(rho.mat - rho0.mat) <= 1e-10);
  CHECK(info.working_cutoff == 16);  // warm bath pads the working window
  CHECK(info.path == Method::diagonalized);
}

TEST_CASE("evolution rejects bad inputs") {
  const TwoModeSpace s = build_space(6);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 1));
  const SimConfig cfg = config(1.0, 0.3, 0.5, 0.0, 6);
  CHECK_THROWS_AS(evolve(rho0, -0.5, cfg), ConfigError);
  CHECK_THROWS_AS(evolve(rho0, 1.0, config(1.0, 0.3, 0.5, 0.0, 4)), DimensionError);

  // Margin precondition: the cutoff must exceed the top occupation by 2.
  CHECK_THROWS_AS(evolve(density_from_state(number_state(s, 5, 1)), 1.0, cfg),
                  ConfigError);
  const TwoModeSpace tight = build_space(2);
  CHECK_THROWS_AS(evolve(density_from_state(number_state(tight, 1, 1)), 1.0,
                         config(1.0, 0.3, 0.5, 0.0, 2)),
                  ConfigError);
}

TEST_CASE("pure damping empties one mode at the two-gamma rate") {
  // Near-zero coupling: occupation decays as exp(-2 gamma t) at zero bath.
  const SimConfig cfg = config(1e-9, 0.4, 0.1, 0.0, 4);
  const TwoModeSpace s = build_space(4);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 0));
  const DensityMatrix rho = evolve(rho0, 0.7, cfg);
  CHECK(mode_occupation(s, rho.mat, 1) ==
        doctest::Approx(std::exp(-0.8 * 0.7)).epsilon(1e-8));
  CHECK(mode_occupation(s, rho.mat, 2) <= 1e-12);
}

TEST_CASE("evolution crosses the exceptional line on the direct path") {
  const SimConfig cfg = config(1.0, 0.0, 2.0, 0.0, 5);
  const TwoModeSpace s = build_space(5);
  EvolveInfo info;
  const DensityMatrix rho = evolve(density_from_state(number_state(s, 1, 1)), 0.5,
                                   cfg, &info);
  CHECK(info.path == Method::direct);
  CHECK(std::abs(rho.mat.trace().real() - 1.0) <= 1e-6);
}

TEST_CASE("trace and positivity hold when leakage is negligible") {
  const SimConfig cfg = config(1.0, 0.2, 0.1, 0.0, 6);
  const TwoModeSpace s = build_space(6);
  const DensityMatrix rho = evolve(density_from_state(number_state(s, 1, 1)), 1.0, cfg);
  const Diagnostics d = diagnostics(s, rho.mat);
  REQUIRE(d.leakage < 1e-9);
  CHECK(d.trace_dev <= 1e-8);
  CHECK(d.min_eig >= -1e-8);
}

TEST_CASE("closed form tracks the brute-force integrator") {
  const SimConfig cfg = config(1.0, 0.2, 0.1, 0.01, 6);
  const TwoModeSpace s = build_space(6);
  const DensityMatrix rho0 = density_from_state(number_state(s, 1, 1));
  const std::vector<double> times = {0.5, 1.0, 2.0};
  const std::vector<Matrix> ref = integrate_snapshots(rho0, times, cfg);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const DensityMatrix rho = evolve(rho0, times[k], cfg);
    CHECK(trace_distance(rho.mat, ref[k]) <= 1e-6);
  }
}
