#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "duolind/fock.hpp"

using namespace duolind;

TEST_CASE("space dimensions and index bijection") {
  const TwoModeSpace s = build_space(3);
  CHECK(s.dim_per_mode == 4);
  CHECK(s.dim == 16);
  for (int idx = 0; idx < s.dim; ++idx) {
    auto [n1, n2] = s.occupation(idx);
    CHECK(s.index(n1, n2) == idx);
    CHECK(s.total_photons(idx) == n1 + n2);
  }
  CHECK_THROWS_AS(s.index(4, 0), DomainError);
  CHECK_THROWS_AS(s.index(0, -1), DomainError);
  CHECK_THROWS_AS(s.occupation(16), DomainError);
  CHECK_THROWS_AS(build_space(0), ConfigError);
}

TEST_CASE("check-matrix budget bounds the cutoff") {
  CHECK_NOTHROW(build_space(15));
  CHECK_THROWS_AS(build_space(16), ConfigError);
  CHECK_NOTHROW(build_space(16, std::size_t{1} << 62));
}

TEST_CASE("ladder operators carry square-root matrix elements") {
  const TwoModeSpace s = build_space(4);
  const Matrix a1 = annihilator(s, 1).mat;
  const Matrix a2 = annihilator(s, 2).mat;
  CHECK(a1(s.index(1, 2), s.index(2, 2)).real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(a2(s.index(3, 0), s.index(3, 1)).real() == doctest::Approx(1.0));
  CHECK(max_abs(creator(s, 1).mat - a1.adjoint()) == 0.0);
  // Number operator is diagonal with the occupation on the diagonal.
  const Matrix n1 = a1.adjoint() * a1;
  CHECK(n1(s.index(3, 1), s.index(3, 1)).real() == doctest::Approx(3.0));
  CHECK_THROWS_AS(annihilator(s, 3), DomainError);
}

TEST_CASE("pair angular momentum closes the rotation algebra") {
  const TwoModeSpace s = build_space(4);
  const SchwingerSet j = schwinger_operators(s);
  const Matrix comm = j.jx.mat * j.jy.mat - j.jy.mat * j.jx.mat;
  // [jx, jy] = i jz holds exactly on complete total-photon blocks.
  Matrix defect = comm - Complex(0.0, 1.0) * j.jz.mat;
  for (int i = 0; i < s.dim; ++i)
    for (int k = 0; k < s.dim; ++k)
      if (s.total_photons(i) <= s.cutoff && s.total_photons(k) <= s.cutoff)
        CHECK(std::abs(defect(i, k)) <= 1e-12);
  const Matrix sum = annihilator(s, 1).mat.adjoint() * annihilator(s, 1).mat +
                     annihilator(s, 2).mat.adjoint() * annihilator(s, 2).mat;
  CHECK(max_abs(j.n_total.mat - sum) <= 1e-12);
}

TEST_CASE("number states and density construction") {
  const TwoModeSpace s = build_space(3);
  const StateVector psi = number_state(s, 2, 1);
  CHECK(psi.amp(s.index(2, 1)) == Complex(1.0));
  CHECK(psi.amp.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(number_state(s, 4, 0), DomainError);

  const DensityMatrix rho = density_from_state(psi);
  CHECK(rho.mat.trace().real() == doctest::Approx(1.0));
  CHECK(rho.mat(s.index(2, 1), s.index(2, 1)).real() == doctest::Approx(1.0));

  Matrix bad = rho.mat;
  bad(0, 1) = 0.5;  // breaks Hermiticity
  CHECK_THROWS_AS(density_from_matrix(s, bad, 1e-12), ValidationError);
  CHECK_THROWS_AS(density_from_matrix(s, 0.5 * rho.mat), ValidationError);
  Matrix indefinite = rho.mat;
  indefinite(0, 0) = -0.2;
  indefinite(s.index(2, 1), s.index(2, 1)) = 1.2;
  CHECK_THROWS_AS(density_from_matrix(s, indefinite), ValidationError);
}

TEST_CASE("thermal state is a renormalized geometric product") {
  const TwoModeSpace s = build_space(8);
  CHECK(thermal_state(s, 0.0).mat(0, 0).real() == doctest::Approx(1.0));
  const DensityMatrix rho = thermal_state(s, 0.2);
  CHECK(rho.mat.trace().real() == doctest::Approx(1.0));
  CHECK(max_abs(rho.mat - Matrix(rho.mat.diagonal().asDiagonal())) == 0.0);
  const double r = 0.2 / 1.2;
  const double p0 = rho.mat(s.index(0, 3), s.index(0, 3)).real();
  const double p1 = rho.mat(s.index(1, 3), s.index(1, 3)).real();
  CHECK(p1 / p0 == doctest::Approx(r));
  CHECK_THROWS_AS(thermal_state(s, -0.1), ConfigError);
}

TEST_CASE("embedding and restriction move population exactly") {
  const TwoModeSpace small = build_space(3);
  const TwoModeSpace big = build_space(6);
  const DensityMatrix rho = thermal_state(small, 0.5);
  const Matrix up = embed_state(small, big, rho.mat);
  CHECK(up.trace().real() == doctest::Approx(1.0));
  CHECK(up(big.index(2, 1), big.index(1, 2)) == rho.mat(small.index(2, 1), small.index(1, 2)));
  CHECK(max_abs(restrict_state(big, small, up) - rho.mat) == 0.0);

  // Restricting drops exactly the population outside the window.
  const DensityMatrix wide = thermal_state(big, 0.5);
  const Matrix down = restrict_state(big, small, wide.mat);
  double outside = 0.0;
  for (int idx = 0; idx < big.dim; ++idx) {
    auto [n1, n2] = big.occupation(idx);
    if (n1 > small.cutoff || n2 > small.cutoff) outside += wide.mat(idx, idx).real();
  }
  CHECK(std::abs(down.trace().real() + outside - 1.0) <= 1e-14);

  CHECK_THROWS_AS(embed_state(big, small, wide.mat), DimensionError);
  CHECK_THROWS_AS(restrict_state(small, big, rho.mat), DimensionError);
  CHECK_THROWS_AS(embed_state(small, big, wide.mat), DimensionError);
}

TEST_CASE("support level tracks the occupied marginals") {
  const TwoModeSpace s = build_space(6);
  CHECK(support_max_occupation(s, density_from_state(number_state(s, 0, 3)).mat) == 3);
  CHECK(support_max_occupation(s, density_from_state(number_state(s, 2, 1)).mat) == 2);
  CHECK(support_max_occupation(s, thermal_state(s, 0.0).mat) == 0);
}
