#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kacgc/fock.hpp"
#include "kacgc/quadrature.hpp"
#include "kacgc/spectral.hpp"

using namespace kacgc;

namespace {

// Trapezoid oracle for angular integrals (1/2pi) int cos^{2n}.
double cos_power_average(int power) {
  const int n = 4096;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::pow(std::cos(2.0 * M_PI * i / n), power);
  return acc / n;
}

}  // namespace

TEST_CASE("normalized hermite polynomials") {
  for (double v : {-2.0, -0.3, 0.0, 1.7}) CHECK(hermite_L(0, v) == 1.0);
  // L_2(v) = (2 pi v^2 - 1)/sqrt(2).
  CHECK(hermite_L(2, 1.0) == doctest::Approx((2.0 * M_PI - 1.0) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(hermite_L(2, 1.0) == doctest::Approx(3.7357).epsilon(1e-4));

  const auto gh = GaussHermite::rule(32);
  for (int m = 0; m <= 12; ++m)
    for (int n = m; n <= 12; ++n) {
      const double ip = gh.integrate([&](double v) { return hermite_L(m, v) * hermite_L(n, v); });
      CHECK(std::abs(ip - (m == n ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("tau coefficients") {
  CHECK(tau(0) == 1.0);
  CHECK(tau(2) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(tau(3) == doctest::Approx(5.0 / 16.0).epsilon(1e-15));
  CHECK(tau(5) == doctest::Approx(cos_power_average(10)).epsilon(1e-12));
  for (int n = 1; n <= 40; ++n) {
    CHECK(tau(n) < tau(n - 1));
    CHECK(tau(n) <= 1.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("sigma coefficients") {
  CHECK(sigma(2, 1) == doctest::Approx(std::sqrt(3.0 / 32.0)).epsilon(1e-14));
  CHECK(sigma(2, 1) == doctest::Approx(0.30619).epsilon(1e-4));
  for (int n = 2; n <= 20; ++n)
    for (int k = 1; k < n; ++k) {
      CHECK(std::abs(sigma(n, k) - sigma_sqrt_form(n, k)) <= 1e-12);
      CHECK(sigma(n, k) == doctest::Approx(sigma(n, n - k)).epsilon(1e-13));
    }
  for (int n = 2; n <= 20; ++n) {
    double s = 0.0;
    for (int k = 1; 2 * k <= n; ++k) s += sigma(n, k) * sigma(n, k);
    CHECK(s <= 0.5 * M_PI * tau(n) + 1e-15);
  }
  for (int n = 1; n <= 30; ++n) CHECK(a2n(n) <= 2.0);
  CHECK_THROWS(sigma(4, 0));
  CHECK_THROWS(sigma(4, 4));
}

TEST_CASE("thermostat matrix is diagonal in the excitation basis") {
  const ModelParams p{8.0, 2.0, 0.0};
  std::vector<ExcitationIndex> labels(3);
  labels[0].alpha = {};             // ground state
  labels[1].alpha = {{2, 1}};       // one excitation -> -rho
  labels[2].alpha = {{0, 2}, {4, 1}};  // three excitations -> -3 rho
  const auto op = build_thermostat_matrix(labels, p);
  CHECK(op.matrix(0, 0) == 0.0);
  CHECK(op.matrix(1, 1) == doctest::Approx(-2.0));
  CHECK(op.matrix(2, 2) == doctest::Approx(-6.0));
  CHECK(op.matrix.cwiseAbs().sum() == doctest::Approx(8.0));
}

TEST_CASE("pair rotation coefficients match the closed forms") {
  // Diagonal of R_12 on single even modes is tau_n, cross terms sigma_{n,k}.
  for (int n = 1; n <= 4; ++n) {
    CHECK(rotation_matrix_element(2 * n, 0, 2 * n, 0) == doctest::Approx(tau(n)).epsilon(1e-12));
    CHECK(rotation_matrix_element(2 * n, 0, 0, 2 * n) == doctest::Approx(tau(n)).epsilon(1e-12));
    for (int k = 1; k < n; ++k)
      CHECK(rotation_matrix_element(2 * n, 0, 2 * k, 2 * (n - k)) ==
            doctest::Approx(sigma(n, k)).epsilon(1e-12));
  }
  // Odd modes are annihilated.
  CHECK(std::abs(rotation_matrix_element(3, 0, 3, 0)) < 1e-14);
  CHECK(std::abs(rotation_matrix_element(1, 0, 1, 0)) < 1e-14);

  // Structural claim for the two-excited-mode expansion: coefficients of
  // R_12 [H_2 x H_2] follow the binomial pattern tau~ * C(2,k) in the H basis.
  // In the normalized L basis the (4,0) and (0,4) entries carry sqrt(4!)/2! =
  // sqrt(6)/... : L_2 L_2 = H_2 H_2 / 2, L_4 = H_4 / sqrt(24).
  const double t22_44 = rotation_matrix_element(2, 2, 4, 0);
  const double t22_22 = rotation_matrix_element(2, 2, 2, 2);
  const double tau11 = t22_22 / 2.0;  // C(2,1) = 2
  CHECK(rotation_matrix_element(2, 2, 0, 4) == doctest::Approx(t22_44).epsilon(1e-12));
  // H-basis coefficient of H_(4,0): tau11 * C(2,0); convert to L basis.
  CHECK(t22_44 == doctest::Approx(tau11 * std::sqrt(24.0) / 2.0).epsilon(1e-10));
  CHECK(tau11 == doctest::Approx(1.0 / 8.0).epsilon(1e-12));

  // Completeness: nothing of degree 4 is missed by the retained targets.
  double leak = 0.0;
  for (int c = 0; c <= 4; ++c)
    for (int d = 0; d <= 4; ++d) {
      if (c + d == 4) continue;
      leak = std::max({leak, std::abs(rotation_matrix_element(2, 2, c, d)),
                       std::abs(rotation_matrix_element(4, 0, c, d))});
    }
  CHECK(leak < 1e-13);

  CHECK_THROWS(rotation_matrix_element(2, 2, 2, 2, RotationQuadrature{3, 64}));
}

TEST_CASE("collision block: paper diagonal values") {
  const ModelParams p{512.0, 1.0, 1.0};
  const auto block = build_collision_block_V4e(12, p);
  // First u label is R_4+ e0 (one excitation): G gives -rho, collisions -lambda/4.
  CHECK(block.labels[0].alpha.at(4) == 1);
  CHECK(block.matrix(0, 0) == doctest::Approx(-p.rho - 0.25 * p.lambda).epsilon(1e-10));
  CHECK(block.symmetry_deviation < 1e-10);
  CHECK(block.gram_deviation < 1e-8);

  // Odd single-mode diagonal: lambda_tilde (R_3 e0, K R_3 e0) = -lambda.
  CHECK(collision_diag_single_mode(3, p) == doctest::Approx(-p.lambda).epsilon(1e-12));
  CHECK(collision_diag_single_mode(5, p) == doctest::Approx(-p.lambda).epsilon(1e-12));
  // Even: -lambda (1 - 2 tau_n).
  CHECK(collision_diag_single_mode(4, p) == doctest::Approx(-p.lambda / 4.0).epsilon(1e-12));
  CHECK(collision_diag_single_mode(6, p) ==
        doctest::Approx(-p.lambda * (1.0 - 2.0 * tau(3))).epsilon(1e-12));
}

TEST_CASE("collision block matches the sector-space oracle") {
  // Independent route: build the same block by explicit ladder operators on a
  // small sector truncation and project the full generator.
  const ModelParams p{3.0, 1.0, 0.7};
  const int k_max = 6;
  const auto space = SectorSpace::build({0, 2, 4}, 45, p);

  auto unit = [&](int mode) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(space.n_modes());
    g[space.position_of_mode(mode)] = 1.0;
    return g;
  };
  const SpMat r0 = build_r_plus(space, unit(0));
  const SpMat r2 = build_r_plus(space, unit(2));
  const SpMat r4 = build_r_plus(space, unit(4));
  const SpMat gen = build_generator_sparse(space);

  std::vector<Eigen::VectorXd> basis;
  Eigen::VectorXd u = r4 * space.ground_vector();
  for (int k = 0; k + 1 < k_max; ++k) {
    basis.push_back(u);
    u = (r0 * u) / std::sqrt(k + 1.0);
  }
  basis.push_back(u);
  Eigen::VectorXd w = (r2 * (r2 * space.ground_vector())) / std::sqrt(2.0);
  std::vector<Eigen::VectorXd> wbasis;
  for (int k = 0; k + 2 < k_max; ++k) {
    wbasis.push_back(w);
    w = (r0 * w) / std::sqrt(k + 1.0);
  }
  wbasis.push_back(w);
  basis.insert(basis.end(), wbasis.begin(), wbasis.end());

  const auto block = build_collision_block_V4e(k_max, p);
  REQUIRE(static_cast<int>(basis.size()) == block.matrix.rows());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    CHECK(basis[i].dot(basis[i]) == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double oracle = basis[i].dot(gen * basis[j]);
      CHECK(block.matrix(i, j) == doctest::Approx(oracle).epsilon(1e-7));
    }
  }
}

TEST_CASE("spectral gaps") {
  // Pure thermostat: the one-excitation level is the first gap's eigenspace,
  // so the reported second point is -2 rho.
  const auto pure = spectral_gaps(ModelParams{512.0, 1.0, 0.0}, 20);
  CHECK(pure.delta == doctest::Approx(-1.0));
  CHECK(pure.delta2 == doctest::Approx(-2.0).epsilon(1e-10));

  const ModelParams p{512.0, 1.0, 1.0};
  const auto gaps = spectral_gaps(p, 40);
  CHECK(gaps.condition_ok);
  CHECK(gaps.delta == doctest::Approx(-1.0));
  CHECK(gaps.lower == doctest::Approx(-1.25));
  CHECK(gaps.upper == doctest::Approx(-1.25 + 2.0 / std::sqrt(512.0)).epsilon(1e-14));
  CHECK(gaps.delta2 >= gaps.lower - 1e-12);
  CHECK(gaps.delta2 < gaps.upper);
  CHECK(gaps.drift < 1e-8);

  // Variational truncation: |Delta2| is nonincreasing under refinement.
  double prev = std::numeric_limits<double>::infinity();
  for (int k_max : {10, 20, 30, 40}) {
    const auto g = spectral_gaps(p, k_max);
    CHECK(-g.delta2 <= prev + 1e-13);
    prev = -g.delta2;
  }

  // Violating the smallness condition only flags, still computes.
  const auto loud = spectral_gaps(ModelParams{100.0, 1.0, 3.0}, 12);
  CHECK(!loud.condition_ok);
}

TEST_CASE("gershgorin bounds") {
  const ModelParams p{512.0, 1.0, 1.0};
  const auto [odd1, even1] = gershgorin_lower_bounds(1, p);
  const double sq = std::sqrt(1.0 / 512.0);
  CHECK(odd1 == doctest::Approx(std::min(2.0 - sq, 2.0 - sq)).epsilon(1e-14));
  CHECK(odd1 == doctest::Approx(1.95581).epsilon(1e-5));

  const auto [odd3, even3] = gershgorin_lower_bounds(3, p);
  CHECK(even3 == doctest::Approx(1.0 + (1.0 - 5.0 / 8.0) - 2.0 * sq).epsilon(1e-12));
  CHECK(even3 == doctest::Approx(1.28661).epsilon(1e-5));
  CHECK(even3 > 1.25);

  // At lambda = 0 both formulas collapse to min{rho, 2 rho} = rho, which is
  // also the exact block infimum for m >= 3 (single-mode states sit at -rho).
  const auto [odd0, even0] = gershgorin_lower_bounds(2, ModelParams{512.0, 1.0, 0.0});
  CHECK(odd0 == doctest::Approx(1.0));
  CHECK(even0 == doctest::Approx(1.0));
}
