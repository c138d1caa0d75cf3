#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kacgc/model.hpp"
#include "kacgc/quadrature.hpp"
#include "kacgc/rng.hpp"
#include "kacgc/stats.hpp"

using namespace kacgc;

namespace {

// Independent quadrature oracle: composite Simpson on [-6, 6].
template <typename F>
double simpson(F&& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("maxwellian density") {
  CHECK(maxwellian_pdf(0.0) == 1.0);
  CHECK(maxwellian_pdf(1.3) == maxwellian_pdf(-1.3));
  CHECK(maxwellian_pdf(2.0) > 0.0);

  const double mass = simpson([](double v) { return maxwellian_pdf(v); }, -6.0, 6.0, 4000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  const double second =
      simpson([](double v) { return v * v * maxwellian_pdf(v); }, -6.0, 6.0, 4000);
  CHECK(second == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-9));
}

TEST_CASE("maxwellian sampling matches gamma") {
  RngStream rng(7, 1);
  const int n = 1000000;
  std::vector<double> xs(n);
  double sum = 0.0, sum2 = 0.0;
  for (auto& x : xs) {
    x = sample_maxwellian(rng);
    sum += x;
    sum2 += x * x;
  }
  const double var_exact = 1.0 / (2.0 * M_PI);
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double se_mean = std::sqrt(var_exact / n);
  const double se_var = var_exact * std::sqrt(2.0 / n);  // normal fourth-moment
  CHECK(std::abs(mean) < 3.0 * se_mean);
  CHECK(std::abs(var - var_exact) < 3.0 * se_var);

  const auto ks = ks_test(std::move(xs), maxwellian_cdf, 0.05);
  CHECK(ks.pass);
}

TEST_CASE("kac collision rotates the pair") {
  auto [v0, w0] = kac_collide(0.37, -1.2, 0.0);
  CHECK(v0 == doctest::Approx(0.37));
  CHECK(w0 == doctest::Approx(-1.2));

  auto [v1, w1] = kac_collide(0.37, -1.2, M_PI / 2.0);
  CHECK(v1 == doctest::Approx(1.2));
  CHECK(w1 == doctest::Approx(0.37));

  RngStream rng(11, 1);
  for (int i = 0; i < 100; ++i) {
    auto [vp, wp] = kac_collide(1.0, 2.0, rng.uniform() * 2.0 * M_PI);
    CHECK(vp * vp + wp * wp == doctest::Approx(5.0).epsilon(1e-12));
  }
}

TEST_CASE("kac collision conserves energy to a few ulp") {
  RngStream rng(13, 1);
  for (int i = 0; i < 20000; ++i) {
    const double v = 4.0 * (rng.uniform() - 0.5) * std::exp(3.0 * (rng.uniform() - 0.5));
    const double w = 4.0 * (rng.uniform() - 0.5) * std::exp(3.0 * (rng.uniform() - 0.5));
    const long double e = (long double)v * v + (long double)w * w;
    auto [vp, wp] = kac_collide(v, w, rng.uniform() * 2.0 * M_PI);
    const long double ep = (long double)vp * vp + (long double)wp * wp;
    CHECK(std::abs(double(ep - e)) <= 4.0 * std::ldexp(1.0, std::ilogb(double(e)) - 52));
  }
}

TEST_CASE("grand canonical number weights") {
  ModelParams unit{1.0, 1.0, 0.0};
  CHECK(gc_number_weight(0, unit) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  ModelParams p{20.0, 1.0, 0.0};
  for (long n = 1; n <= 50; ++n) {
    const double lhs = p.rho * n * gc_number_weight(n, p);
    const double rhs = p.mu * gc_number_weight(n - 1, p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }

  double mass = 0.0;
  for (long n = 0; n <= 200; ++n) mass += gc_number_weight(n, p);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  // Iterative evaluation as an independent route to the log-gamma one.
  ModelParams q{5.0, 1.0, 0.0};
  double w = std::exp(-5.0);
  for (long n = 0; n <= 50; ++n) {
    CHECK(gc_number_weight(n, q) == doctest::Approx(w).epsilon(1e-12));
    w *= 5.0 / (n + 1.0);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(ModelParams{1.0, 0.0, 0.0}.validate());
  CHECK_THROWS(ModelParams{-1.0, 1.0, 0.0}.validate());
  CHECK_THROWS(ModelParams{0.0, 1.0, 1.0}.validate());  // collisions need inflow
  CHECK_NOTHROW(ModelParams{0.0, 1.0, 0.0}.validate()); // pure death is allowed
  CHECK(ModelParams{0.0, 1.0, 0.0}.lambda_tilde() == 0.0);
  const ModelParams p{20.0, 2.0, 3.0};
  CHECK(p.lambda_tilde() * p.mu == doctest::Approx(p.lambda * p.rho).epsilon(1e-15));
}

TEST_CASE("gauss-hermite rule integrates gamma moments") {
  const auto gh = GaussHermite::rule(24);
  CHECK(gh.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(gh.integrate([](double v) { return v * v; }) ==
        doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-13));
  // Degree-8 monomial: exact value 105/(2 pi)^4 for the Gaussian of variance
  // 1/(2 pi).
  const double m8 = 105.0 / std::pow(2.0 * M_PI, 4);
  CHECK(gh.integrate([](double v) { return std::pow(v, 8); }) ==
        doctest::Approx(m8).epsilon(1e-12));
}
