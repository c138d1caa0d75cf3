#include "kacgc/model.hpp"

#include <cmath>

namespace kacgc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double maxwellian_pdf(double v) { return std::exp(-kPi * v * v); }

double maxwellian_cdf(double v) {
  // gamma has variance 1/(2*pi): CDF(v) = Phi(v*sqrt(2*pi)) = (1+erf(v*sqrt(pi)))/2.
  return 0.5 * (1.0 + std::erf(v * std::sqrt(kPi)));
}

double sample_maxwellian(RngStream& rng) {
  return rng.normal() / std::sqrt(2.0 * kPi);
}

std::pair<double, double> kac_collide(double v, double w, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {std::fma(v, c, -w * s), std::fma(v, s, w * c)};
}

double log_gc_number_weight(long n, const ModelParams& params) {
  const double m = params.mean_n();
  if (n < 0) throw std::invalid_argument("gc_number_weight: n must be >= 0");
  if (m == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return static_cast<double>(n) * std::log(m) - m - std::lgamma(static_cast<double>(n) + 1.0);
}

double gc_number_weight(long n, const ModelParams& params) {
  return std::exp(log_gc_number_weight(n, params));
}

}  // namespace kacgc
