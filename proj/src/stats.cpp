#include "kacgc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kacgc {

MeanSe mean_se(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  if (xs.empty()) throw std::invalid_argument("mean_se: empty sample");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const auto n = std::max(p.size(), q.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pi = i < p.size() ? p[i] : 0.0;
    const double qi = i < q.size() ? q[i] : 0.0;
    acc += std::abs(pi - qi);
  }
  return 0.5 * acc;
}

KsResult ks_test(std::vector<double> samples, double (*cdf)(double), double level) {
  if (samples.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  // Asymptotic critical value c(alpha)/sqrt(n) with K(c)=1-alpha.
  double c;
  if (level == 0.01)
    c = 1.62762;
  else if (level == 0.05)
    c = 1.35810;
  else
    c = std::sqrt(-0.5 * std::log(level / 2.0));
  KsResult r;
  r.statistic = d;
  r.critical = c / std::sqrt(n);
  r.pass = d < r.critical;
  return r;
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> weight) {
  if (x.size() != y.size() || x.size() != weight.size() || x.size() < 2)
    throw std::invalid_argument("weighted_line_fit: bad input sizes");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += weight[i];
    sx += weight[i] * x[i];
    sy += weight[i] * y[i];
    sxx += weight[i] * x[i] * x[i];
    sxy += weight[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  LineFit f;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;
  return f;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace kacgc
