#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kacgc {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and standard error (i.i.d. replicas).
MeanSe mean_se(std::span<const double> xs);

/// Total variation distance (1/2 L1) between two finite laws; shorter vector
/// is zero-padded.
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // at the requested level (asymptotic)
  bool pass = false;
};
KsResult ks_test(std::vector<double> samples, double (*cdf)(double), double level);

/// Weighted least-squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> weight);

/// FNV-1a over bytes; used to stamp outputs with a config fingerprint.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace kacgc
