#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kacgc::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

/// Runs the full verification suite (stationarity, moment laws, oracle
/// equivalence, both spectral gaps, exact coefficients, commutators, entropy
/// inequalities and decay, hydrodynamic closed form, propagation of chaos).
/// One line per criterion is written to `progress` as results arrive.
std::vector<CriterionResult> run_all(int threads, std::ostream* progress = nullptr);

std::string format_result(const CriterionResult& r);

}  // namespace kacgc::acceptance
