// Acceptance suite: runs every verification criterion at its stated tolerance
// and prints one pass/fail line per criterion.
#include <cstdlib>
#include <iostream>
#include <thread>

#include "kacgc/acceptance.hpp"

int main() {
  const int threads = std::max(2u, std::thread::hardware_concurrency());
  const auto results = kacgc::acceptance::run_all(threads, &std::cout);
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILURES above")
            << std::endl;
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
