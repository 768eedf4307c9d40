#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "biharm/verify/acceptance.hpp"

// Usage: acceptance [id ...]. Prints one line per check; exit status 0 iff
// all selected checks pass.
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  bool ok = true;
  for (const auto& r : biharm::verify::run_checks(ids)) {
    std::cout << biharm::verify::format(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
