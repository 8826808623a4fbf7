// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <cstdlib>
#include <iostream>
#include <thread>

#include "hypgaf/acceptance.hpp"

int main() {
  namespace acc = hypgaf::acceptance;
  acc::Options opt;
  if (const char* env = std::getenv("HYPGAF_THREADS")) {
    opt.threads = std::max(1, std::atoi(env));
  } else {
    opt.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  const auto results = acc::run_all(acc::Subject::library(), opt);
  for (const auto& r : results) std::cout << acc::format_line(r) << '\n';
  const bool ok = acc::all_pass(results);
  std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILED") << '\n';
  return ok ? 0 : 1;
}
