// Command-line front end for the benchmark harness.
// Exit status: 0 all checks passed, 1 a check failed, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "synch/bench.hpp"

int main(int argc, char** argv) {
  using namespace synch::bench;
  BenchConfig config;
  try {
    config = parse_cli(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  BenchReport report;
  try {
    report = run(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  emit_report(report, config.format, std::cout);
  std::cout.flush();
  const int status = report.passed() ? 0 : 1;
  // A run abandoned by the watchdog still has threads spinning; skip
  // destructors and leave immediately.
  if (report.watchdog_fired) std::_Exit(status);
  return status;
}
