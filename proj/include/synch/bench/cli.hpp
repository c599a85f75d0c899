#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synch/bench/config.hpp"

namespace synch::bench {

/// Invalid command line. `flag` names the offending option when known.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string flag, const std::string& message)
      : std::runtime_error(flag.empty() ? message : flag + ": " + message), flag_(std::move(flag)) {}
  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

/// Thrown for --help; carries the help text.
class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(const std::string& text) : std::runtime_error(text) {}
};

namespace detail {

inline std::string names_of_structures() {
  std::string out;
  for (const auto& [s, name] : kStructureNames) out += (out.empty() ? "" : ", ") + std::string(name);
  return out;
}

inline std::string names_of_yield_points() {
  std::string out;
  for (const auto& [p, name] : kYieldPointNames) out += (out.empty() ? "" : ", ") + std::string(name);
  return out;
}

}  // namespace detail

/// argv excludes the program name.
inline BenchConfig parse_cli(const std::vector<std::string>& args) {
  CLI::App app{"Concurrent data-structure benchmark", "synch_bench"};
  std::string structure, pin = "none", mode = "throughput", yield_point, format = "text";
  std::int64_t threads = 1, group_size = 0, victim = 0;
  std::uint64_t runs = 10000, max_work = 0, seed = 1, pool_capacity = 0, watchdog_ms = 120000;

  app.add_option("--structure", structure, "one of: " + detail::names_of_structures());
  app.add_option("--threads", threads, "number of threads");
  app.add_option("--runs", runs, "runs per thread");
  app.add_option("--max-work", max_work, "upper bound of random local work between runs");
  app.add_option("--seed", seed, "workload seed");
  app.add_option("--pin", pin, "none|compact|scatter");
  app.add_option("--group-size", group_size, "threads per group (h-*); 0 = one group");
  app.add_option("--pool-capacity", pool_capacity, "node pool size; 0 = sized from the workload");
  app.add_option("--mode", mode, "throughput|correctness|stall-injection");
  app.add_option("--victim", victim, "thread stalled in stall-injection mode");
  app.add_option("--yield-point", yield_point, "one of: " + detail::names_of_yield_points());
  app.add_option("--format", format, "text|json-lines");
  app.add_option("--watchdog-ms", watchdog_ms, "give up on a run after this many milliseconds");

  app.allow_extras();
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ConversionError& e) {
    throw UsageError("", e.what());
  } catch (const CLI::ParseError& e) {
    throw UsageError("", e.what());
  }

  if (const auto extras = app.remaining(); !extras.empty()) {
    const auto flag = std::find_if(extras.begin(), extras.end(), [](const std::string& a) { return a.starts_with("-"); });
    throw UsageError(flag != extras.end() ? *flag : extras.front(), "unknown flag or stray argument");
  }

  BenchConfig c;
  if (structure.empty()) throw UsageError("--structure", "required");
  const auto s = parse_structure(structure);
  if (!s) throw UsageError("--structure", "unknown structure '" + structure + "'");
  c.structure = *s;
  if (threads < 1 || threads > kMaxThreads) {
    throw UsageError("--threads", "must be in [1, " + std::to_string(kMaxThreads) + "]");
  }
  c.n_threads = static_cast<int>(threads);
  if (runs < 1) throw UsageError("--runs", "must be positive");
  if (runs > kMaxTotalRuns / static_cast<std::uint64_t>(threads)) {
    throw UsageError("--runs", "runs * threads must not exceed 2^40");
  }
  c.runs = runs;
  c.max_work = max_work;
  c.seed = seed;
  const auto p = parse_pin_policy(pin);
  if (!p) throw UsageError("--pin", "expected none, compact or scatter");
  c.pin = *p;
  if (group_size < 0 || group_size > kMaxThreads) throw UsageError("--group-size", "out of range");
  c.group_size = static_cast<int>(group_size);
  c.pool_capacity = pool_capacity;
  const auto m = parse_mode(mode);
  if (!m) throw UsageError("--mode", "expected throughput, correctness or stall-injection");
  c.mode = *m;
  if (victim < 0 || victim >= threads) throw UsageError("--victim", "must name a thread in [0, threads)");
  c.victim = static_cast<int>(victim);
  if (!yield_point.empty()) {
    const auto y = parse_yield_point(yield_point);
    if (!y) throw UsageError("--yield-point", "unknown yield point '" + yield_point + "'");
    c.yield_point = *y;
  }
  if (c.mode == Mode::kStallInjection && !c.yield_point) throw UsageError("--yield-point", "required in stall-injection mode");
  if (c.mode == Mode::kStallInjection && c.n_threads < 2) throw UsageError("--threads", "stall injection needs at least 2");
  const auto f = parse_format(format);
  if (!f) throw UsageError("--format", "expected text or json-lines");
  c.format = *f;
  if (watchdog_ms == 0) throw UsageError("--watchdog-ms", "must be positive");
  c.watchdog_ms = watchdog_ms;
  return c;
}

}  // namespace synch::bench
