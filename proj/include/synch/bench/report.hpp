#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "synch/bench/config.hpp"

namespace synch::bench {

struct CheckResult {
  std::string check;
  bool pass = false;
  std::string detail;

  bool operator==(const CheckResult&) const = default;
};

struct BenchReport {
  BenchConfig config;
  std::uint64_t wall_time_ns = 0;
  std::uint64_t total_ops = 0;
  double throughput_ops_per_sec = 0;
  double mean_op_latency_ns = 0;  // wall time per operation of one thread
  std::vector<CheckResult> correctness;
  std::uint64_t seed = 0;
  std::string stall_verdict;  // "completed", "blocked", "not-reached"; empty outside stall injection
  bool watchdog_fired = false;

  bool operator==(const BenchReport&) const = default;

  bool passed() const noexcept {
    for (const auto& c : correctness) {
      if (!c.pass) return false;
    }
    return true;
  }

  void add_check(std::string name, bool pass, std::string detail = {}) {
    correctness.push_back({std::move(name), pass, std::move(detail)});
  }

  /// Fills the derived rates from wall time and op count.
  void finish_rates() noexcept {
    const double seconds = static_cast<double>(wall_time_ns) / 1e9;
    throughput_ops_per_sec = seconds > 0 ? static_cast<double>(total_ops) / seconds : 0;
    const double per_thread = config.n_threads > 0 ? static_cast<double>(total_ops) / config.n_threads : 0;
    mean_op_latency_ns = per_thread > 0 ? static_cast<double>(wall_time_ns) / per_thread : 0;
  }
};

inline nlohmann::json to_json(const BenchConfig& c) {
  return {
      {"structure", to_string(c.structure)},
      {"threads", c.n_threads},
      {"runs", c.runs},
      {"max_work", c.max_work},
      {"seed", c.seed},
      {"pin", to_string(c.pin)},
      {"group_size", c.group_size},
      {"pool_capacity", c.pool_capacity},
      {"mode", to_string(c.mode)},
      {"victim", c.victim},
      {"yield_point", c.yield_point ? nlohmann::json(std::string(to_string(*c.yield_point))) : nlohmann::json()},
      {"format", to_string(c.format)},
      {"watchdog_ms", c.watchdog_ms},
  };
}

inline nlohmann::json to_json(const BenchReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.correctness) checks.push_back({{"check", c.check}, {"pass", c.pass}, {"detail", c.detail}});
  return {
      {"config", to_json(r.config)},
      {"wall_time_ns", r.wall_time_ns},
      {"total_ops", r.total_ops},
      {"throughput_ops_per_sec", r.throughput_ops_per_sec},
      {"mean_op_latency_ns", r.mean_op_latency_ns},
      {"correctness", checks},
      {"seed", r.seed},
      {"stall_verdict", r.stall_verdict},
      {"watchdog_fired", r.watchdog_fired},
  };
}

namespace detail {

template <class T, class Parse>
T parse_enum(const nlohmann::json& j, const char* field, Parse parse) {
  const auto v = parse(j.at(field).get<std::string>());
  if (!v) throw std::invalid_argument(std::string("report: bad value for ") + field);
  return *v;
}

}  // namespace detail

inline BenchConfig config_from_json(const nlohmann::json& j) {
  BenchConfig c;
  c.structure = detail::parse_enum<Structure>(j, "structure", parse_structure);
  c.n_threads = j.at("threads").get<int>();
  c.runs = j.at("runs").get<std::uint64_t>();
  c.max_work = j.at("max_work").get<std::uint64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.pin = detail::parse_enum<PinPolicy>(j, "pin", parse_pin_policy);
  c.group_size = j.at("group_size").get<int>();
  c.pool_capacity = j.at("pool_capacity").get<std::uint64_t>();
  c.mode = detail::parse_enum<Mode>(j, "mode", parse_mode);
  c.victim = j.at("victim").get<int>();
  if (!j.at("yield_point").is_null()) c.yield_point = detail::parse_enum<YieldPoint>(j, "yield_point", parse_yield_point);
  c.format = detail::parse_enum<Format>(j, "format", parse_format);
  c.watchdog_ms = j.at("watchdog_ms").get<std::uint64_t>();
  return c;
}

inline BenchReport report_from_json(const nlohmann::json& j) {
  BenchReport r;
  r.config = config_from_json(j.at("config"));
  r.wall_time_ns = j.at("wall_time_ns").get<std::uint64_t>();
  r.total_ops = j.at("total_ops").get<std::uint64_t>();
  r.throughput_ops_per_sec = j.at("throughput_ops_per_sec").get<double>();
  r.mean_op_latency_ns = j.at("mean_op_latency_ns").get<double>();
  for (const auto& c : j.at("correctness")) {
    r.correctness.push_back({c.at("check").get<std::string>(), c.at("pass").get<bool>(), c.at("detail").get<std::string>()});
  }
  r.seed = j.at("seed").get<std::uint64_t>();
  r.stall_verdict = j.at("stall_verdict").get<std::string>();
  r.watchdog_fired = j.at("watchdog_fired").get<bool>();
  return r;
}

/// Parses one json-lines record.
inline BenchReport parse_report(const std::string& line) { return report_from_json(nlohmann::json::parse(line)); }

inline void emit_report(const BenchReport& r, Format format, std::ostream& out) {
  if (format == Format::kJsonLines) {
    out << to_json(r).dump() << '\n';
    return;
  }
  const BenchConfig& c = r.config;
  out << "structure      " << to_string(c.structure) << '\n'
      << "threads        " << c.n_threads << '\n'
      << "runs           " << c.runs << '\n'
      << "max_work       " << c.max_work << '\n'
      << "seed           " << c.seed << '\n'
      << "pin            " << to_string(c.pin) << '\n'
      << "group_size     " << c.group_size << '\n'
      << "pool_capacity  " << c.effective_pool_capacity() << '\n'
      << "mode           " << to_string(c.mode) << '\n';
  if (c.mode == Mode::kStallInjection) {
    out << "victim         " << c.victim << '\n'
        << "yield_point    " << (c.yield_point ? to_string(*c.yield_point) : "-") << '\n'
        << "stall_verdict  " << r.stall_verdict << '\n';
  }
  out << "wall_time_ns   " << r.wall_time_ns << '\n'
      << "total_ops      " << r.total_ops << '\n'
      << "throughput     " << static_cast<std::uint64_t>(r.throughput_ops_per_sec) << " ops/s\n"
      << "mean_latency   " << r.mean_op_latency_ns << " ns/op\n";
  if (r.watchdog_fired) out << "watchdog       fired after " << c.watchdog_ms << " ms\n";
  for (const auto& check : r.correctness) {
    out << (check.pass ? "PASS " : "FAIL ") << check.check;
    if (!check.detail.empty()) out << ": " << check.detail;
    out << '\n';
  }
}

inline std::string emit_report(const BenchReport& r, Format format) {
  std::ostringstream out;
  emit_report(r, format, out);
  return out.str();
}

}  // namespace synch::bench
