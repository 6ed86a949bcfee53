#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace entkit {

struct FuzzConfig {
  std::uint64_t seed = 1;
  int trials = 100;
  int threads = 0;  // 0 = library default
  double tolerance = 1e-9;
  std::vector<std::string> selected;  // empty = every registered inequality
};

struct InequalityStat {
  std::string name;
  int trials = 0;
  int failures = 0;
  double max_utilization = 0;  // lhs / rhs at the tightest instance
  double tightest_lhs = 0;
  double tightest_rhs = 0;
  std::string tightest_instance;  // serialized JSON
};

struct FuzzReport {
  std::uint64_t seed = 0;
  int trials = 0;
  double tolerance = 0;
  int total_failures = 0;
  std::vector<InequalityStat> stats;

  /// Deterministic bytes: identical seed and config give identical output
  /// for any worker-thread count.
  std::string to_json_bytes() const;
};

const std::vector<std::string>& fuzz_check_names();

/// Evaluates every selected inequality on seeded random instances. Trials
/// run in parallel by index; the reduction is serial in index order.
FuzzReport run_fuzz(const FuzzConfig& cfg);

}  // namespace entkit
