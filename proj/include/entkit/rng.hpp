#pragma once

#include <cstdint>

namespace entkit {

/// Counter-based splittable generator: the stream for (seed, trial) is a
/// pure function of the pair, so trials can run on any thread in any order
/// and still reproduce byte-identical reports.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream = 0) {
    state_ = mix(mix(mix(0x9e3779b97f4a7c15ull ^ seed) + trial) + stream);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// uniform in [0, 1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// uniform integer in [lo, hi] inclusive
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace entkit
