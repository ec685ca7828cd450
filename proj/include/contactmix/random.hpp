// Copyright 2026 The contactmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONTACTMIX_RANDOM_HPP
#define CONTACTMIX_RANDOM_HPP

#include <cstdint>
#include <random>

namespace contactmix {

/// SplitMix64 finalizer. Used to derive well-separated per-agent seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seeded random stream. The engine (std::mt19937_64) is fully specified by the
/// standard, and the real-valued conversions are done here instead of through
/// <random> distributions, whose output is implementation-defined. Same seed,
/// same sequence, on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

  /// Independent stream for one entity (agent, run, ...) under a master seed.
  static RandomStream derive(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RandomStream(splitmix64(master_seed) ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [0, n) by rejection sampling; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace contactmix

#endif  // CONTACTMIX_RANDOM_HPP
