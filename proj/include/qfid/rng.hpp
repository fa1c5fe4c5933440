// Copyright 2026 The qfid Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qfid {

/// SplitMix64 finalizer. Used only for seed derivation, never as the stream
/// generator itself.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Substream derivation rule: stream labeled by integers (l1, l2, ...) uses
/// seed splitmix64(...splitmix64(splitmix64(seed) ^ l1)... ^ ln). Trial i of
/// a campaign cell therefore draws from an independent, order-free stream,
/// which keeps results identical under any parallel schedule.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::uint64_t label) {
  return splitmix64(splitmix64(seed) ^ label);
}

template <typename... Labels>
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::uint64_t label,
                                           Labels... rest) {
  return derive_seed(derive_seed(seed, label), rest...);
}

/// Deterministic random stream: std::mt19937_64 (bit-exact across platforms
/// by the standard) with uniforms taken from the top 53 bits and Gaussians
/// via Box-Muller, so no implementation-defined distribution code is
/// involved anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the paired value is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], safe for log
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64.
    return next_u64() % n;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qfid
