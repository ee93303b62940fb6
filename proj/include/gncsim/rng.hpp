/*
 * Copyright 2026 The gncsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace gncsim {

/// Counter-based PRNG (Philox-4x32, 10 rounds).
///
/// Every (seed, stream) pair addresses a statistically independent sequence,
/// and the position inside a sequence is a 64-bit block counter, so any point
/// of any stream is reachable in O(1). The raw integer output is reproducible
/// bit-for-bit on every platform: generation uses integer arithmetic only,
/// and `uniform()` adds a single exact IEEE-754 multiply.
class Rng {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t seed() const {
    return static_cast<std::uint64_t>(key_[1]) << 32 | key_[0];
  }
  std::uint64_t stream() const { return stream_; }

  /// One application of the keyed bijection; exposed for known-answer tests.
  static Block philox4x32(Block counter, Key key) {
    std::uint32_t k0 = key[0];
    std::uint32_t k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += kWeyl0;
        k1 += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * counter[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * counter[2];
      counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ k0,
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ k1,
                 static_cast<std::uint32_t>(p0)};
    }
    return counter;
  }

  std::uint32_t next_u32() {
    if (index_ == 4) {
      refill();
    }
    return block_out_[index_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return hi << 32 | lo;
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer on [0, n). Rejection keeps the draw unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) {
      throw std::invalid_argument("Rng::below: bound must be positive");
    }
    const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x = next_u64();
    while (x < min) {
      x = next_u64();
    }
    return x % n;
  }

  /// Standard normal via Box-Muller; underlying uniforms are consumed in
  /// pairs and the second variate is cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr double kPi = 3.14159265358979323846;

  void refill() {
    const Block counter = {static_cast<std::uint32_t>(block_),
                           static_cast<std::uint32_t>(block_ >> 32),
                           static_cast<std::uint32_t>(stream_),
                           static_cast<std::uint32_t>(stream_ >> 32)};
    block_out_ = philox4x32(counter, key_);
    ++block_;
    index_ = 0;
  }

  Key key_;
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  Block block_out_{};
  int index_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace gncsim
