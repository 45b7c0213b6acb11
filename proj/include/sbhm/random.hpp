// Copyright 2026 The sbhm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SBHM_RANDOM_HPP
#define SBHM_RANDOM_HPP

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

namespace sbhm {

/// Anything that yields independent standard normal draws.
template <class R>
concept NormalSource = requires(R& r) {
  { r.normal() } -> std::convertible_to<double>;
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index` under `master`. Distinct indices give distinct
/// seeds for a fixed master.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// xoshiro256++ (Blackman and Vigna); satisfies
/// std::uniform_random_bit_generator. The 256-bit state is filled from a
/// 64-bit seed with SplitMix64.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) {
    for (auto& w : s_) {
      seed += 0x9e3779b97f4a7c15ULL;
      w = mix64(seed - 0x9e3779b97f4a7c15ULL);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t out = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
};

/// Per-trial random stream: xoshiro256++ bits, normals from Boost.Random's
/// ziggurat normal_distribution. A seed reproduces its stream exactly for a
/// given Boost version; across versions and implementations only the
/// distribution is guaranteed, so such comparisons must be statistical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static Rng substream(std::uint64_t master, std::uint64_t index) {
    return Rng(substream_seed(master, index));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

 private:
  Xoshiro256pp engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace sbhm

#endif  // SBHM_RANDOM_HPP
