// Copyright 2026 The ratio-mc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RATIO_MC_CORE_RNG_HPP
#define RATIO_MC_CORE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

/**
 * \file
 * \brief Counter-based, reproducible random number streams.
 *
 * Streams are built on the Philox4x32-10 bijection (Salmon et al., "Parallel random numbers:
 * as easy as 1, 2, 3", SC'11). The 64-bit seed is the Philox key; the 128-bit counter holds
 * the block index in its low half and the stream id in its high half. Any (seed, stream_id)
 * pair is therefore reachable by arithmetic alone, and distinct stream ids never overlap for
 * fewer than 2^64 blocks per stream.
 */

namespace ratio_mc {

/// Name and version of the generator, recorded in every output manifest.
inline constexpr std::string_view kRngAlgorithm = "philox4x32-10/v1";

namespace detail {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxBlock philox_round(const PhiloxBlock& ctr, const PhiloxKey& key) noexcept {
  constexpr std::uint64_t kM0 = 0xD2511F53u;
  constexpr std::uint64_t kM1 = 0xCD9E8D57u;
  const std::uint64_t p0 = kM0 * ctr[0];
  const std::uint64_t p1 = kM1 * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

/// The Philox4x32 bijection with 10 rounds.
constexpr PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    ctr = philox_round(ctr, key);
  }
  return ctr;
}

}  // namespace detail

/// A single-owner random stream identified by (seed, stream_id).
/**
 * Models `std::uniform_random_bit_generator` with 64-bit output. Derived draws
 * (uniform reals, normals, bounded integers) use fixed transforms so sequences are
 * bit-identical across standard library implementations.
 */
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept : seed_{seed}, stream_id_{stream_id} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

  result_type operator()() noexcept {
    if (lane_ == 2) {
      refill();
    }
    return buffer_[lane_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe to take the logarithm of.
  double uniform_pos() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal draw via the Box-Muller transform; the sine branch is cached.
  double normal() noexcept {
    if (cached_normal_) {
      const double z = *cached_normal_;
      cached_normal_.reset();
      return z;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    cached_normal_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

  /// Unbiased integer in [0, n) (Lemire's multiply-and-reject). Requires n > 0.
  std::uint64_t uniform_index(std::uint64_t n) noexcept {
    auto product = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(product);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  void refill() noexcept {
    const detail::PhiloxBlock ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(stream_id_),
                                  static_cast<std::uint32_t>(stream_id_ >> 32)};
    const detail::PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = detail::philox4x32_10(ctr, key);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    lane_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  std::size_t lane_ = 2;
  std::optional<double> cached_normal_;
};

inline RngStream create_rng(std::uint64_t seed, std::uint64_t stream_id) noexcept { return RngStream{seed, stream_id}; }

inline std::vector<double> standard_normal(RngStream& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& z : out) {
    z = rng.normal();
  }
  return out;
}

/// In-place Fisher-Yates shuffle driven by `RngStream::uniform_index`.
template <class T>
void shuffle(std::vector<T>& items, RngStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace ratio_mc

#endif
