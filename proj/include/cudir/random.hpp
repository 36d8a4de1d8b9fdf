#pragma once

#include <cstdint>
#include <optional>

namespace cudir {

/// Identifies a reproducible random stream. Identical (seed, stream_id)
/// pairs yield identical draws on every platform.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Stream (seed, stream_id + offset), used for shards and blocks.
  [[nodiscard]] SeededStream derive(std::uint64_t offset) const noexcept { return {seed, stream_id + offset}; }

  friend bool operator==(const SeededStream&, const SeededStream&) = default;
};

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based SplitMix64 generator: draw k of a stream is
///   mix64(key + (k + 1) * 0x9E3779B97F4A7C15),
///   key = mix64(seed) ^ mix64(stream_id * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03).
/// Normals come from the polar Box-Muller method; the second variate of each
/// accepted pair is cached and returned by the next call.
class RandomStream {
 public:
  explicit RandomStream(SeededStream stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() noexcept;
  double next_normal() noexcept;

  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> cached_;
};

}  // namespace cudir
