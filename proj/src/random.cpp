#include "cudir/random.hpp"

#include <cmath>

namespace cudir {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

RandomStream::RandomStream(SeededStream stream) noexcept
    : key_(mix64(stream.seed) ^ mix64(stream.stream_id * kGolden + kStreamSalt)) {}

std::uint64_t RandomStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::next_uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RandomStream::next_normal() noexcept {
  if (cached_) {
    const double v = *cached_;
    cached_.reset();
    return v;
  }
  for (;;) {
    const double u = 2.0 * next_uniform() - 1.0;
    const double v = 2.0 * next_uniform() - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * m;
    return u * m;
  }
}

}  // namespace cudir
