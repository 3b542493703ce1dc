#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "sclaw/core/grid.hpp"

namespace sclaw {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// Output depends only on (key, counter), which gives substreams for free.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Deterministic Gaussian source identified by (master_seed, stream_index).
///
/// Uniforms come from Philox blocks keyed by the master seed with the stream
/// index in the upper counter words; normals use the Marsaglia polar method,
/// which needs only log and sqrt.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_seed_(master_seed), stream_index_(stream_index) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::uint64_t next_u64() noexcept {
    if (buffered_ == 0) refill();
    return buffer_[--buffered_];
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double x, y, s;
    do {
      x = 2.0 * uniform() - 1.0;
      y = 2.0 * uniform() - 1.0;
      s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = y * m;
    has_spare_ = true;
    return x * m;
  }

 private:
  void refill() noexcept {
    const Philox4x32::Key key{static_cast<std::uint32_t>(master_seed_),
                              static_cast<std::uint32_t>(master_seed_ >> 32)};
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(stream_index_),
                                  static_cast<std::uint32_t>(stream_index_ >> 32)};
    const auto r = Philox4x32::generate(ctr, key);
    ++block_;
    // Served from the back: buffer_[1] first.
    buffer_[0] = (static_cast<std::uint64_t>(r[3]) << 32) | r[2];
    buffer_[1] = (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
    buffered_ = 2;
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// I.i.d. N(0, variance_per_cell) values, one per cell.
/// With variance dt/dx this is the increment of a cylindrical Wiener process.
inline GridField gaussian_field(RngStream& stream, TorusGrid grid, double variance_per_cell) {
  require(variance_per_cell >= 0.0 && std::isfinite(variance_per_cell),
          "gaussian_field: variance must be finite and non-negative");
  GridField out(grid);
  if (variance_per_cell == 0.0) return out;
  const double sd = std::sqrt(variance_per_cell);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sd * stream.normal();
  return out;
}

/// In-place variant used by the steppers to avoid reallocation.
inline void fill_gaussian(RngStream& stream, std::span<double> out, double variance_per_cell) {
  const double sd = std::sqrt(variance_per_cell);
  for (double& v : out) v = sd * stream.normal();
}

}  // namespace sclaw
