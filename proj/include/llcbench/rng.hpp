#pragma once

// Counter-based random streams.
//
// Every stream is a SplitMix64 sequence: output k of the stream with key K is
// mix64(K + (k + 1) * 0x9E3779B97F4A7C15). Jumping to any position is O(1), so
// sample i of a dataset or batch t of a chain is addressed directly by deriving
// a key from the seeds and the index. Doubles take the top 53 bits. Normals use
// the cosine branch of Box-Muller and consume exactly two uniforms each.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

#include <Eigen/Core>

namespace llcbench {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Order-sensitive key derivation.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t child) noexcept {
  return mix64(parent + kGolden * (mix64(child) | 1ULL));
}

constexpr std::uint64_t derive_key(std::uint64_t parent, std::string_view tag) noexcept {
  // FNV-1a of the tag
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return derive_key(parent, h);
}

class CounterStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterStream(std::uint64_t key, std::uint64_t position = 0) noexcept
      : key_(key), position_(position) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return mix64(key_ + (++position_) * kGolden); }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t position() const noexcept { return position_; }
  constexpr void seek(std::uint64_t position) noexcept { position_ = position; }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) noexcept { return low + (high - low) * uniform(); }

  /// Uniform on {0, ..., bound - 1} by 128-bit multiply-shift; bias is below bound / 2^64.
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

  /// Uniform on the closed integer range [low, high].
  std::int64_t between(std::int64_t low, std::int64_t high) noexcept {
    return low + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(high - low) + 1));
  }

  bool coin() noexcept { return ((*this)() >> 63) != 0; }

  double normal() noexcept {
    // 1 - u keeps the log argument in (0, 1]
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename Derived>
  void fill_normal(Eigen::DenseBase<Derived>& out) noexcept {
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = normal();
  }

 private:
  std::uint64_t key_;
  std::uint64_t position_;
};

}  // namespace llcbench
