#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lostsales::rng {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Child-seed derivation used for every stream in the project:
///   hash64(root, tag, index) = mix64(mix64(mix64(root) ^ fnv1a64(tag)) ^ index)
/// Any implementation reproducing this formula and seeding std::mt19937_64
/// with the result reproduces the stream tree.
std::uint64_t hash64(std::uint64_t root, std::string_view tag, std::uint64_t index) noexcept;

/// A deterministic random stream. Streams are never shared between threads;
/// parallel work derives one child per unit of work.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  static Stream child(std::uint64_t root, std::string_view tag, std::uint64_t index) {
    return Stream(hash64(root, tag, index));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) built from the top 53 bits (portable, unlike
  /// std::uniform_real_distribution).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace lostsales::rng
