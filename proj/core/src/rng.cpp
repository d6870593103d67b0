#include "lostsales/rng.hpp"

namespace lostsales::rng {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash64(std::uint64_t root, std::string_view tag, std::uint64_t index) noexcept {
  return mix64(mix64(mix64(root) ^ fnv1a64(tag)) ^ index);
}

}  // namespace lostsales::rng
