#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace blocksolve {

// Philox4x32-10 counter-based generator. Problem generators derive one
// substream per matrix from (instance seed, stream label): the label is
// FNV-1a hashed into the upper counter words, the seed forms the key, and
// draws advance the lower counter words. Identical (seed, label) pairs
// therefore reproduce identical streams on any platform.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::string_view label) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
    const std::uint64_t h = fnv1a(label);
    ctr_[2] = static_cast<std::uint32_t>(h);
    ctr_[3] = static_cast<std::uint32_t>(h >> 32);
  }

  std::uint64_t next_u64() {
    if (have_ == 0) {
      refill();
      have_ = 2;
    }
    --have_;
    return out_[1 - have_];
  }

  // Uniform in (0, 1]; never returns 0 so log() is always safe.
  double next_uniform() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return h;
  }

 private:
  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
  }

  void refill() {
    std::uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      const std::uint32_t hi0 = mulhi(0xD2511F53u, c0), lo0 = 0xD2511F53u * c0;
      const std::uint32_t hi1 = mulhi(0xCD9E8D57u, c2), lo1 = 0xCD9E8D57u * c2;
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = (static_cast<std::uint64_t>(c0) << 32) | c1;
    out_[1] = (static_cast<std::uint64_t>(c2) << 32) | c3;
    // advance the 64-bit draw counter
    if (++ctr_[0] == 0) ++ctr_[1];
  }

  std::uint32_t key_[2] = {0, 0};
  std::uint32_t ctr_[4] = {0, 0, 0, 0};
  std::uint64_t out_[2] = {0, 0};
  int have_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace blocksolve
