/*
 Copyright 2026 The sysid Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef SYSID_RNG_HPP
#define SYSID_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <string_view>

// Counter-based random streams.
//
// A stream is identified by a 64-bit key derived from (seed, path...), and its
// n-th draw is a pure function of (key, n). Draws can therefore be generated in
// any order, on any thread, and always agree.

namespace sysid::rng {

/// Stream tags used as the last path element when keying simulation noise.
enum class Tag : std::uint64_t {
  Input = 1,
  Process = 2,
  Bootstrap = 3,
  Replicate = 4,
  Auxiliary = 5,
};

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : path) {
    key = mix64(key ^ mix64(p + 0x3c6ef372fe94f82bULL));
  }
  return key;
}

/// FNV-1a, used to turn scenario names into stable path elements.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Stream {
public:
  constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter));
  }

  /// Uniform on (0, 1]; never returns 0 so log() is always finite.
  double uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal draw number `counter` (Box-Muller on two uniforms).
  double normal(std::uint64_t counter) const noexcept;

private:
  std::uint64_t key_;
};

} // namespace sysid::rng

#endif // SYSID_RNG_HPP
