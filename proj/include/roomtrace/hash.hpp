// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROOMTRACE_HASH_HPP
#define ROOMTRACE_HASH_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace roomtrace {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// 64-bit FNV-1a. Used for frame fingerprints and stage cache keys; the
/// Python runner computes the same function over the same bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

/// Lowercase, zero-padded 16-digit hex.
std::string to_hex(std::uint64_t value);

}  // namespace roomtrace

#endif  // ROOMTRACE_HASH_HPP
