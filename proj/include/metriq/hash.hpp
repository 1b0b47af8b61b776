// Copyright 2026 The Metriq Authors
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

#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace metriq {

/// Incremental 64-bit hasher: FNV-1a over bytes, splitmix64 finalizer for
/// combining child digests.
class Hasher {
 public:
  Hasher& bytes(std::string_view s) {
    for (unsigned char c : s) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Hasher& u64(std::uint64_t v) {
    state_ = mix(state_ ^ mix(v + 0x9e3779b97f4a7c15ULL));
    return *this;
  }
  Hasher& f64(double d) { return u64(std::bit_cast<std::uint64_t>(d)); }
  Hasher& str(std::string_view s) {
    u64(s.size());
    return bytes(s);
  }

  std::uint64_t digest() const { return mix(state_); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex_digest(std::uint64_t h);

}  // namespace metriq
