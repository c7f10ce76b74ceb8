// Copyright 2026 The kdnas Authors.
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

#ifndef KDNAS_RANDOM_H_
#define KDNAS_RANDOM_H_

#include <cstdint>
#include <initializer_list>

namespace kdnas {

// splitmix64 finalizer.
inline std::uint64_t MixBits(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and a path of stream
// ids (step index, region id, ...). Used instead of carrying generator state
// so checkpoints only need counters.
inline std::uint64_t DeriveSeed(std::uint64_t base,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = MixBits(base);
  for (std::uint64_t p : path) h = MixBits(h ^ MixBits(p + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace kdnas

#endif  // KDNAS_RANDOM_H_
