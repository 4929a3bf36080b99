// Copyright 2026 The Pandora Authors
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

#ifndef PANDORA_RNG_H_
#define PANDORA_RNG_H_

#include <cstdint>
#include <limits>

namespace pandora {

// Named sub-stream tags. Every random quantity in the library is drawn from a
// stream keyed by (seed, replication, tag) so replications can run in any
// order or on any thread and still see the same numbers.
enum StreamTag : std::uint64_t {
  kScenarioStream = 0x5c3e0001ULL,
  kDelayStream = 0x5c3e0002ULL,
  kDiscreteArrivalStream = 0x5c3e0003ULL,
  kRestartStream = 0x5c3e0004ULL,
  kMinibatchStream = 0x5c3e0005ULL,
  kGeneratorStream = 0x5c3e0006ULL,
  kBadArrivalStream = 0x5c3e0007ULL,
  // Box b of a replication uses tag kBoxStreamBase + b.
  kBoxStreamBase = 0x10000ULL,
};

// Counter-based generator: SplitMix64 over a key derived from
// (seed, stream, substream). Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0,
                        std::uint64_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  // Standard exponential, by inversion.
  double exponential();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace pandora

#endif  // PANDORA_RNG_H_
