// Copyright (c) 2026 The emoxfer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMOXFER_CORE_RNG_H_
#define EMOXFER_CORE_RNG_H_

#include <cstdint>
#include <random>

namespace emoxfer {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t MixSeed(std::uint64_t x);
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

// Seeded generator with platform-independent variates. std::mt19937_64 is
// fully specified by the standard, the std distributions are not, so the
// variates are derived from raw engine output here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(MixSeed(seed)) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi);
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  // Uniform integer in [0, n).
  int UniformInt(int n);
  // Standard Gumbel(0, 1) variate: -log(-log(u)).
  double Gumbel();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace emoxfer

#endif  // EMOXFER_CORE_RNG_H_
