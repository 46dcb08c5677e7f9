/*
 * Copyright 2026 The FRAG Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FRAG_COMMON_RNG_HPP_
#define FRAG_COMMON_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace frag {

// Seeded generator with library-defined sampling so that a seed produces the
// same bytes with every standard library (std distributions are
// implementation-defined and are deliberately not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Non-deterministic seed from std::random_device.
  static Rng FromEntropy();

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, bound). bound > 0.
  std::uint64_t UniformBelow(std::uint64_t bound);

  // Uniform in [0, 1).
  double UniformReal() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }
  double UniformReal(double lo, double hi) {
    return lo + (hi - lo) * UniformReal();
  }

  // Uniform over {-1, 0, 1}.
  int Ternary() { return static_cast<int>(UniformBelow(3)) - 1; }

 private:
  std::mt19937_64 engine_;
};

// Rounded Gaussian over the integers, sampled by cumulative-table inversion.
// The tail is cut at 10 sigma.
class GaussianSampler {
 public:
  explicit GaussianSampler(double stddev);

  std::int64_t Sample(Rng& rng) const;
  double stddev() const { return stddev_; }

 private:
  double stddev_;
  std::int64_t bound_;
  std::vector<std::uint64_t> cdf_;  // cdf_[i] covers value i - bound_
};

}  // namespace frag

#endif  // FRAG_COMMON_RNG_HPP_
