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

#include "frag/he/context.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "frag/common/bytes.hpp"
#include "frag/common/error.hpp"

namespace frag::he {

void CipherParams::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidParams, what); };
  if (ring_degree < 2 || !std::has_single_bit(ring_degree) || ring_degree > (1u << 16)) {
    fail("ring_degree " + std::to_string(ring_degree) + " is not a power of two in [2, 65536]");
  }
  if (modulus >= (std::uint64_t{1} << 63)) fail("modulus must be below 2^63");
  if (modulus % (2 * std::uint64_t{ring_degree}) != 1) {
    fail("modulus " + std::to_string(modulus) + " is not 1 mod 2N");
  }
  if (!IsPrime(modulus)) fail("modulus " + std::to_string(modulus) + " is composite");
  if (scale_bits < 8 || scale_bits > 56) fail("scale_bits must be in [8, 56]");
  if (!(noise_stddev > 0.0) || !std::isfinite(noise_stddev)) fail("noise_stddev must be > 0");
}

ParamsId CipherParams::Id() const {
  Bytes block;
  ByteWriter w(&block);
  w.PutString("FRAG-PARAMS-v1");
  w.PutU32(ring_degree);
  w.PutU64(modulus);
  w.PutF64(noise_stddev);
  w.PutU32(scale_bits);
  return Sha256(block);
}

std::shared_ptr<const Context> Context::Create(const CipherParams& params) {
  params.Validate();
  return std::shared_ptr<const Context>(new Context(params));
}

Context::Context(const CipherParams& params)
    : params_(params),
      id_(params.Id()),
      modulus_(params.modulus),
      ntt_(modulus_, params.ring_degree),
      gaussian_(params.noise_stddev),
      scale_(std::ldexp(1.0, static_cast<int>(params.scale_bits))),
      max_plain_(std::ldexp(1.0, 60 - static_cast<int>(params.scale_bits) - 4)),
      max_scale_exp_((std::bit_width(params.modulus) - 2) / static_cast<int>(params.scale_bits)),
      encryption_weight_(params.ring_degree >= 16 ? params.ring_degree / 16 : 1) {}

}  // namespace frag::he
