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

// Scalar-per-ciphertext RLWE cipher. A real x is encoded as the constant
// coefficient round(x * 2^scale_bits); products are left unrelinearized and
// decrypted with s and s^2.

#ifndef FRAG_HE_CIPHER_HPP_
#define FRAG_HE_CIPHER_HPP_

#include <array>
#include <span>

#include "frag/common/rng.hpp"
#include "frag/he/ciphertext.hpp"
#include "frag/he/keys.hpp"

namespace frag::he {

// Fresh degree-1 encryption with scale_exp 1, drawing randomness from `rng`.
Ciphertext Encrypt(double x, const PublicKey& pk, Rng& rng);
// Same, using a thread-local entropy-seeded generator.
Ciphertext Encrypt(double x, const PublicKey& pk);

double Decrypt(const Ciphertext& ct, const SecretKey& sk);

Ciphertext EvalAdd(const Ciphertext& a, const Ciphertext& b);
void EvalAddInPlace(Ciphertext& acc, const Ciphertext& b);

// Bilinear tensor (a0 b0, a0 b1 + a1 b0, a1 b1) of two degree-1 ciphertexts.
Ciphertext EvalMulCipher(const Ciphertext& a, const Ciphertext& b);

// Multiplies every component by encode(p); scale_exp grows by one.
Ciphertext EvalMulPlain(const Ciphertext& ct, double p);

// Tensor of two raw degree-1 polynomial pairs, shared with share-level
// evaluation. Returns three polynomials.
std::array<Polynomial, 3> TensorPolys(const Context& ctx,
                                      std::span<const Polynomial> a,
                                      std::span<const Polynomial> b);

// Throws PARAMS_MISMATCH unless both refer to the same parameter set.
void RequireSameParams(const ParamsId& a, const ParamsId& b);

}  // namespace frag::he

#endif  // FRAG_HE_CIPHER_HPP_
