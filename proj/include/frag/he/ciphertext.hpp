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

#ifndef FRAG_HE_CIPHERTEXT_HPP_
#define FRAG_HE_CIPHERTEXT_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "frag/he/context.hpp"
#include "frag/he/polynomial.hpp"

namespace frag::he {

// Fixed-point integer carrying `scale_exp` factors of Delta.
struct Plaintext {
  std::int64_t value = 0;
  int scale_exp = 1;

  bool operator==(const Plaintext&) const = default;
};

// round(x * Delta); PLAINTEXT_OUT_OF_RANGE beyond max_plain().
Plaintext Encode(double x, const Context& ctx);
double Decode(const Plaintext& pt, const Context& ctx);

// A degree-d ciphertext (d + 1 polynomials) decrypting to sum_i c_i * s^i.
//
// Construction does not validate the degree so that malformed objects can be
// represented and rejected by the operations that consume them.
class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(ContextPtr ctx, std::vector<Polynomial> polys, int scale_exp)
      : ctx_(std::move(ctx)), polys_(std::move(polys)), scale_exp_(scale_exp) {}

  const ContextPtr& context() const { return ctx_; }
  const ParamsId& params_id() const { return ctx_->id(); }
  int degree() const { return static_cast<int>(polys_.size()) - 1; }
  int scale_exp() const { return scale_exp_; }
  const std::vector<Polynomial>& polys() const { return polys_; }
  std::vector<Polynomial>& mutable_polys() { return polys_; }
  bool valid() const { return ctx_ != nullptr; }

  // Bitwise equality: same parameters, scale and coefficients.
  bool operator==(const Ciphertext& other) const;

 private:
  ContextPtr ctx_;
  std::vector<Polynomial> polys_;
  int scale_exp_ = 1;
};

}  // namespace frag::he

#endif  // FRAG_HE_CIPHERTEXT_HPP_
