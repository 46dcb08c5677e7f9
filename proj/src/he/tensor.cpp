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

#include "frag/he/tensor.hpp"

#include <algorithm>
#include <utility>

#include "frag/common/error.hpp"

namespace frag::he {

PreparedCiphertext::PreparedCiphertext(const Ciphertext& ct)
    : ctx_(ct.context()), scale_exp_(ct.scale_exp()) {
  if (!ct.valid() || ct.degree() != 1) {
    throw Error(ErrorCode::kDepthExceeded, "only degree-1 ciphertexts can be prepared");
  }
  const Modulus& q = ctx_->modulus();
  c0_ = ct.polys()[0].coeffs;
  c1_ = ct.polys()[1].coeffs;
  ctx_->ntt().Forward(c0_);
  ctx_->ntt().Forward(c1_);
  for (std::uint64_t& x : c0_) x = q.ToMont(x);
  for (std::uint64_t& x : c1_) x = q.ToMont(x);
}

TransformedPair::TransformedPair(const ContextPtr& ctx, std::span<const Polynomial> polys) {
  if (polys.size() != 2) throw Error(ErrorCode::kDepthExceeded, "only degree-1 pairs transform");
  c0_ = polys[0].coeffs;
  c1_ = polys[1].coeffs;
  ctx->ntt().Forward(c0_);
  ctx->ntt().Forward(c1_);
}

TransformedPair::TransformedPair(const Ciphertext& ct)
    : TransformedPair(ct.context(), ct.valid() ? std::span<const Polynomial>(ct.polys())
                                               : std::span<const Polynomial>()) {}

TensorAccumulator::TensorAccumulator(ContextPtr ctx) : ctx_(std::move(ctx)) {
  const std::size_t n = ctx_->degree();
  d0_.assign(n, 0);
  d1_.assign(n, 0);
  d2_.assign(n, 0);
  scratch0_.resize(n);
  scratch1_.resize(n);
}

void TensorAccumulator::Add(std::span<const Polynomial> a, const PreparedCiphertext& b) {
  if (b.context()->id() != ctx_->id()) {
    throw Error(ErrorCode::kParamsMismatch, "prepared operand uses other parameters");
  }
  if (a.size() != 2) throw Error(ErrorCode::kDepthExceeded, "tensor needs degree-1 operand");
  std::copy(a[0].coeffs.begin(), a[0].coeffs.end(), scratch0_.begin());
  std::copy(a[1].coeffs.begin(), a[1].coeffs.end(), scratch1_.begin());
  ctx_->ntt().Forward(scratch0_);
  ctx_->ntt().Forward(scratch1_);
  AddTransformed(scratch0_.data(), scratch1_.data(), b);
}

void TensorAccumulator::Add(const TransformedPair& a, const PreparedCiphertext& b) {
  if (b.context()->id() != ctx_->id()) {
    throw Error(ErrorCode::kParamsMismatch, "prepared operand uses other parameters");
  }
  AddTransformed(a.c0().data(), a.c1().data(), b);
}

void TensorAccumulator::AddTransformed(const std::uint64_t* a0, const std::uint64_t* a1,
                                       const PreparedCiphertext& b) {
  const Modulus& q = ctx_->modulus();
  const std::size_t n = ctx_->degree();
  const std::uint64_t* b0 = b.c0().data();
  const std::uint64_t* b1 = b.c1().data();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t x0 = a0[i];
    const std::uint64_t x1 = a1[i];
    d0_[i] = q.Add(d0_[i], q.MulMont(x0, b0[i]));
    d1_[i] = q.Add(d1_[i], q.Reduce(static_cast<u128>(x0) * b1[i] + static_cast<u128>(x1) * b0[i]));
    d2_[i] = q.Add(d2_[i], q.MulMont(x1, b1[i]));
  }
  ++terms_;
}

void TensorAccumulator::Add(const Ciphertext& a, const PreparedCiphertext& b) {
  if (!a.valid()) throw Error(ErrorCode::kMalformedFrame, "empty ciphertext");
  if (a.params_id() != ctx_->id()) {
    throw Error(ErrorCode::kParamsMismatch, "operand uses other parameters");
  }
  if (a.degree() != 1) throw Error(ErrorCode::kDepthExceeded, "tensor needs degree-1 operand");
  Add(std::span<const Polynomial>(a.polys()), b);
}

Ciphertext TensorAccumulator::Finish(int scale_exp) {
  const std::size_t n = ctx_->degree();
  std::vector<Polynomial> polys;
  polys.reserve(3);
  for (std::vector<std::uint64_t>* d : {&d0_, &d1_, &d2_}) {
    ctx_->ntt().Inverse(*d);
    polys.emplace_back(std::move(*d));
    d->assign(n, 0);
  }
  terms_ = 0;
  return Ciphertext(ctx_, std::move(polys), scale_exp);
}

}  // namespace frag::he
