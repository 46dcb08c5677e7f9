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

#include "frag/he/polynomial.hpp"

#include <algorithm>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace frag::he {

void AddInPlace(const Modulus& q, Polynomial& acc, const Polynomial& x) {
  const std::uint64_t m = q.value();
  std::uint64_t* a = acc.coeffs.data();
  const std::uint64_t* b = x.coeffs.data();
  const std::size_t n = acc.coeffs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t s = a[i] + b[i];
    a[i] = s >= m ? s - m : s;
  }
}

void SubInPlace(const Modulus& q, Polynomial& acc, const Polynomial& x) {
  const std::uint64_t m = q.value();
  std::uint64_t* a = acc.coeffs.data();
  const std::uint64_t* b = x.coeffs.data();
  const std::size_t n = acc.coeffs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t d = a[i] - b[i];
    a[i] = a[i] >= b[i] ? d : d + m;
  }
}

void NegateInPlace(const Modulus& q, Polynomial& p) {
  for (std::uint64_t& c : p.coeffs) c = q.Neg(c);
}

Polynomial MulScalar(const Modulus& q, const Polynomial& in, std::uint64_t w) {
  const std::uint64_t w_shoup = q.ShoupFactor(w);
  const std::size_t n = in.coeffs.size();
  Polynomial out;
  out.coeffs.resize(n);
  const std::uint64_t* src = in.coeffs.data();
  std::uint64_t* dst = out.coeffs.data();
  std::size_t i = 0;
#if defined(__AVX512F__) && defined(__AVX512DQ__)
  // Eight lanes at a time. The high half of x * w_shoup is built from four
  // 32x32 products since AVX-512 has no 64-bit mulhi.
  const __m512i mask = _mm512_set1_epi64(0xFFFFFFFF);
  const __m512i vw = _mm512_set1_epi64(static_cast<long long>(w));
  const __m512i vq = _mm512_set1_epi64(static_cast<long long>(q.value()));
  const __m512i ws_lo = _mm512_set1_epi64(static_cast<long long>(w_shoup));
  const __m512i ws_hi = _mm512_set1_epi64(static_cast<long long>(w_shoup >> 32));
  for (; i + 8 <= n; i += 8) {
    const __m512i x = _mm512_loadu_si512(src + i);
    const __m512i x_hi = _mm512_srli_epi64(x, 32);
    const __m512i ll = _mm512_mul_epu32(x, ws_lo);
    const __m512i lh = _mm512_mul_epu32(x, ws_hi);
    const __m512i hl = _mm512_mul_epu32(x_hi, ws_lo);
    const __m512i hh = _mm512_mul_epu32(x_hi, ws_hi);
    const __m512i mid = _mm512_add_epi64(
        _mm512_srli_epi64(ll, 32),
        _mm512_add_epi64(_mm512_and_si512(lh, mask), _mm512_and_si512(hl, mask)));
    const __m512i hi = _mm512_add_epi64(
        _mm512_add_epi64(hh, _mm512_srli_epi64(mid, 32)),
        _mm512_add_epi64(_mm512_srli_epi64(lh, 32), _mm512_srli_epi64(hl, 32)));
    const __m512i r = _mm512_sub_epi64(_mm512_mullo_epi64(x, vw), _mm512_mullo_epi64(hi, vq));
    // r in [0, 2q): min(r, r - q) picks r - q exactly when it did not wrap.
    _mm512_storeu_si512(dst + i, _mm512_min_epu64(r, _mm512_sub_epi64(r, vq)));
  }
#endif
  for (; i < n; ++i) dst[i] = q.MulShoup(src[i], w, w_shoup);
  return out;
}

namespace {

// acc[i] += x[i] (or -x[i]) mod q over a contiguous run. Inputs are below q,
// so the sum stays below 2q and min(s, s - q) reduces it without a branch.
void AddRun(std::uint64_t q, std::uint64_t* acc, const std::uint64_t* x, std::size_t len,
            bool negate) {
  if (negate) {
    for (std::size_t i = 0; i < len; ++i) {
      const std::uint64_t s = acc[i] + (q - x[i]);
      acc[i] = std::min(s, s - q);
    }
  } else {
    for (std::size_t i = 0; i < len; ++i) {
      const std::uint64_t s = acc[i] + x[i];
      acc[i] = std::min(s, s - q);
    }
  }
}

}  // namespace

void AddRotated(const Modulus& q, Polynomial& acc, const Polynomial& x,
                std::size_t shift, bool negate) {
  const std::size_t n = x.coeffs.size();
  shift %= 2 * n;
  // X^n = -1: a shift of n or more flips the sign once more.
  if (shift >= n) {
    shift -= n;
    negate = !negate;
  }
  // x[i] lands on i + shift; the top `shift` coefficients wrap with a sign flip.
  AddRun(q.value(), acc.coeffs.data() + shift, x.coeffs.data(), n - shift, negate);
  AddRun(q.value(), acc.coeffs.data(), x.coeffs.data() + (n - shift), shift, !negate);
}

std::uint64_t ConstantTermOfProduct(const Modulus& q, const Polynomial& a,
                                    const Polynomial& b) {
  // [X^0](a*b) = a_0 b_0 - sum_{i>0} a_i b_{N-i}.
  const std::size_t n = a.coeffs.size();
  std::uint64_t pos = q.Mul(a.coeffs[0], b.coeffs[0]);
  std::uint64_t neg = 0;
  for (std::size_t i = 1; i < n; ++i) {
    neg = q.Add(neg, q.Mul(a.coeffs[i], b.coeffs[n - i]));
  }
  return q.Sub(pos, neg);
}

}  // namespace frag::he
