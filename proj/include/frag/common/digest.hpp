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

#ifndef FRAG_COMMON_DIGEST_HPP_
#define FRAG_COMMON_DIGEST_HPP_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "frag/common/bytes.hpp"

namespace frag {

using Digest = std::array<std::uint8_t, 32>;

// SHA-256.
Digest Sha256(ByteSpan data);
Digest Sha256(std::initializer_list<ByteSpan> parts);

std::string ToHex(ByteSpan bytes);

}  // namespace frag

#endif  // FRAG_COMMON_DIGEST_HPP_
