/* Copyright 2026 The intvit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef INTVIT_TENSOR_IO_H_
#define INTVIT_TENSOR_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "intvit/tensor.h"

namespace intvit {

// On-disk layout, little-endian, no padding:
//   [0,4)   magic "IPTQ"
//   [4]     format version (1)
//   [5]     dtype code (0 = IEEE-754 binary32, 1 = int32)
//   [6]     rank r
//   [7, 7+4r) extents as uint32
//   then the raw element payload.
inline constexpr std::uint8_t kTensorFormatVersion = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

Tensor tensor_read(const std::filesystem::path& path);
void tensor_write(const Tensor& t, const std::filesystem::path& path);

}  // namespace intvit

#endif  // INTVIT_TENSOR_IO_H_
