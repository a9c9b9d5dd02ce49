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

#include "intvit/tensor_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "intvit/errors.h"

namespace intvit {
namespace {

constexpr std::uint8_t kMagic[4] = {'I', 'P', 'T', 'Q'};
constexpr std::size_t kHeaderFixed = 7;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  check_shape(t.dims(), t.size());
  if (t.rank() > std::numeric_limits<std::uint8_t>::max()) {
    throw ShapeError("tensor rank exceeds 255");
  }
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kTensorFormatVersion);
  out.push_back(static_cast<std::uint8_t>(t.dtype()));
  out.push_back(static_cast<std::uint8_t>(t.rank()));
  for (std::size_t d : t.dims()) {
    if (d > std::numeric_limits<std::uint32_t>::max()) throw ShapeError("extent exceeds uint32");
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  out.reserve(out.size() + 4 * t.size());
  if (t.dtype() == DType::kReal32) {
    for (float f : t.reals()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  } else {
    for (std::int32_t v : t.ints()) put_u32(out, static_cast<std::uint32_t>(v));
  }
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("truncated magic", bytes.size());
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != kMagic[i]) throw FormatError("bad magic", i);
  }
  if (bytes.size() < kHeaderFixed) throw FormatError("truncated header", bytes.size());
  if (bytes[4] != kTensorFormatVersion) throw FormatError("unsupported format version", 4);
  const std::uint8_t code = bytes[5];
  if (code > 1) throw FormatError("unknown dtype code " + std::to_string(code), 5);
  const std::size_t rank = bytes[6];
  if (rank == 0) throw FormatError("rank must be at least 1", 6);
  if (bytes.size() < kHeaderFixed + 4 * rank) {
    throw FormatError("truncated extents", bytes.size());
  }
  const std::size_t payload = kHeaderFixed + 4 * rank;
  const std::size_t available = (bytes.size() - payload) / 4;
  Shape dims(rank);
  std::size_t count = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t at = kHeaderFixed + 4 * i;
    dims[i] = get_u32(bytes, at);
    if (dims[i] == 0) throw FormatError("zero extent", at);
    // Checked against the bytes on hand so the product cannot overflow.
    if (dims[i] > available / count) throw FormatError("truncated payload", bytes.size());
    count *= dims[i];
  }
  if (bytes.size() - payload != 4 * count) {
    throw FormatError("trailing bytes after payload", payload + 4 * count);
  }
  if (code == static_cast<std::uint8_t>(DType::kReal32)) {
    std::vector<float> data(count);
    for (std::size_t i = 0; i < count; ++i) {
      data[i] = std::bit_cast<float>(get_u32(bytes, payload + 4 * i));
    }
    return Tensor::real(std::move(dims), std::move(data));
  }
  std::vector<std::int32_t> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = static_cast<std::int32_t>(get_u32(bytes, payload + 4 * i));
  }
  return Tensor::integer(std::move(dims), std::move(data));
}

Tensor tensor_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

void tensor_write(const Tensor& t, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace intvit
