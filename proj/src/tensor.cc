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

#include "intvit/tensor.h"

#include <algorithm>
#include <cstring>

#include "intvit/errors.h"

namespace intvit {

std::string to_string(DType dtype) {
  switch (dtype) {
    case DType::kReal32:
      return "real32";
    case DType::kInt32:
      return "int32";
  }
  return "unknown";
}

std::size_t num_elements(const Shape& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

void check_shape(const Shape& dims, std::size_t count) {
  if (dims.empty()) throw ShapeError("tensor rank must be at least 1");
  if (std::any_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 0; })) {
    throw ShapeError("tensor extents must be positive");
  }
  if (num_elements(dims) != count) {
    throw ShapeError("tensor dims product " + std::to_string(num_elements(dims)) +
                     " does not match data length " + std::to_string(count));
  }
}

Tensor::Tensor(Shape dims, DType dtype,
               std::variant<std::vector<float>, std::vector<std::int32_t>> data)
    : dims_(std::move(dims)), dtype_(dtype), data_(std::move(data)) {}

Tensor Tensor::real(Shape dims, std::vector<float> data) {
  check_shape(dims, data.size());
  return Tensor(std::move(dims), DType::kReal32, std::move(data));
}

Tensor Tensor::integer(Shape dims, std::vector<std::int32_t> data) {
  check_shape(dims, data.size());
  return Tensor(std::move(dims), DType::kInt32, std::move(data));
}

Tensor Tensor::zeros(Shape dims, DType dtype) {
  const std::size_t n = num_elements(dims);
  if (dtype == DType::kReal32) return real(std::move(dims), std::vector<float>(n));
  return integer(std::move(dims), std::vector<std::int32_t>(n));
}

std::size_t Tensor::size() const { return dims_.empty() ? 0 : num_elements(dims_); }

std::size_t Tensor::rows() const {
  if (dims_.empty()) return 0;
  return size() / dims_.back();
}

std::span<const float> Tensor::reals() const {
  if (dtype_ != DType::kReal32) throw ShapeError("tensor is not real32");
  return std::get<std::vector<float>>(data_);
}

std::span<float> Tensor::reals() {
  if (dtype_ != DType::kReal32) throw ShapeError("tensor is not real32");
  return std::get<std::vector<float>>(data_);
}

std::span<const std::int32_t> Tensor::ints() const {
  if (dtype_ != DType::kInt32) throw ShapeError("tensor is not int32");
  return std::get<std::vector<std::int32_t>>(data_);
}

std::span<std::int32_t> Tensor::ints() {
  if (dtype_ != DType::kInt32) throw ShapeError("tensor is not int32");
  return std::get<std::vector<std::int32_t>>(data_);
}

Tensor Tensor::reshaped(Shape dims) const {
  check_shape(dims, size());
  Tensor t = *this;
  t.dims_ = std::move(dims);
  return t;
}

bool operator==(const Tensor& a, const Tensor& b) {
  if (a.dims_ != b.dims_ || a.dtype_ != b.dtype_) return false;
  if (a.dtype_ == DType::kInt32) {
    return std::get<std::vector<std::int32_t>>(a.data_) ==
           std::get<std::vector<std::int32_t>>(b.data_);
  }
  // Bitwise comparison so that NaN payloads and signed zeros round-trip.
  const auto& x = std::get<std::vector<float>>(a.data_);
  const auto& y = std::get<std::vector<float>>(b.data_);
  return x.size() == y.size() &&
         (x.empty() || std::memcmp(x.data(), y.data(), x.size() * sizeof(float)) == 0);
}

}  // namespace intvit
