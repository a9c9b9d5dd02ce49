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

#ifndef INTVIT_TENSOR_H_
#define INTVIT_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace intvit {

enum class DType : std::uint8_t { kReal32 = 0, kInt32 = 1 };

std::string to_string(DType dtype);

using Shape = std::vector<std::size_t>;

std::size_t num_elements(const Shape& dims);

// Dense row-major tensor of 32-bit reals or 32-bit signed integers. The last
// axis is the reduction axis for row-wise kernels (Softmax, LayerNorm).
class Tensor {
 public:
  Tensor() = default;

  static Tensor real(Shape dims, std::vector<float> data);
  static Tensor integer(Shape dims, std::vector<std::int32_t> data);
  static Tensor zeros(Shape dims, DType dtype);

  const Shape& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  DType dtype() const { return dtype_; }
  std::size_t size() const;

  // Product of every extent except the last one.
  std::size_t rows() const;
  std::size_t row_length() const { return dims_.empty() ? 0 : dims_.back(); }

  std::span<const float> reals() const;
  std::span<float> reals();
  std::span<const std::int32_t> ints() const;
  std::span<std::int32_t> ints();

  Tensor reshaped(Shape dims) const;

  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  Tensor(Shape dims, DType dtype,
         std::variant<std::vector<float>, std::vector<std::int32_t>> data);

  Shape dims_;
  DType dtype_ = DType::kReal32;
  std::variant<std::vector<float>, std::vector<std::int32_t>> data_;
};

// Validates rank >= 1, every extent >= 1 and that the product matches count.
void check_shape(const Shape& dims, std::size_t count);

}  // namespace intvit

#endif  // INTVIT_TENSOR_H_
