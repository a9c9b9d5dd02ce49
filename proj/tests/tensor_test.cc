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

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "intvit/counted_int.h"
#include "intvit/errors.h"
#include "intvit/rng.h"
#include "intvit/tensor.h"
#include "intvit/tensor_io.h"

namespace intvit {
namespace {

TEST(TensorTest, RejectsInconsistentShapes) {
  EXPECT_THROW(Tensor::real({2, 2}, {1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor::real({}, {}), ShapeError);
  EXPECT_THROW(Tensor::integer({3, 0}, {}), ShapeError);
  const Tensor t = Tensor::real({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.row_length(), 3u);
  EXPECT_THROW(t.ints(), ShapeError);
}

TEST(TensorTest, DefaultTensorIsEmpty) { EXPECT_EQ(Tensor().size(), 0u); }

TEST(TensorIoTest, RoundTripsSmallTensor) {
  const Tensor t = Tensor::real({2, 2}, {1, 2, 3, 4});
  const std::vector<std::uint8_t> bytes = encode_tensor(t);
  ASSERT_GE(bytes.size(), 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "IPTQ");
  EXPECT_EQ(decode_tensor(bytes), t);
}

TEST(TensorIoTest, HeaderLayout) {
  const Tensor t = Tensor::integer({3}, {-1, 0, 7});
  const std::vector<std::uint8_t> b = encode_tensor(t);
  // magic, version, dtype, rank, one uint32 extent, three int32 values.
  ASSERT_EQ(b.size(), 4u + 3u + 4u + 12u);
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 1);
  EXPECT_EQ(b[6], 1);
  EXPECT_EQ(b[7], 3);
  EXPECT_EQ(b[8], 0);
  EXPECT_EQ(b[11], 0xff);  // -1, little-endian
}

TEST(TensorIoTest, RandomTensorsRoundTripByteIdentical) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const std::size_t rank = static_cast<std::size_t>(rng.uniform_int(1, 4));
    Shape dims;
    for (std::size_t r = 0; r < rank; ++r) dims.push_back(static_cast<std::size_t>(rng.uniform_int(1, 6)));
    Tensor t;
    if (i % 2 == 0) {
      t = rng_tensor(100 + i, dims, Normal{0.0, 3.0});
    } else {
      std::vector<std::int32_t> v(num_elements(dims));
      for (auto& x : v) x = static_cast<std::int32_t>(rng.uniform_int(-100000, 100000));
      t = Tensor::integer(dims, v);
    }
    const std::vector<std::uint8_t> bytes = encode_tensor(t);
    EXPECT_EQ(encode_tensor(decode_tensor(bytes)), bytes);
  }
}

TEST(TensorIoTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "intvit_tensor_io_test.iptq";
  const Tensor t = rng_tensor(5, {3, 4}, Uniform{-1, 1});
  tensor_write(t, path);
  EXPECT_EQ(tensor_read(path), t);
  std::filesystem::remove(path);
}

TEST(TensorIoTest, FormatErrorsNameOffsets) {
  std::vector<std::uint8_t> good = encode_tensor(Tensor::real({2}, {1, 2}));

  std::vector<std::uint8_t> magic = good;
  magic[0] = 'X';
  magic[1] = 'X';
  magic[2] = 'X';
  magic[3] = 'X';
  EXPECT_THROW(decode_tensor(magic), FormatError);

  std::vector<std::uint8_t> dtype = good;
  dtype[5] = 9;
  try {
    decode_tensor(dtype);
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }

  std::vector<std::uint8_t> truncated(good.begin(), good.end() - 1);
  EXPECT_THROW(decode_tensor(truncated), FormatError);

  std::vector<std::uint8_t> trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(decode_tensor(trailing), FormatError);
}

TEST(TensorIoTest, UnwritablePathIsIoError) {
  EXPECT_THROW(tensor_write(Tensor::real({1}, {0}), "/nonexistent_dir/x.iptq"), IoError);
  EXPECT_THROW(tensor_read("/nonexistent_dir/x.iptq"), IoError);
}

TEST(RngTest, DegenerateUniformIsZero) {
  const Tensor t = rng_tensor(7, {4}, Uniform{0, 0});
  EXPECT_EQ(t, Tensor::real({4}, {0, 0, 0, 0}));
}

TEST(RngTest, SameSeedSameTensor) {
  EXPECT_EQ(rng_tensor(3, {5, 5}, Normal{0, 1}), rng_tensor(3, {5, 5}, Normal{0, 1}));
  EXPECT_FALSE(rng_tensor(3, {5, 5}, Normal{0, 1}) == rng_tensor(4, {5, 5}, Normal{0, 1}));
}

TEST(RngTest, NormalSampleMean) {
  const Tensor t = rng_tensor(7, {100000}, Normal{0, 1});
  double sum = 0.0;
  for (float v : t.reals()) sum += v;
  EXPECT_NEAR(sum / 100000.0, 0.0, 0.02);
}

TEST(RngTest, UniformIntStaysInRange) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const auto v = rng.uniform_int(-3, 5);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 5);
  }
}

TEST(CountedIntTest, CountsEachOperation) {
  OpCounter c;
  {
    CountingScope scope(c);
    Int a = 5;
    Int b = 3;
    Int r = a + b;
    r = r * b;
    r = r / Int(2);
    r = r >> 1;
    r = r - a;
    (void)(r < a);
  }
  EXPECT_EQ(c.adds, 2u);
  EXPECT_EQ(c.muls, 1u);
  EXPECT_EQ(c.divs, 1u);
  EXPECT_EQ(c.shifts, 1u);
  EXPECT_EQ(c.compares, 1u);
  EXPECT_EQ(c.float_violations, 0u);
}

TEST(CountedIntTest, FloatConversionIsAViolation) {
  OpCounter c;
  {
    CountingScope scope(c);
    Int a(2.5);
    (void)static_cast<double>(a);
  }
  EXPECT_EQ(c.float_violations, 2u);
}

TEST(CountedIntTest, NothingCountedOutsideScope) {
  OpCounter c;
  { CountingScope scope(c); }
  Int a = 1;
  a = a + a;
  EXPECT_EQ(c.total(), 0u);
}

TEST(CountedIntTest, OverflowThrows) {
  const Int big = std::numeric_limits<std::int64_t>::max();
  EXPECT_THROW(big + Int(1), OverflowError);
  EXPECT_THROW(big * Int(2), OverflowError);
  EXPECT_THROW(Int(1) << 63, OverflowError);
}

TEST(CountedIntTest, ArithmeticShiftKeepsSign) {
  EXPECT_EQ((Int(-16) >> 1).value(), -8);
  EXPECT_EQ((Int(-1) >> 4).value(), -1);
  EXPECT_EQ(rounding_shift_right(Int(5), 1).value(), 3);
  EXPECT_EQ(rounding_shift_right(Int(-5), 1).value(), -2);
}

TEST(CountedIntTest, BitLength) {
  EXPECT_EQ(bit_length_minus_one(Int(1)).value(), 0);
  EXPECT_EQ(bit_length_minus_one(Int(255)).value(), 7);
  EXPECT_EQ(bit_length_minus_one(Int(256)).value(), 8);
  EXPECT_EQ(bit_length_minus_one(Int(0)).value(), -1);
  EXPECT_EQ(bit_length_minus_one(Int(std::int64_t{1} << 62)).value(), 62);
}

}  // namespace
}  // namespace intvit
