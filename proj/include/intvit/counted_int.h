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

#ifndef INTVIT_COUNTED_INT_H_
#define INTVIT_COUNTED_INT_H_

#include <compare>
#include <concepts>
#include <cstdint>

namespace intvit {

// Operation tally for one measurement scope. All fields only grow.
struct OpCounter {
  std::uint64_t adds = 0;
  std::uint64_t muls = 0;
  std::uint64_t divs = 0;
  std::uint64_t shifts = 0;
  std::uint64_t compares = 0;
  std::uint64_t float_violations = 0;

  // Arithmetic and bit operations; violations are not operations.
  std::uint64_t total() const { return adds + muls + divs + shifts + compares; }

  OpCounter& operator+=(const OpCounter& other);
  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

namespace detail {
inline thread_local OpCounter* active_counter = nullptr;
}  // namespace detail

// Installs `counter` as the calling thread's active counter for the lifetime
// of the scope. Scopes nest; the previous counter is restored on exit. Each
// thread counts into its own OpCounter; merge with operator+= afterwards.
class CountingScope {
 public:
  explicit CountingScope(OpCounter& counter) : previous_(detail::active_counter) {
    detail::active_counter = &counter;
  }
  ~CountingScope() { detail::active_counter = previous_; }
  CountingScope(const CountingScope&) = delete;
  CountingScope& operator=(const CountingScope&) = delete;

 private:
  OpCounter* previous_;
};

// 64-bit signed integer that tallies every arithmetic, shift and compare into
// the active OpCounter and traps overflow. Kernels on the integer path are
// written against this type only; any conversion from or to a floating-point
// value records a float violation.
class Int {
 public:
  constexpr Int() = default;
  template <std::integral T>
  constexpr Int(T v) : v_(static_cast<std::int64_t>(v)) {}  // NOLINT(implicit)
  template <std::floating_point F>
  explicit Int(F v) : v_(static_cast<std::int64_t>(v)) {
    record_violation();
  }
  template <std::floating_point F>
  explicit operator F() const {
    record_violation();
    return static_cast<F>(v_);
  }

  constexpr std::int64_t value() const { return v_; }

  friend Int operator+(Int a, Int b);
  friend Int operator-(Int a, Int b);
  friend Int operator*(Int a, Int b);
  // Truncating division, as C++ integer division.
  friend Int operator/(Int a, Int b);
  friend Int operator-(Int a);
  // Arithmetic right shift (floor division by 2^s); s >= 63 saturates to the
  // sign fill.
  friend Int operator>>(Int a, int s);
  friend Int operator<<(Int a, int s);
  friend Int operator>>(Int a, Int s) { return a >> static_cast<int>(s.clamped_shift()); }
  friend Int operator<<(Int a, Int s) { return a << static_cast<int>(s.clamped_shift()); }

  Int& operator+=(Int b) { return *this = *this + b; }
  Int& operator-=(Int b) { return *this = *this - b; }
  Int& operator*=(Int b) { return *this = *this * b; }
  Int& operator>>=(int s) { return *this = *this >> s; }
  Int& operator<<=(int s) { return *this = *this << s; }

  friend bool operator==(Int a, Int b) {
    count_compare();
    return a.v_ == b.v_;
  }
  friend std::strong_ordering operator<=>(Int a, Int b) {
    count_compare();
    return a.v_ <=> b.v_;
  }

 private:
  static void count_compare() {
    if (auto* c = detail::active_counter) ++c->compares;
  }
  static void record_violation() {
    if (auto* c = detail::active_counter) ++c->float_violations;
  }
  std::int64_t clamped_shift() const { return v_ < 0 ? 0 : (v_ > 63 ? 63 : v_); }

  std::int64_t v_ = 0;
};

// Counted as one compare each.
Int min(Int a, Int b);
Int max(Int a, Int b);
Int clamp(Int v, Int lo, Int hi);
// Compare plus a conditional negate: one compare, one add.
Int abs(Int v);
// -1, 0 or +1; two compares.
Int sign(Int v);
// Round-half-up right shift: (v + 2^(s-1)) >> s. s <= 0 shifts left.
Int rounding_shift_right(Int v, int s);
// Floor of log2(v) for v >= 1, found by a fixed six-step binary search over
// 64 bits, so the op count does not depend on v: 6 compares, up to 6 shifts
// and adds, always tallied as 6 of each. Returns -1 for v <= 0.
Int bit_length_minus_one(Int v);

}  // namespace intvit

#endif  // INTVIT_COUNTED_INT_H_
