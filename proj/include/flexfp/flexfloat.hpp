#pragma once

#include "flexfp/flexcore.hpp"

namespace flexfp {

// Statically-typed front end over FlexNum. Arithmetic between different
// instances does not compile; conversions between instances are explicit.
template <int E, int M>
class FlexFloat {
 public:
  static constexpr FloatFormat format = make_format(E, M);

  FlexFloat() : value_(zero(format)) {}
  FlexFloat(double x) : value_(encode(format, x)) {}  // NOLINT: literals convert implicitly

  template <int E2, int M2>
  explicit FlexFloat(const FlexFloat<E2, M2>& other) : value_(cast_fp(other.value(), format)) {}

  static FlexFloat from_bits(std::uint64_t bits) { return FlexFloat(FlexNum(format, bits)); }

  const FlexNum& value() const { return value_; }
  std::uint64_t bits() const { return value_.bits(); }
  explicit operator double() const { return value_.to_double(); }

  friend FlexFloat operator+(FlexFloat a, FlexFloat b) { return FlexFloat(add(a.value_, b.value_)); }
  friend FlexFloat operator-(FlexFloat a, FlexFloat b) { return FlexFloat(sub(a.value_, b.value_)); }
  friend FlexFloat operator*(FlexFloat a, FlexFloat b) { return FlexFloat(mul(a.value_, b.value_)); }
  friend FlexFloat operator/(FlexFloat a, FlexFloat b) { return FlexFloat(div(a.value_, b.value_)); }
  friend FlexFloat operator-(FlexFloat a) { return FlexFloat(negate(a.value_)); }

  FlexFloat& operator+=(FlexFloat o) { return *this = *this + o; }
  FlexFloat& operator-=(FlexFloat o) { return *this = *this - o; }
  FlexFloat& operator*=(FlexFloat o) { return *this = *this * o; }
  FlexFloat& operator/=(FlexFloat o) { return *this = *this / o; }

  friend bool operator==(FlexFloat a, FlexFloat b) { return compare(a.value_, b.value_) == 0; }
  friend std::partial_ordering operator<=>(FlexFloat a, FlexFloat b) {
    return compare(a.value_, b.value_);
  }

 private:
  explicit FlexFloat(FlexNum v) : value_(v) {}

  FlexNum value_;
};

template <int E, int M>
FlexFloat<E, M> sqrt(FlexFloat<E, M> a) {
  return FlexFloat<E, M>::from_bits(flexfp::sqrt(a.value()).bits());
}

using binary8_t = FlexFloat<5, 2>;
using binary16_t = FlexFloat<5, 10>;
using binary16alt_t = FlexFloat<8, 7>;
using binary32_t = FlexFloat<8, 23>;

}  // namespace flexfp
