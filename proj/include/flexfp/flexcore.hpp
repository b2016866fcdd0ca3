#pragma once

// Parameterized binary floating-point formats with IEEE 754 style encoding
// (sign | exponent | mantissa, implicit leading bit, denormals, inf, NaN).
// Every operation is correctly rounded to nearest, ties to even.

#include <compare>
#include <cstdint>
#include <string>

#include "flexfp/error.hpp"

namespace flexfp {

class FloatFormat {
 public:
  static constexpr int kMinExpBits = 2;
  static constexpr int kMaxExpBits = 11;
  static constexpr int kMinManBits = 1;
  static constexpr int kMaxManBits = 52;
  static constexpr int kMaxWidth = 64;

  static constexpr bool valid(int exp_bits, int man_bits) {
    return exp_bits >= kMinExpBits && exp_bits <= kMaxExpBits && man_bits >= kMinManBits &&
           man_bits <= kMaxManBits && 1 + exp_bits + man_bits <= kMaxWidth;
  }

  constexpr int exp_bits() const { return exp_bits_; }
  constexpr int man_bits() const { return man_bits_; }
  constexpr int width() const { return 1 + exp_bits_ + man_bits_; }
  constexpr int precision() const { return man_bits_ + 1; }
  constexpr int bias() const { return (1 << (exp_bits_ - 1)) - 1; }
  constexpr int emax() const { return bias(); }
  constexpr int emin() const { return 1 - bias(); }

  constexpr auto operator<=>(const FloatFormat&) const = default;

 private:
  friend constexpr FloatFormat make_format(int exp_bits, int man_bits);
  constexpr FloatFormat(int exp_bits, int man_bits) : exp_bits_(exp_bits), man_bits_(man_bits) {}

  int exp_bits_;
  int man_bits_;
};

/// Validated constructor: 2 <= e <= 11, 1 <= m <= 52, 1 + e + m <= 64.
constexpr FloatFormat make_format(int exp_bits, int man_bits) {
  if (!FloatFormat::valid(exp_bits, man_bits)) {
    throw Error(ErrorCode::OutOfRange, "format (" + std::to_string(exp_bits) + "," +
                                           std::to_string(man_bits) + ") outside supported bounds");
  }
  return FloatFormat(exp_bits, man_bits);
}

namespace formats {
inline constexpr FloatFormat binary8 = make_format(5, 2);
inline constexpr FloatFormat binary16 = make_format(5, 10);
inline constexpr FloatFormat binary16alt = make_format(8, 7);
inline constexpr FloatFormat binary32 = make_format(8, 23);
inline constexpr FloatFormat binary64 = make_format(11, 52);
}  // namespace formats

/// "binary8" etc. for the named formats, "e<E>m<M>" otherwise.
std::string format_token(FloatFormat f);
/// Inverse of format_token.
FloatFormat parse_format_token(const std::string& token);

enum class FpClass { PosZero, NegZero, Denormal, Normal, PosInf, NegInf, NaN };

std::string_view to_string(FpClass c);

class FlexNum {
 public:
  /// Throws OutOfRange if `bits` has set bits above the format width.
  FlexNum(FloatFormat format, std::uint64_t bits);

  FloatFormat format() const { return format_; }
  std::uint64_t bits() const { return bits_; }

  bool sign() const { return (bits_ >> (format_.width() - 1)) & 1U; }
  std::uint64_t exp_field() const {
    return (bits_ >> format_.man_bits()) & ((std::uint64_t{1} << format_.exp_bits()) - 1);
  }
  std::uint64_t man_field() const { return bits_ & ((std::uint64_t{1} << format_.man_bits()) - 1); }

  bool is_nan() const;
  bool is_inf() const;
  bool is_finite() const;
  bool is_zero() const;

  /// Lossless: every supported format is a subset of binary64.
  double to_double() const;
  explicit operator double() const { return to_double(); }

  /// Bitwise identity (same format, same pattern). Use compare() for IEEE ordering.
  friend bool operator==(const FlexNum&, const FlexNum&) = default;

 private:
  FloatFormat format_;
  std::uint64_t bits_;
};

// Construction and inspection.
FlexNum encode(FloatFormat f, double x);
double decode(const FlexNum& a);
FlexNum zero(FloatFormat f, bool negative = false);
FlexNum infinity(FloatFormat f, bool negative = false);
FlexNum canonical_nan(FloatFormat f);
FpClass classify(const FlexNum& a);

double max_finite(FloatFormat f);
/// Smallest positive magnitude (the smallest denormal).
double min_finite(FloatFormat f);
double min_normal(FloatFormat f);
/// Magnitudes at or above this round to infinity: max_finite + ulp(max_finite)/2.
double overflow_threshold(FloatFormat f);
/// Spacing of representable values in the binade containing |x|.
double ulp(FloatFormat f, double x);

/// "s|eeeee|mm" rendering of the bit fields.
std::string to_bit_string(const FlexNum& a);

// Arithmetic. Operands must share a format (FormatMismatch otherwise).
FlexNum add(const FlexNum& a, const FlexNum& b);
FlexNum sub(const FlexNum& a, const FlexNum& b);
FlexNum mul(const FlexNum& a, const FlexNum& b);
FlexNum div(const FlexNum& a, const FlexNum& b);
FlexNum sqrt(const FlexNum& a);
FlexNum negate(const FlexNum& a);

std::partial_ordering compare(const FlexNum& a, const FlexNum& b);

// Conversions.
FlexNum cast_fp(const FlexNum& a, FloatFormat target);
FlexNum cast_from_int(std::int64_t i, FloatFormat target);
FlexNum cast_from_uint(std::uint64_t u, FloatFormat target);
/// Truncates toward zero and saturates to the `width`-bit range; NaN/inf throw InvalidConversion.
std::int64_t cast_to_int(const FlexNum& a, int width);
std::uint64_t cast_to_uint(const FlexNum& a, int width);

inline FlexNum operator+(const FlexNum& a, const FlexNum& b) { return add(a, b); }
inline FlexNum operator-(const FlexNum& a, const FlexNum& b) { return sub(a, b); }
inline FlexNum operator*(const FlexNum& a, const FlexNum& b) { return mul(a, b); }
inline FlexNum operator/(const FlexNum& a, const FlexNum& b) { return div(a, b); }
inline FlexNum operator-(const FlexNum& a) { return negate(a); }

namespace detail {

/// True when a binary64 intermediate followed by one re-rounding is exact for
/// +, -, *, / and sqrt: precision at most 24 bits and exponent range no wider
/// than binary32, so neither double rounding nor binary64 over/underflow occurs.
constexpr bool native_path_ok(FloatFormat f) { return f.man_bits() <= 23 && f.exp_bits() <= 8; }

// Integer-significand implementations, valid for every format.
FlexNum exact_add(const FlexNum& a, const FlexNum& b);
FlexNum exact_mul(const FlexNum& a, const FlexNum& b);
FlexNum exact_div(const FlexNum& a, const FlexNum& b);
FlexNum exact_sqrt(const FlexNum& a);

// Native-intermediate implementations; only valid where native_path_ok().
FlexNum native_add(const FlexNum& a, const FlexNum& b);
FlexNum native_mul(const FlexNum& a, const FlexNum& b);
FlexNum native_div(const FlexNum& a, const FlexNum& b);
FlexNum native_sqrt(const FlexNum& a);

}  // namespace detail

}  // namespace flexfp
