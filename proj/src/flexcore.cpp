#include "flexfp/flexcore.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace flexfp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::FormatMismatch: return "FormatMismatch";
    case ErrorCode::InvalidConversion: return "InvalidConversion";
    case ErrorCode::RegionImbalance: return "RegionImbalance";
    case ErrorCode::UnknownKernel: return "UnknownKernel";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MissingTableEntry: return "MissingTableEntry";
    case ErrorCode::DivisionByZeroBaseline: return "DivisionByZeroBaseline";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(FpClass c) {
  switch (c) {
    case FpClass::PosZero: return "PosZero";
    case FpClass::NegZero: return "NegZero";
    case FpClass::Denormal: return "Denormal";
    case FpClass::Normal: return "Normal";
    case FpClass::PosInf: return "PosInf";
    case FpClass::NegInf: return "NegInf";
    case FpClass::NaN: return "NaN";
  }
  return "Unknown";
}

std::string format_token(FloatFormat f) {
  if (f == formats::binary8) return "binary8";
  if (f == formats::binary16) return "binary16";
  if (f == formats::binary16alt) return "binary16alt";
  if (f == formats::binary32) return "binary32";
  if (f == formats::binary64) return "binary64";
  return "e" + std::to_string(f.exp_bits()) + "m" + std::to_string(f.man_bits());
}

FloatFormat parse_format_token(const std::string& token) {
  if (token == "binary8") return formats::binary8;
  if (token == "binary16") return formats::binary16;
  if (token == "binary16alt") return formats::binary16alt;
  if (token == "binary32") return formats::binary32;
  if (token == "binary64") return formats::binary64;
  const auto m_pos = token.find('m');
  if (token.size() >= 4 && token[0] == 'e' && m_pos != std::string::npos && m_pos > 1) {
    try {
      std::size_t used_e = 0;
      std::size_t used_m = 0;
      const std::string e_part = token.substr(1, m_pos - 1);
      const std::string m_part = token.substr(m_pos + 1);
      const int e = std::stoi(e_part, &used_e);
      const int m = std::stoi(m_part, &used_m);
      if (used_e == e_part.size() && used_m == m_part.size()) return make_format(e, m);
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorCode::ParseError, "unrecognized format token '" + token + "'");
}

namespace {

using u128 = unsigned __int128;

struct Unpacked {
  bool sign;
  std::uint64_t sig;  // value = sig * 2^exp
  int exp;
};

constexpr std::uint64_t low_mask(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

int msb_index(u128 x) {
  const auto hi = static_cast<std::uint64_t>(x >> 64);
  if (hi != 0) return 127 - std::countl_zero(hi);
  return 63 - std::countl_zero(static_cast<std::uint64_t>(x));
}

std::uint64_t sign_bit(FloatFormat f) { return std::uint64_t{1} << (f.width() - 1); }

std::uint64_t exp_all_ones(FloatFormat f) { return low_mask(f.exp_bits()) << f.man_bits(); }

std::uint64_t inf_bits(FloatFormat f, bool negative) {
  return exp_all_ones(f) | (negative ? sign_bit(f) : 0);
}

std::uint64_t nan_bits(FloatFormat f) {
  return exp_all_ones(f) | (std::uint64_t{1} << (f.man_bits() - 1));
}

// Rounds the exact value (-1)^sign * sig * 2^exp to nearest-even in f.
std::uint64_t round_pack(FloatFormat f, bool sign, u128 sig, int exp) {
  const std::uint64_t sbit = sign ? sign_bit(f) : 0;
  if (sig == 0) return sbit;

  const int m = f.man_bits();
  const int msb = msb_index(sig);
  const int top = exp + msb;  // value lies in [2^top, 2^(top+1))
  if (top > f.emax()) return inf_bits(f, sign);

  int quantum = std::max(top, f.emin()) - m;
  std::uint64_t kept = 0;
  if (exp >= quantum) {
    kept = static_cast<std::uint64_t>(sig << (exp - quantum));
  } else {
    const int shift = quantum - exp;
    if (shift > msb + 1) {
      kept = 0;  // below half a quantum
    } else {
      const u128 rem_mask = shift >= 128 ? ~u128{0} : (u128{1} << shift) - 1;
      const u128 half = u128{1} << (shift - 1);
      kept = shift >= 128 ? 0 : static_cast<std::uint64_t>(sig >> shift);
      const u128 rem = sig & rem_mask;
      if (rem > half || (rem == half && (kept & 1U))) ++kept;
    }
  }

  if (kept == (std::uint64_t{1} << (m + 1))) {
    kept >>= 1;
    ++quantum;
  }
  if (kept == 0) return sbit;
  if (kept < (std::uint64_t{1} << m)) return sbit | kept;  // denormal

  const int true_exp = quantum + m;
  if (true_exp > f.emax()) return inf_bits(f, sign);
  const auto field = static_cast<std::uint64_t>(true_exp + f.bias());
  return sbit | (field << m) | (kept & low_mask(m));
}

Unpacked unpack(const FlexNum& a) {
  const FloatFormat f = a.format();
  const std::uint64_t e = a.exp_field();
  const std::uint64_t mant = a.man_field();
  if (e == 0) return {a.sign(), mant, f.emin() - f.man_bits()};
  return {a.sign(), mant | (std::uint64_t{1} << f.man_bits()),
          static_cast<int>(e) - f.bias() - f.man_bits()};
}

// Shifts sig left so that its most significant bit lands on `target`.
void normalize_to(Unpacked& u, int target) {
  const int msb = 63 - std::countl_zero(u.sig);
  u.sig <<= (target - msb);
  u.exp -= (target - msb);
}

void require_same_format(const FlexNum& a, const FlexNum& b, const char* op) {
  if (a.format() != b.format()) {
    throw Error(ErrorCode::FormatMismatch, std::string(op) + " between " +
                                               format_token(a.format()) + " and " +
                                               format_token(b.format()));
  }
}

u128 isqrt(u128 n) {
  u128 result = 0;
  u128 bit = u128{1} << 126;
  while (bit > n) bit >>= 2;
  while (bit != 0) {
    if (n >= result + bit) {
      n -= result + bit;
      result = (result >> 1) + bit;
    } else {
      result >>= 1;
    }
    bit >>= 2;
  }
  return result;
}

FlexNum make(FloatFormat f, std::uint64_t bits) { return FlexNum(f, bits); }

}  // namespace

FlexNum::FlexNum(FloatFormat format, std::uint64_t bits) : format_(format), bits_(bits) {
  if ((bits & ~low_mask(format.width())) != 0) {
    throw Error(ErrorCode::OutOfRange, "bit pattern wider than " + format_token(format));
  }
}

bool FlexNum::is_nan() const { return exp_field() == low_mask(format_.exp_bits()) && man_field() != 0; }
bool FlexNum::is_inf() const { return exp_field() == low_mask(format_.exp_bits()) && man_field() == 0; }
bool FlexNum::is_finite() const { return exp_field() != low_mask(format_.exp_bits()); }
bool FlexNum::is_zero() const { return exp_field() == 0 && man_field() == 0; }

double FlexNum::to_double() const {
  if (is_nan()) return std::numeric_limits<double>::quiet_NaN();
  if (is_inf()) return sign() ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
  const Unpacked u = unpack(*this);
  const double mag = std::ldexp(static_cast<double>(u.sig), u.exp);
  return u.sign ? -mag : mag;
}

FlexNum encode(FloatFormat f, double x) {
  if (std::isnan(x)) return make(f, nan_bits(f));
  if (std::isinf(x)) return make(f, inf_bits(f, x < 0));
  const auto raw = std::bit_cast<std::uint64_t>(x);
  const bool sign = (raw >> 63) != 0;
  const std::uint64_t field = (raw >> 52) & 0x7FF;
  const std::uint64_t mant = raw & low_mask(52);
  if (field == 0) return make(f, round_pack(f, sign, mant, -1074));
  return make(f, round_pack(f, sign, mant | (std::uint64_t{1} << 52),
                            static_cast<int>(field) - 1075));
}

double decode(const FlexNum& a) { return a.to_double(); }

FlexNum zero(FloatFormat f, bool negative) { return make(f, negative ? sign_bit(f) : 0); }
FlexNum infinity(FloatFormat f, bool negative) { return make(f, inf_bits(f, negative)); }
FlexNum canonical_nan(FloatFormat f) { return make(f, nan_bits(f)); }

FpClass classify(const FlexNum& a) {
  if (a.is_nan()) return FpClass::NaN;
  if (a.is_inf()) return a.sign() ? FpClass::NegInf : FpClass::PosInf;
  if (a.is_zero()) return a.sign() ? FpClass::NegZero : FpClass::PosZero;
  if (a.exp_field() == 0) return FpClass::Denormal;
  return FpClass::Normal;
}

double max_finite(FloatFormat f) {
  return std::ldexp(2.0 - std::ldexp(1.0, -f.man_bits()), f.emax());
}

double min_finite(FloatFormat f) { return std::ldexp(1.0, f.emin() - f.man_bits()); }

double min_normal(FloatFormat f) { return std::ldexp(1.0, f.emin()); }

double overflow_threshold(FloatFormat f) {
  // May exceed the binary64 range only for 11-bit exponents.
  return std::ldexp(2.0 - std::ldexp(1.0, -(f.man_bits() + 1)), f.emax());
}

double ulp(FloatFormat f, double x) {
  const double mag = std::fabs(x);
  if (!std::isfinite(mag)) return std::ldexp(1.0, f.emax() - f.man_bits());
  int binade = f.emin();
  if (mag >= min_normal(f)) binade = std::min(std::ilogb(mag), f.emax());
  return std::ldexp(1.0, binade - f.man_bits());
}

std::string to_bit_string(const FlexNum& a) {
  const FloatFormat f = a.format();
  std::string out;
  out.reserve(static_cast<std::size_t>(f.width()) + 2);
  out += a.sign() ? '1' : '0';
  out += '|';
  for (int i = f.exp_bits() - 1; i >= 0; --i) out += ((a.exp_field() >> i) & 1U) ? '1' : '0';
  out += '|';
  for (int i = f.man_bits() - 1; i >= 0; --i) out += ((a.man_field() >> i) & 1U) ? '1' : '0';
  return out;
}

namespace detail {

FlexNum exact_add(const FlexNum& a, const FlexNum& b) {
  const FloatFormat f = a.format();
  if (a.is_nan() || b.is_nan()) return canonical_nan(f);
  if (a.is_inf() || b.is_inf()) {
    if (a.is_inf() && b.is_inf() && a.sign() != b.sign()) return canonical_nan(f);
    return a.is_inf() ? a : b;
  }
  if (a.is_zero() && b.is_zero()) return zero(f, a.sign() && b.sign());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;

  Unpacked x = unpack(a);
  Unpacked y = unpack(b);
  if (x.exp < y.exp) std::swap(x, y);
  // Far below every rounding position of x: stands in as a sticky bit.
  constexpr int kStickyGap = 70;
  u128 xs = x.sig;
  u128 ys = y.sig;
  int exp = y.exp;
  if (x.exp - y.exp > kStickyGap) {
    exp = x.exp - kStickyGap;
    xs <<= kStickyGap;
    ys = 1;
  } else {
    xs <<= (x.exp - y.exp);
  }
  if (x.sign == y.sign) return make(f, round_pack(f, x.sign, xs + ys, exp));
  if (xs == ys) return zero(f);
  if (xs > ys) return make(f, round_pack(f, x.sign, xs - ys, exp));
  return make(f, round_pack(f, y.sign, ys - xs, exp));
}

FlexNum exact_mul(const FlexNum& a, const FlexNum& b) {
  const FloatFormat f = a.format();
  const bool sign = a.sign() != b.sign();
  if (a.is_nan() || b.is_nan()) return canonical_nan(f);
  if (a.is_inf() || b.is_inf()) {
    if (a.is_zero() || b.is_zero()) return canonical_nan(f);
    return infinity(f, sign);
  }
  if (a.is_zero() || b.is_zero()) return zero(f, sign);
  const Unpacked x = unpack(a);
  const Unpacked y = unpack(b);
  return make(f, round_pack(f, sign, u128{x.sig} * y.sig, x.exp + y.exp));
}

FlexNum exact_div(const FlexNum& a, const FlexNum& b) {
  const FloatFormat f = a.format();
  const bool sign = a.sign() != b.sign();
  if (a.is_nan() || b.is_nan()) return canonical_nan(f);
  if (a.is_inf()) return b.is_inf() ? canonical_nan(f) : infinity(f, sign);
  if (b.is_inf()) return zero(f, sign);
  if (b.is_zero()) return a.is_zero() ? canonical_nan(f) : infinity(f, sign);
  if (a.is_zero()) return zero(f, sign);

  Unpacked x = unpack(a);
  Unpacked y = unpack(b);
  normalize_to(x, 52);
  normalize_to(y, 52);
  const u128 num = u128{x.sig} << 64;
  u128 q = num / y.sig;
  const bool inexact = (num % y.sig) != 0;
  q = (q << 1) | (inexact ? 1U : 0U);
  return make(f, round_pack(f, sign, q, x.exp - y.exp - 65));
}

FlexNum exact_sqrt(const FlexNum& a) {
  const FloatFormat f = a.format();
  if (a.is_nan()) return canonical_nan(f);
  if (a.is_zero()) return a;
  if (a.sign()) return canonical_nan(f);
  if (a.is_inf()) return a;

  Unpacked x = unpack(a);
  normalize_to(x, 52);
  u128 sig = x.sig;
  int exp = x.exp;
  if (exp % 2 != 0) {
    sig <<= 1;
    --exp;
  }
  constexpr int kScale = 72;  // keeps sig << kScale below 2^127
  const u128 n = sig << kScale;
  u128 r = isqrt(n);
  const bool inexact = r * r != n;
  r = (r << 1) | (inexact ? 1U : 0U);
  return make(f, round_pack(f, false, r, (exp - kScale) / 2 - 1));
}

FlexNum native_add(const FlexNum& a, const FlexNum& b) {
  return encode(a.format(), a.to_double() + b.to_double());
}
FlexNum native_mul(const FlexNum& a, const FlexNum& b) {
  return encode(a.format(), a.to_double() * b.to_double());
}
FlexNum native_div(const FlexNum& a, const FlexNum& b) {
  return encode(a.format(), a.to_double() / b.to_double());
}
FlexNum native_sqrt(const FlexNum& a) { return encode(a.format(), std::sqrt(a.to_double())); }

}  // namespace detail

FlexNum add(const FlexNum& a, const FlexNum& b) {
  require_same_format(a, b, "add");
  return detail::native_path_ok(a.format()) ? detail::native_add(a, b) : detail::exact_add(a, b);
}

FlexNum sub(const FlexNum& a, const FlexNum& b) {
  require_same_format(a, b, "sub");
  return add(a, negate(b));
}

FlexNum mul(const FlexNum& a, const FlexNum& b) {
  require_same_format(a, b, "mul");
  return detail::native_path_ok(a.format()) ? detail::native_mul(a, b) : detail::exact_mul(a, b);
}

FlexNum div(const FlexNum& a, const FlexNum& b) {
  require_same_format(a, b, "div");
  return detail::native_path_ok(a.format()) ? detail::native_div(a, b) : detail::exact_div(a, b);
}

FlexNum sqrt(const FlexNum& a) {
  return detail::native_path_ok(a.format()) ? detail::native_sqrt(a) : detail::exact_sqrt(a);
}

FlexNum negate(const FlexNum& a) { return make(a.format(), a.bits() ^ sign_bit(a.format())); }

std::partial_ordering compare(const FlexNum& a, const FlexNum& b) {
  require_same_format(a, b, "compare");
  return a.to_double() <=> b.to_double();
}

FlexNum cast_fp(const FlexNum& a, FloatFormat target) { return encode(target, a.to_double()); }

FlexNum cast_from_int(std::int64_t i, FloatFormat target) {
  const bool negative = i < 0;
  const std::uint64_t mag =
      negative ? std::uint64_t{0} - static_cast<std::uint64_t>(i) : static_cast<std::uint64_t>(i);
  return make(target, round_pack(target, negative, mag, 0));
}

FlexNum cast_from_uint(std::uint64_t u, FloatFormat target) {
  return make(target, round_pack(target, false, u, 0));
}

namespace {

double truncated_finite(const FlexNum& a, int width, int max_width) {
  if (width < 1 || width > max_width) {
    throw Error(ErrorCode::OutOfRange, "integer width " + std::to_string(width));
  }
  if (!a.is_finite()) {
    throw Error(ErrorCode::InvalidConversion,
                std::string("cannot convert ") + std::string(to_string(classify(a))) +
                    " to an integer");
  }
  return std::trunc(a.to_double());
}

}  // namespace

std::int64_t cast_to_int(const FlexNum& a, int width) {
  const double t = truncated_finite(a, width, 64);
  const double limit = std::ldexp(1.0, width - 1);
  const std::int64_t hi = static_cast<std::int64_t>(low_mask(width - 1));
  if (t >= limit) return hi;
  if (t <= -limit) return -hi - 1;
  return static_cast<std::int64_t>(t);
}

std::uint64_t cast_to_uint(const FlexNum& a, int width) {
  const double t = truncated_finite(a, width, 64);
  if (t <= 0) return 0;
  if (t >= std::ldexp(1.0, width)) return low_mask(width);
  return static_cast<std::uint64_t>(t);
}

}  // namespace flexfp
