#include "oracle/rational_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flexfp::oracle {

namespace {

mpq_class pow2(long k) {
  mpq_class r(1);
  if (k >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-k));
  }
  return r;
}

mpq_class exact_double(double x) {
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), x);  // exact for finite doubles
  return q;
}

}  // namespace

mpq_class exact_value(const FlexNum& a) {
  const FloatFormat f = a.format();
  const long bias = (1L << (f.exp_bits() - 1)) - 1;
  const auto e = static_cast<long>(a.exp_field());
  const mpz_class mant(static_cast<unsigned long>(a.man_field()));
  mpq_class v;
  if (e == 0) {
    v = mpq_class(mant) * pow2(1 - bias - f.man_bits());
  } else {
    const mpz_class hidden = mpz_class(1) << f.man_bits();
    v = mpq_class(hidden + mant) * pow2(e - bias - f.man_bits());
  }
  return a.sign() ? mpq_class(-v) : v;
}

RationalOracle::RationalOracle(FloatFormat f) : format_(f) {
  if (f.width() > 16) throw std::invalid_argument("oracle table limited to 16-bit formats");
  const std::uint64_t count = ((std::uint64_t{1} << f.exp_bits()) - 1) << f.man_bits();
  table_.reserve(count);
  for (std::uint64_t bits = 0; bits < count; ++bits) table_.push_back(exact_value(FlexNum(f, bits)));
  const mpq_class& top = table_.back();
  const mpq_class& below = table_[table_.size() - 2];
  threshold_ = top + (top - below) / 2;
}

FlexNum RationalOracle::with_sign(std::uint64_t magnitude_bits, bool negative) const {
  const std::uint64_t sign = negative ? std::uint64_t{1} << (format_.width() - 1) : 0;
  return FlexNum(format_, sign | magnitude_bits);
}

FlexNum RationalOracle::nan() const {
  const std::uint64_t exp_ones = ((std::uint64_t{1} << format_.exp_bits()) - 1) << format_.man_bits();
  return FlexNum(format_, exp_ones | (std::uint64_t{1} << (format_.man_bits() - 1)));
}

FlexNum RationalOracle::inf(bool negative) const {
  const std::uint64_t exp_ones = ((std::uint64_t{1} << format_.exp_bits()) - 1) << format_.man_bits();
  return with_sign(exp_ones, negative);
}

FlexNum RationalOracle::round(const mpq_class& q, bool negative_zero) const {
  if (sgn(q) == 0) return with_sign(0, negative_zero);
  const bool negative = sgn(q) < 0;
  const mpq_class mag = abs(q);
  if (mag >= threshold_) return inf(negative);

  const auto it = std::lower_bound(table_.begin(), table_.end(), mag);
  if (it == table_.end()) return with_sign(table_.size() - 1, negative);
  const auto hi = static_cast<std::uint64_t>(it - table_.begin());
  if (*it == mag) return with_sign(hi, negative);
  const std::uint64_t lo = hi - 1;
  const mpq_class down = mag - table_[lo];
  const mpq_class up = table_[hi] - mag;
  if (down < up) return with_sign(lo, negative);
  if (up < down) return with_sign(hi, negative);
  return with_sign((lo % 2 == 0) ? lo : hi, negative);
}

FlexNum RationalOracle::encode(double x) const {
  if (std::isnan(x)) return nan();
  if (std::isinf(x)) return inf(x < 0);
  return round(exact_double(x), std::signbit(x));
}

FlexNum RationalOracle::add(const FlexNum& a, const FlexNum& b) const {
  if (a.is_nan() || b.is_nan()) return nan();
  if (a.is_inf() && b.is_inf()) return a.sign() == b.sign() ? inf(a.sign()) : nan();
  if (a.is_inf()) return inf(a.sign());
  if (b.is_inf()) return inf(b.sign());
  const mpq_class s = exact_value(a) + exact_value(b);
  // An exact zero sum is -0 only when both addends are -0.
  return round(s, a.is_zero() && b.is_zero() && a.sign() && b.sign());
}

FlexNum RationalOracle::sub(const FlexNum& a, const FlexNum& b) const {
  const std::uint64_t flip = std::uint64_t{1} << (format_.width() - 1);
  return add(a, FlexNum(format_, b.bits() ^ flip));
}

FlexNum RationalOracle::mul(const FlexNum& a, const FlexNum& b) const {
  const bool sign = a.sign() != b.sign();
  if (a.is_nan() || b.is_nan()) return nan();
  if ((a.is_inf() && b.is_zero()) || (a.is_zero() && b.is_inf())) return nan();
  if (a.is_inf() || b.is_inf()) return inf(sign);
  return round(exact_value(a) * exact_value(b), sign);
}

FlexNum RationalOracle::div(const FlexNum& a, const FlexNum& b) const {
  const bool sign = a.sign() != b.sign();
  if (a.is_nan() || b.is_nan()) return nan();
  if (a.is_inf() && b.is_inf()) return nan();
  if (a.is_zero() && b.is_zero()) return nan();
  if (a.is_inf()) return inf(sign);
  if (b.is_inf()) return with_sign(0, sign);
  if (b.is_zero()) return inf(sign);
  return round(exact_value(a) / exact_value(b), sign);
}

FlexNum RationalOracle::sqrt(const FlexNum& a) const {
  if (a.is_nan()) return nan();
  if (a.is_zero()) return a;
  if (a.sign()) return nan();
  if (a.is_inf()) return a;
  const mpq_class x = exact_value(a);
  // Largest v with v^2 <= x, then pick between v and its successor by the
  // squared midpoint. A midpoint square is never representable, so no ties.
  const auto it = std::upper_bound(table_.begin(), table_.end(), x,
                                   [](const mpq_class& value, const mpq_class& entry) {
                                     return value < entry * entry;
                                   });
  const auto lo = static_cast<std::uint64_t>(it - table_.begin()) - 1;
  if (lo + 1 >= table_.size()) return with_sign(lo, false);
  const mpq_class mid = (table_[lo] + table_[lo + 1]) / 2;
  const mpq_class mid_sq = mid * mid;
  if (x < mid_sq) return with_sign(lo, false);
  if (x > mid_sq) return with_sign(lo + 1, false);
  throw std::logic_error("sqrt midpoint tie");
}

std::vector<FlexNum> enumerate(FloatFormat f) {
  std::vector<FlexNum> out;
  const std::uint64_t n = std::uint64_t{1} << f.width();
  out.reserve(n);
  for (std::uint64_t bits = 0; bits < n; ++bits) out.emplace_back(f, bits);
  return out;
}

}  // namespace flexfp::oracle
