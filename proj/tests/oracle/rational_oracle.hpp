#pragma once

// Exact-rational reference for correctly rounded arithmetic. Rounding is done
// by nearest-neighbour search over the enumerated value set of the format, so
// it shares nothing with the library's bit-level rounding. Only practical for
// formats up to 16 bits wide.

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "flexfp/flexcore.hpp"

namespace flexfp::oracle {

/// Exact value of a finite pattern, straight from the field definitions.
mpq_class exact_value(const FlexNum& a);

class RationalOracle {
 public:
  explicit RationalOracle(FloatFormat f);

  FloatFormat format() const { return format_; }

  /// Round-to-nearest-even of q; `negative_zero` picks the sign when q == 0.
  FlexNum round(const mpq_class& q, bool negative_zero = false) const;
  FlexNum encode(double x) const;

  FlexNum add(const FlexNum& a, const FlexNum& b) const;
  FlexNum sub(const FlexNum& a, const FlexNum& b) const;
  FlexNum mul(const FlexNum& a, const FlexNum& b) const;
  FlexNum div(const FlexNum& a, const FlexNum& b) const;
  FlexNum sqrt(const FlexNum& a) const;

  /// Non-negative finite values in ascending order; index == bit pattern.
  const std::vector<mpq_class>& table() const { return table_; }

 private:
  FlexNum with_sign(std::uint64_t magnitude_bits, bool negative) const;
  FlexNum nan() const;
  FlexNum inf(bool negative) const;

  FloatFormat format_;
  std::vector<mpq_class> table_;
  mpq_class threshold_;
};

/// All 2^width patterns of a small format.
std::vector<FlexNum> enumerate(FloatFormat f);

}  // namespace flexfp::oracle
