#pragma once

// Named storage formats and the precision-interval -> exponent-width maps
// that turn per-variable precision bits into concrete formats.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexfp/flexcore.hpp"

namespace flexfp {

enum class NamedFormat { binary8, binary16, binary16alt, binary32 };

/// Ordered by storage width, then declaration order.
inline constexpr std::array<NamedFormat, 4> kNamedFormats = {
    NamedFormat::binary8, NamedFormat::binary16, NamedFormat::binary16alt, NamedFormat::binary32};

FloatFormat format_of(NamedFormat n);
std::string_view to_string(NamedFormat n);
std::optional<NamedFormat> named_format(FloatFormat f);
int storage_width(NamedFormat n);

inline constexpr int kMinPrecision = 1;
inline constexpr int kMaxPrecision = 24;

struct FormatMapEntry {
  int p_max;     // inclusive upper bound of the precision interval
  int exp_bits;  // exponent width assigned to that interval
  bool operator==(const FormatMapEntry&) const = default;
};

class FormatMap {
 public:
  /// Bounds must be strictly increasing and end at 24; widths must be legal exponent widths.
  explicit FormatMap(std::vector<FormatMapEntry> entries);

  /// "p_max exp_bits" per line, ascending; '#' starts a comment.
  static FormatMap parse(std::string_view text);
  static FormatMap load(const std::string& path);
  std::string to_text() const;

  int exp_bits_for(int precision) const;
  const std::vector<FormatMapEntry>& entries() const { return entries_; }

 private:
  std::vector<FormatMapEntry> entries_;
};

struct TypeSystem {
  std::string name;
  FormatMap map;

  /// {(0,3] -> 5, (3,11] -> 5, (11,24] -> 8}: binary8, binary16, binary32.
  static TypeSystem v1();
  /// {(0,3] -> 5, (3,8] -> 8, (8,11] -> 5, (11,24] -> 8}: adds binary16alt.
  static TypeSystem v2();
  /// "v1", "v2" or "custom:<map file>".
  static TypeSystem from_spec(const std::string& spec);
};

/// Format with the mapped exponent width and p - 1 mantissa bits. A 1-bit
/// request gets the narrowest legal mantissa (1 bit).
FloatFormat map_precision(const TypeSystem& ts, int precision);

/// Smallest named format with the mapped exponent width and at least p - 1 mantissa bits.
NamedFormat classify_precision(const TypeSystem& ts, int precision);

}  // namespace flexfp
