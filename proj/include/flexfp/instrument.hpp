#pragma once

// Dynamic operation and cast counting per format, split by scalar and
// vectorizable code regions.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flexfp/flexcore.hpp"
#include "flexfp/kvtext.hpp"

namespace flexfp {

enum class OpKind { Add, Sub, Mul, Div, Sqrt, Cmp, CastFp, CastToInt, CastFromInt, Load, Store };

inline constexpr OpKind kAllOpKinds[] = {OpKind::Add,     OpKind::Sub,       OpKind::Mul,
                                         OpKind::Div,     OpKind::Sqrt,      OpKind::Cmp,
                                         OpKind::CastFp,  OpKind::CastToInt, OpKind::CastFromInt,
                                         OpKind::Load,    OpKind::Store};

std::string_view to_string(OpKind k);
OpKind parse_op_kind(std::string_view s);
constexpr bool is_arithmetic(OpKind k) { return k <= OpKind::Cmp; }
constexpr bool is_cast(OpKind k) { return k >= OpKind::CastFp && k <= OpKind::CastFromInt; }
constexpr bool is_memory(OpKind k) { return k == OpKind::Load || k == OpKind::Store; }

enum class RegionTag { Scalar, Vectorizable };

std::string_view to_string(RegionTag t);

struct EventKey {
  OpKind kind;
  FloatFormat format;  // operand format; the destination for CastFp
  FloatFormat source;  // CastFp source; equals `format` for every other kind
  RegionTag region;

  static EventKey op(OpKind kind, FloatFormat f, RegionTag region) { return {kind, f, f, region}; }
  static EventKey cast(FloatFormat from, FloatFormat to, RegionTag region) {
    return {OpKind::CastFp, to, from, region};
  }

  /// Bits moved per element: the operand width, or the wider side of a cast.
  int element_width() const { return std::max(format.width(), source.width()); }

  auto operator<=>(const EventKey&) const = default;
};

class StatsReport {
 public:
  void add(const EventKey& key, std::uint64_t n = 1);
  std::uint64_t count(const EventKey& key) const;
  std::uint64_t total() const;

  template <class Pred>
  std::uint64_t total_if(Pred pred) const {
    std::uint64_t sum = 0;
    for (const auto& [key, n] : counts_) {
      if (pred(key)) sum += n;
    }
    return sum;
  }

  const std::map<EventKey, std::uint64_t>& counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }

  /// Adds "count.<region>.<kind>.<format>[<source>] = n" entries.
  void write_to(KvDocument& doc) const;
  static StatsReport read_from(const KvDocument& doc);

  friend bool operator==(const StatsReport&, const StatsReport&) = default;

 private:
  std::map<EventKey, std::uint64_t> counts_;
};

StatsReport merge(const StatsReport& a, const StatsReport& b);

/// Per-evaluation event sink. Regions may not nest.
class StatsContext {
 public:
  void record(OpKind kind, FloatFormat f);
  void record_cast(FloatFormat from, FloatFormat to);

  void enter_region(RegionTag tag);
  void exit_region();
  RegionTag region() const { return open_.value_or(RegionTag::Scalar); }
  bool in_region() const { return open_.has_value(); }

  StatsReport report() const;

 private:
  void bump(const EventKey& key);

  // Few distinct keys per run; a flat list beats a tree on the hot path.
  std::vector<std::pair<EventKey, std::uint64_t>> tally_;
  std::optional<RegionTag> open_;
};

class ScopedRegion {
 public:
  ScopedRegion(StatsContext& ctx, RegionTag tag) : ctx_(ctx) { ctx_.enter_region(tag); }
  ~ScopedRegion() { ctx_.exit_region(); }
  ScopedRegion(const ScopedRegion&) = delete;
  ScopedRegion& operator=(const ScopedRegion&) = delete;

 private:
  StatsContext& ctx_;
};

}  // namespace flexfp
