#pragma once

// Analytical cycles / memory-access / energy model over a StatsReport, with
// sub-word SIMD packing of vectorizable regions on a 32-bit datapath.

#include <map>
#include <optional>
#include <string>

#include "flexfp/instrument.hpp"
#include "flexfp/kvtext.hpp"

namespace flexfp {

/// Elements per 32-bit slice: 8-bit -> 4, 16-bit -> 2, 32-bit -> 1. Odd
/// widths occupy the next container size; anything wider than 32 bits is 1.
struct VectorLanes {
  static int container_bits(int width);
  int lanes(int width) const;
};

/// In a vectorizable bucket, n elements of width w become ceil(n / lanes(w)).
StatsReport pack_vectors(const StatsReport& r, const VectorLanes& lanes = {});

/// Hierarchical "a.b.c = value" lookups: the most specific key present wins,
/// dropping trailing components one at a time. MissingTableEntry otherwise.
class CostTable {
 public:
  CostTable() = default;
  explicit CostTable(const KvDocument& doc);

  double lookup(const std::string& key) const;
  void set(const std::string& key, double value);
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

// Keys (fmt is a format token such as binary16alt, op an operation kind):
//   latency.<fmt>.<op>   issue.<fmt>.<op>   latency.cast   latency.mem
//   stall_fraction
//   energy.op.<fmt>.<scalar|vector>   energy.cast.<scalar|vector>
//   energy.mem.<8|16|32|64>.<scalar|vector>   energy.other
struct LatencyTable {
  CostTable table;
  /// Cycles per issue, cycles of latency, and the fraction of latency slots
  /// beyond the first left unfilled.
  int issue(const EventKey& key) const;
  int latency(const EventKey& key) const;
  double stall_fraction() const;
};

struct EnergyTable {
  CostTable table;
  double per_event(const EventKey& key) const;
  double other() const;
};

struct CostTables {
  LatencyTable latency;
  EnergyTable energy;

  /// Unit energies; 2-cycle 16/32-bit arithmetic; 1-cycle binary8, casts and memory; no stalls.
  static CostTables defaults();
  static CostTables parse(std::string_view text);
  static CostTables load(const std::string& path);
};

/// Text of the built-in defaults, in the table file syntax.
std::string_view default_tables_text();

struct OpSplit {
  std::uint64_t scalar = 0;           // scalar arithmetic ops
  std::uint64_t vector_elements = 0;  // arithmetic element ops inside vector regions
  std::uint64_t vector_ops = 0;       // the same after packing
  friend bool operator==(const OpSplit&, const OpSplit&) = default;
};

struct CostRatios {
  double cycles = 0;
  double memory = 0;
  double energy = 0;
  // Energy parts over the baseline total (stacked-bar view).
  double energy_fp = 0;
  double energy_memory = 0;
  double energy_other = 0;
  std::optional<double> memory_vector;  // when the baseline has vector accesses
  friend bool operator==(const CostRatios&, const CostRatios&) = default;
};

struct CostReport {
  double cycles_total = 0;
  double cycles_ops = 0;
  double cycles_casts = 0;
  double cycles_memory = 0;
  double cycles_stall = 0;

  std::uint64_t memory_total = 0;
  std::uint64_t memory_scalar = 0;
  std::uint64_t memory_vector = 0;

  double energy_total = 0;
  double energy_fp = 0;
  double energy_memory = 0;
  double energy_other = 0;

  std::uint64_t casts = 0;
  std::map<std::string, OpSplit> ops_by_format;  // keyed by format token
  std::optional<CostRatios> ratios;

  void write_to(KvDocument& doc) const;
  static CostReport read_from(const KvDocument& doc);
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

CostReport estimate(const StatsReport& r, const CostTables& tables, const VectorLanes& lanes = {});

/// Fills `ratios`; DivisionByZeroBaseline if the baseline has no cycles,
/// memory accesses or energy.
CostReport normalize(const CostReport& test, const CostReport& baseline);

}  // namespace flexfp
