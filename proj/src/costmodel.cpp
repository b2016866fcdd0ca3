#include "flexfp/costmodel.hpp"

#include <cmath>

namespace flexfp {

int VectorLanes::container_bits(int width) {
  if (width <= 8) return 8;
  if (width <= 16) return 16;
  if (width <= 32) return 32;
  return 64;
}

int VectorLanes::lanes(int width) const {
  const int bits = container_bits(width);
  return bits >= 32 ? 1 : 32 / bits;
}

StatsReport pack_vectors(const StatsReport& r, const VectorLanes& lanes) {
  StatsReport out;
  for (const auto& [key, n] : r.counts()) {
    if (key.region != RegionTag::Vectorizable) {
      out.add(key, n);
      continue;
    }
    const auto l = static_cast<std::uint64_t>(lanes.lanes(key.element_width()));
    out.add(key, (n + l - 1) / l);
  }
  return out;
}

CostTable::CostTable(const KvDocument& doc) {
  for (const auto& [key, value] : doc.entries()) set(key, parse_number(value));
}

void CostTable::set(const std::string& key, double value) {
  if (!(value >= 0) || !std::isfinite(value)) {
    throw Error(ErrorCode::OutOfRange, "cost table entry '" + key + "' must be finite and >= 0");
  }
  values_[key] = value;
}

double CostTable::lookup(const std::string& key) const {
  std::string k = key;
  for (;;) {
    if (const auto it = values_.find(k); it != values_.end()) return it->second;
    const auto dot = k.rfind('.');
    if (dot == std::string::npos) break;
    k.erase(dot);
  }
  throw Error(ErrorCode::MissingTableEntry, "no cost table entry for '" + key + "'");
}

namespace {

std::string region_name(const EventKey& key) { return std::string(to_string(key.region)); }

std::string class_key(const std::string& prefix, const EventKey& key) {
  if (is_cast(key.kind)) return prefix + ".cast";
  if (is_memory(key.kind)) return prefix + ".mem";
  return prefix + "." + format_token(key.format) + "." + std::string(to_string(key.kind));
}

int whole_cycles(double v, const std::string& what) {
  if (v < 1 || v != std::floor(v)) {
    throw Error(ErrorCode::OutOfRange, what + " must be a whole number of cycles >= 1");
  }
  return static_cast<int>(v);
}

}  // namespace

int LatencyTable::issue(const EventKey& key) const {
  const std::string k = class_key("issue", key);
  return whole_cycles(table.lookup(k), k);
}

int LatencyTable::latency(const EventKey& key) const {
  const std::string k = class_key("latency", key);
  return whole_cycles(table.lookup(k), k);
}

double LatencyTable::stall_fraction() const {
  const double s = table.lookup("stall_fraction");
  if (s > 1) throw Error(ErrorCode::OutOfRange, "stall_fraction must lie in [0,1]");
  return s;
}

double EnergyTable::per_event(const EventKey& key) const {
  if (is_cast(key.kind)) return table.lookup("energy.cast." + region_name(key));
  if (is_memory(key.kind)) {
    return table.lookup("energy.mem." + std::to_string(VectorLanes::container_bits(key.format.width())) +
                        "." + region_name(key));
  }
  return table.lookup("energy.op." + format_token(key.format) + "." + region_name(key));
}

double EnergyTable::other() const { return table.lookup("energy.other"); }

std::string_view default_tables_text() {
  return R"(# Default cost tables.
# Energies are unit placeholders; replace them with measured values.
# Lookups fall back from the most specific key to its prefixes, so
# "latency.binary16.mul" is served by "latency.binary16" here.

stall_fraction = 0

issue = 1
latency.binary32 = 2
latency.binary16 = 2
latency.binary16alt = 2
latency.binary8 = 1
latency.cast = 1
latency.mem = 1

energy.op = 1
energy.cast = 1
energy.mem = 1
energy.other = 1
)";
}

CostTables CostTables::parse(std::string_view text) {
  const CostTable t(KvDocument::parse(text));
  return CostTables{LatencyTable{t}, EnergyTable{t}};
}

CostTables CostTables::defaults() { return parse(default_tables_text()); }

CostTables CostTables::load(const std::string& path) { return parse(read_text_file(path)); }

CostReport estimate(const StatsReport& r, const CostTables& tables, const VectorLanes& lanes) {
  CostReport c;
  const double stall = r.empty() ? 0.0 : tables.latency.stall_fraction();

  for (const auto& [key, n] : r.counts()) {
    if (!is_arithmetic(key.kind)) continue;
    OpSplit& split = c.ops_by_format[format_token(key.format)];
    if (key.region == RegionTag::Vectorizable) {
      split.vector_elements += n;
    } else {
      split.scalar += n;
    }
  }

  const StatsReport packed = pack_vectors(r, lanes);
  for (const auto& [key, n] : packed.counts()) {
    const auto count = static_cast<double>(n);
    const double issue = count * tables.latency.issue(key);
    const double stalled = count * stall * (tables.latency.latency(key) - 1);
    const double energy = count * tables.energy.per_event(key);
    c.cycles_stall += stalled;
    if (is_memory(key.kind)) {
      c.cycles_memory += issue;
      c.memory_total += n;
      (key.region == RegionTag::Vectorizable ? c.memory_vector : c.memory_scalar) += n;
      c.energy_memory += energy;
    } else if (is_cast(key.kind)) {
      c.cycles_casts += issue;
      c.casts += n;
      c.energy_fp += energy;
    } else {
      c.cycles_ops += issue;
      if (key.region == RegionTag::Vectorizable) c.ops_by_format[format_token(key.format)].vector_ops += n;
      c.energy_fp += energy;
    }
  }

  if (c.cycles_stall > 0) c.energy_other = c.cycles_stall * tables.energy.other();
  c.cycles_total = c.cycles_ops + c.cycles_casts + c.cycles_memory + c.cycles_stall;
  c.energy_total = c.energy_fp + c.energy_memory + c.energy_other;
  return c;
}

CostReport normalize(const CostReport& test, const CostReport& baseline) {
  if (!(baseline.cycles_total > 0) || baseline.memory_total == 0 || !(baseline.energy_total > 0)) {
    throw Error(ErrorCode::DivisionByZeroBaseline, "baseline has no cycles, memory accesses or energy");
  }
  CostReport out = test;
  CostRatios r;
  r.cycles = test.cycles_total / baseline.cycles_total;
  r.memory = static_cast<double>(test.memory_total) / static_cast<double>(baseline.memory_total);
  r.energy = test.energy_total / baseline.energy_total;
  r.energy_fp = test.energy_fp / baseline.energy_total;
  r.energy_memory = test.energy_memory / baseline.energy_total;
  r.energy_other = test.energy_other / baseline.energy_total;
  if (baseline.memory_vector > 0) {
    r.memory_vector = static_cast<double>(test.memory_vector) / static_cast<double>(baseline.memory_vector);
  }
  out.ratios = r;
  return out;
}

void CostReport::write_to(KvDocument& doc) const {
  doc.set("cycles.total", cycles_total);
  doc.set("cycles.ops", cycles_ops);
  doc.set("cycles.casts", cycles_casts);
  doc.set("cycles.memory", cycles_memory);
  doc.set("cycles.stall", cycles_stall);
  doc.set("memory.total", memory_total);
  doc.set("memory.scalar", memory_scalar);
  doc.set("memory.vector", memory_vector);
  doc.set("energy.total", energy_total);
  doc.set("energy.fp", energy_fp);
  doc.set("energy.memory", energy_memory);
  doc.set("energy.other", energy_other);
  doc.set("casts", casts);
  for (const auto& [fmt, s] : ops_by_format) {
    doc.set("ops." + fmt + ".scalar", s.scalar);
    doc.set("ops." + fmt + ".vector_elements", s.vector_elements);
    doc.set("ops." + fmt + ".vector_ops", s.vector_ops);
  }
  if (ratios) {
    doc.set("ratio.cycles", ratios->cycles);
    doc.set("ratio.memory", ratios->memory);
    doc.set("ratio.energy", ratios->energy);
    doc.set("ratio.energy.fp", ratios->energy_fp);
    doc.set("ratio.energy.memory", ratios->energy_memory);
    doc.set("ratio.energy.other", ratios->energy_other);
    if (ratios->memory_vector) doc.set("ratio.memory.vector", *ratios->memory_vector);
  }
}

CostReport CostReport::read_from(const KvDocument& doc) {
  auto count = [&](const std::string& key) {
    const double v = doc.require_number(key);
    if (v < 0 || v != std::floor(v)) throw Error(ErrorCode::ParseError, "bad count for '" + key + "'");
    return static_cast<std::uint64_t>(v);
  };
  CostReport c;
  c.cycles_total = doc.require_number("cycles.total");
  c.cycles_ops = doc.require_number("cycles.ops");
  c.cycles_casts = doc.require_number("cycles.casts");
  c.cycles_memory = doc.require_number("cycles.memory");
  c.cycles_stall = doc.require_number("cycles.stall");
  c.memory_total = count("memory.total");
  c.memory_scalar = count("memory.scalar");
  c.memory_vector = count("memory.vector");
  c.energy_total = doc.require_number("energy.total");
  c.energy_fp = doc.require_number("energy.fp");
  c.energy_memory = doc.require_number("energy.memory");
  c.energy_other = doc.require_number("energy.other");
  c.casts = count("casts");
  for (const auto& [key, value] : doc.entries()) {
    if (key.rfind("ops.", 0) != 0) continue;
    const auto dot = key.rfind('.');
    const std::string fmt = key.substr(4, dot - 4);
    const std::string field = key.substr(dot + 1);
    OpSplit& s = c.ops_by_format[fmt];
    if (field == "scalar") {
      s.scalar = count(key);
    } else if (field == "vector_elements") {
      s.vector_elements = count(key);
    } else if (field == "vector_ops") {
      s.vector_ops = count(key);
    } else {
      throw Error(ErrorCode::ParseError, "unknown field in '" + key + "'");
    }
  }
  if (doc.contains("ratio.cycles")) {
    CostRatios r;
    r.cycles = doc.require_number("ratio.cycles");
    r.memory = doc.require_number("ratio.memory");
    r.energy = doc.require_number("ratio.energy");
    r.energy_fp = doc.require_number("ratio.energy.fp");
    r.energy_memory = doc.require_number("ratio.energy.memory");
    r.energy_other = doc.require_number("ratio.energy.other");
    if (doc.contains("ratio.memory.vector")) r.memory_vector = doc.require_number("ratio.memory.vector");
    c.ratios = r;
  }
  return c;
}

}  // namespace flexfp
